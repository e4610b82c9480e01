#include "semihyp/center_manifold.hpp"

#include <algorithm>
#include <sstream>

#include "semihyp/error.hpp"

namespace semihyp {
namespace {

// The curve z_1 -> (z_1, u(z_1)) as n jets in one variable.
std::vector<PolyJet> graph_map(const CurveJet& c, int trunc) {
  std::vector<PolyJet> g;
  g.push_back(PolyJet::variable(1, trunc, 0));
  for (const auto& u : c.u) g.push_back(u.truncated(trunc));
  return g;
}

}  // namespace

std::vector<PolyJet> invariance_residual(const GermJet& f, const CurveJet& c) {
  const std::size_t n = f.dim();
  if (c.u.size() + 1 != n) raise(ErrorCode::dimension, "curve jet does not match germ dimension");
  const int trunc = std::min(f.trunc_degree(), c.trunc_degree);
  const auto on_curve = compose_all(f.truncated(trunc).components(), graph_map(c, trunc));
  const PolyJet f1 = on_curve[0];
  std::vector<PolyJet> res;
  for (std::size_t i = 1; i < n; ++i) {
    const PolyJet pulled = compose(c.u[i - 1].truncated(trunc), std::span<const PolyJet>(&f1, 1));
    res.push_back(on_curve[i] - pulled);
  }
  return res;
}

double max_invariance_residual(const GermJet& f, const CurveJet& c) {
  double m = 0.0;
  for (const auto& r : invariance_residual(f, c)) m = std::max(m, r.max_abs());
  return m;
}

CurveJet center_jet(const GermJet& f, const SpectralData& s, int trunc_degree) {
  const std::size_t n = f.dim();
  if (n != s.dim()) raise(ErrorCode::dimension, "spectral data does not match germ dimension");
  const int trunc = std::min(trunc_degree, f.trunc_degree());
  CurveJet c;
  c.trunc_degree = trunc;
  for (std::size_t i = 1; i < n; ++i) c.u.emplace_back(1, trunc);
  if (n == 1) return c;

  const Eigen::MatrixXcd a = f.linear_part();
  const auto m = static_cast<Eigen::Index>(n - 1);
  const Eigen::MatrixXcd a22 = a.bottomRightCorner(m, m);
  const Complex l1 = s.lambda1();
  for (int d = 2; d <= trunc; ++d) {
    CurveJet partial = c;
    partial.trunc_degree = d;
    const auto res = invariance_residual(f.truncated(d), partial);
    Eigen::VectorXcd r(m);
    for (Eigen::Index i = 0; i < m; ++i) r(i) = res[static_cast<std::size_t>(i)].coeff(MultiIndex{d});
    const Eigen::MatrixXcd sys = std::pow(l1, d) * Eigen::MatrixXcd::Identity(m, m) - a22;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (pivot < 1e-10 * sys.norm()) {
      std::ostringstream msg;
      msg << "order-" << d << " center system is singular (norm " << sys.norm() << ")";
      raise(ErrorCode::singular, msg.str());
    }
    const Eigen::VectorXcd coef = lu.solve(r);
    for (Eigen::Index i = 0; i < m; ++i) c.u[static_cast<std::size_t>(i)].set(MultiIndex{d}, coef(i));
  }
  return c;
}

GermJet straighten(const GermJet& f, const CurveJet& c) {
  const std::size_t n = f.dim();
  if (c.u.size() + 1 != n) raise(ErrorCode::dimension, "curve jet does not match germ dimension");
  const int trunc = f.trunc_degree();
  std::vector<PolyJet> h;
  h.push_back(PolyJet::variable(n, trunc, 0));
  for (std::size_t i = 1; i < n; ++i) {
    PolyJet hi = PolyJet::variable(n, trunc, i);
    for (const auto& t : c.u[i - 1].terms()) hi.add(MultiIndex::pure_power(n, 0, t.index[0]), -t.coeff);
    h.push_back(std::move(hi));
  }
  return conjugate(GermJet(std::move(h)), f);
}

}  // namespace semihyp
