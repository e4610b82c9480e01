#include "semihyp/germ_jet.hpp"

#include <algorithm>
#include <numeric>

#include "semihyp/error.hpp"

namespace semihyp {

GermJet::GermJet(std::vector<PolyJet> components) : components_(std::move(components)) {
  if (components_.empty()) raise(ErrorCode::dimension, "germ needs at least one component");
  const std::size_t n = components_.size();
  trunc_ = components_.front().trunc_degree();
  for (const auto& c : components_) {
    if (c.n_vars() != n) {
      raise(ErrorCode::dimension, "germ component count must equal the number of variables");
    }
    trunc_ = std::min(trunc_, c.trunc_degree());
  }
  for (auto& c : components_) {
    if (c.has_constant_term()) raise(ErrorCode::domain, "germ must fix the origin");
    if (c.trunc_degree() != trunc_) c = c.truncated(trunc_);
  }
}

GermJet GermJet::identity(std::size_t n, int trunc_degree) {
  std::vector<PolyJet> c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.push_back(PolyJet::variable(n, trunc_degree, i));
  return GermJet(std::move(c));
}

GermJet GermJet::linear(const Eigen::MatrixXcd& a, int trunc_degree) {
  if (a.rows() != a.cols() || a.rows() == 0) raise(ErrorCode::dimension, "linear part must be square");
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<PolyJet> c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PolyJet p(n, trunc_degree);
    for (std::size_t j = 0; j < n; ++j) p.set(MultiIndex::unit(n, j), a(i, j));
    c.push_back(std::move(p));
  }
  return GermJet(std::move(c));
}

Eigen::MatrixXcd GermJet::linear_part() const {
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& t : components_[i].terms()) {
      if (t.index.degree() != 1) continue;
      a(i, static_cast<Eigen::Index>(t.index.last_nonzero())) = t.coeff;
    }
  }
  return a;
}

bool GermJet::has_invertible_linear_part(double tol) const {
  const Eigen::MatrixXcd a = linear_part();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > tol * std::max(1.0, s(0));
}

GermJet GermJet::truncated(int degree) const {
  std::vector<PolyJet> c;
  c.reserve(dim());
  for (const auto& p : components_) c.push_back(p.truncated(degree));
  return GermJet(std::move(c));
}

GermJet GermJet::nonlinear_part() const {
  std::vector<PolyJet> c;
  c.reserve(dim());
  for (const auto& p : components_) {
    std::vector<Term> keep;
    for (const auto& t : p.terms()) {
      if (t.index.degree() >= 2) keep.push_back(t);
    }
    c.push_back(PolyJet::from_terms(dim(), trunc_, std::move(keep)));
  }
  return GermJet(std::move(c));
}

void GermJet::set_component(std::size_t i, PolyJet p) {
  if (i >= dim()) raise(ErrorCode::dimension, "component index out of range");
  if (p.n_vars() != dim()) raise(ErrorCode::dimension, "component arity mismatch");
  if (p.has_constant_term()) raise(ErrorCode::domain, "germ must fix the origin");
  components_[i] = p.truncated(std::min(trunc_, p.trunc_degree()));
  if (components_[i].trunc_degree() < trunc_) *this = truncated(components_[i].trunc_degree());
}

GermJet operator+(const GermJet& a, const GermJet& b) {
  if (a.dim() != b.dim()) raise(ErrorCode::dimension, "germ dimension mismatch");
  std::vector<PolyJet> c;
  for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a[i] + b[i]);
  return GermJet(std::move(c));
}

GermJet operator-(const GermJet& a, const GermJet& b) {
  if (a.dim() != b.dim()) raise(ErrorCode::dimension, "germ dimension mismatch");
  std::vector<PolyJet> c;
  for (std::size_t i = 0; i < a.dim(); ++i) c.push_back(a[i] - b[i]);
  return GermJet(std::move(c));
}

GermJet compose(const GermJet& outer, const GermJet& inner) {
  if (outer.dim() != inner.dim()) raise(ErrorCode::dimension, "germ dimension mismatch in compose");
  return GermJet(compose_all(outer.components(), inner.components()));
}

GermJet apply_matrix(const Eigen::MatrixXcd& m, const GermJet& f) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.cols()) != f.dim()) {
    raise(ErrorCode::dimension, "matrix does not match germ dimension");
  }
  const std::size_t n = f.dim();
  std::vector<PolyJet> c;
  c.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PolyJet p(n, f.trunc_degree());
    for (std::size_t j = 0; j < n; ++j) {
      const Complex mij = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (mij != Complex(0.0)) p += f[j] * mij;
    }
    c.push_back(std::move(p));
  }
  return GermJet(std::move(c));
}

GermJet invert(const GermJet& g) {
  const std::size_t n = g.dim();
  const int trunc = g.trunc_degree();
  const Eigen::MatrixXcd a = g.linear_part();
  if (!g.has_invertible_linear_part()) raise(ErrorCode::singular, "linear part is not invertible");
  const Eigen::MatrixXcd a_inv = a.inverse();

  GermJet inv = GermJet::linear(a_inv, trunc);
  // With inv exact through degree d-1, g o inv = id + (degree-d error) + ...,
  // and the degree-d correction is -A^{-1} times that error.
  for (int d = 2; d <= trunc; ++d) {
    const GermJet r = compose(g.truncated(d), inv.truncated(d));
    std::vector<PolyJet> err;
    err.reserve(n);
    for (std::size_t i = 0; i < n; ++i) err.push_back(r[i].homogeneous_part(d));
    const GermJet corr = apply_matrix(a_inv, GermJet(std::move(err)));
    std::vector<PolyJet> next;
    next.reserve(n);
    for (std::size_t i = 0; i < n; ++i) next.push_back(inv[i] - corr[i].truncated(trunc));
    inv = GermJet(std::move(next));
  }
  return inv;
}

GermJet conjugate(const GermJet& h, const GermJet& f) {
  return compose(h, compose(f, invert(h)));
}

GermJet iterate(const GermJet& f, int m) {
  if (m < 0) raise(ErrorCode::domain, "negative iterate");
  GermJet out = GermJet::identity(f.dim(), f.trunc_degree());
  for (int j = 0; j < m; ++j) out = compose(f, out);
  return out;
}

Eigen::VectorXcd evaluate(const GermJet& g, std::span<const Complex> z) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(g.dim()));
  for (std::size_t i = 0; i < g.dim(); ++i) out(static_cast<Eigen::Index>(i)) = g[i].evaluate(z);
  return out;
}

Eigen::VectorXcd evaluate(const GermJet& g, const Eigen::VectorXcd& z) {
  return evaluate(g, std::span<const Complex>(z.data(), static_cast<std::size_t>(z.size())));
}

Eigen::MatrixXcd jacobian(const GermJet& g, const Eigen::VectorXcd& z) {
  const auto n = static_cast<Eigen::Index>(g.dim());
  if (z.size() != n) raise(ErrorCode::dimension, "evaluation point has wrong dimension");
  const std::span<const Complex> pt(z.data(), static_cast<std::size_t>(n));
  Eigen::MatrixXcd j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      j(r, c) = g[static_cast<std::size_t>(r)].derivative(static_cast<std::size_t>(c)).evaluate(pt);
    }
  }
  return j;
}

GermJet permute_coordinates(const GermJet& f, std::span<const std::size_t> perm) {
  const std::size_t n = f.dim();
  if (perm.size() != n) raise(ErrorCode::dimension, "permutation length mismatch");
  std::vector<std::size_t> check(perm.begin(), perm.end());
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (check[i] != i) raise(ErrorCode::domain, "not a permutation");
  }
  // z_j = w_{inv[j]}
  std::vector<std::size_t> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[perm[i]] = i;
  std::vector<PolyJet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> terms;
    for (const auto& t : f[perm[i]].terms()) {
      MultiIndex p(n);
      for (std::size_t j = 0; j < n; ++j) p.set(inv[j], t.index[j]);
      terms.push_back({p, t.coeff});
    }
    out.push_back(PolyJet::from_terms(n, f.trunc_degree(), std::move(terms)));
  }
  return GermJet(std::move(out));
}

double max_abs_difference(const GermJet& a, const GermJet& b) {
  if (a.dim() != b.dim()) raise(ErrorCode::dimension, "germ dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, max_abs_difference(a[i], b[i]));
  return m;
}

}  // namespace semihyp
