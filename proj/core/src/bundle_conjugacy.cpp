#include "semihyp/bundle_conjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "semihyp/error.hpp"
#include "semihyp/sector_dynamics.hpp"

namespace semihyp {

namespace {

double op_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double min_singular(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& v) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
  return qr.householderQ() * Eigen::MatrixXd::Identity(v.rows(), v.cols());
}

double projector_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a * a.transpose() - b * b.transpose()).norm();
}

bool finite(const Eigen::VectorXcd& z) { return z.allFinite(); }

Eigen::MatrixXcd block(const Eigen::MatrixXcd& l, std::size_t first, std::size_t count) {
  const auto f = static_cast<Eigen::Index>(first);
  const auto c = static_cast<Eigen::Index>(count);
  return l.block(f, f, c, c);
}

}  // namespace

Eigen::VectorXd realify(const Eigen::VectorXcd& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x(2 * i) = z(i).real();
    x(2 * i + 1) = z(i).imag();
  }
  return x;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& a) {
  Eigen::MatrixXd r(2 * a.rows(), 2 * a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      r(2 * i, 2 * j) = re;
      r(2 * i, 2 * j + 1) = -im;
      r(2 * i + 1, 2 * j) = im;
      r(2 * i + 1, 2 * j + 1) = re;
    }
  }
  return r;
}

Eigen::VectorXcd complexify(const Eigen::VectorXd& x) {
  if (x.size() % 2 != 0) raise(ErrorCode::dimension, "real vector of odd length");
  Eigen::VectorXcd z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Complex(x(2 * i), x(2 * i + 1));
  return z;
}

Eigen::MatrixXd coordinate_frame(std::size_t n, std::size_t first, std::size_t count) {
  if (first + count > n) raise(ErrorCode::dimension, "coordinate block out of range");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * count));
  for (std::size_t j = 0; j < 2 * count; ++j) m(static_cast<Eigen::Index>(2 * first + j), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

LinearMap::LinearMap(Eigen::MatrixXcd l) : l_(std::move(l)) {
  if (l_.rows() != l_.cols() || l_.rows() == 0) raise(ErrorCode::dimension, "linear map must be square");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(l_);
  if (!lu.isInvertible()) raise(ErrorCode::singular, "linear map is not invertible");
  l_inv_ = lu.inverse();
  real_ = realify(l_);
}

BumpExtension::BumpExtension(GermJet f, Eigen::MatrixXcd l, double eta)
    : f_(std::move(f)), l_(std::move(l)), eta_(eta) {
  const auto n = static_cast<Eigen::Index>(f_.dim());
  if (l_.rows() != n || l_.cols() != n) raise(ErrorCode::dimension, "linear map does not match the germ");
  if (!(eta_ > 0.0)) raise(ErrorCode::parameter, "bump radius must be positive");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(l_);
  if (!lu.isInvertible()) raise(ErrorCode::singular, "linear map is not invertible");
  l_inv_ = lu.inverse();
  l_real_ = realify(l_);
  df_.reserve(f_.dim() * f_.dim());
  for (std::size_t i = 0; i < f_.dim(); ++i)
    for (std::size_t j = 0; j < f_.dim(); ++j) df_.push_back(f_[i].derivative(j));
}

Eigen::VectorXcd BumpExtension::apply(const Eigen::VectorXcd& z) const {
  const double r = z.norm();
  if (r >= eta_) return l_ * z;
  const double rho = bump(r, eta_);
  return rho * evaluate(f_, z) + (1.0 - rho) * (l_ * z);
}

Eigen::VectorXcd BumpExtension::apply_inverse(const Eigen::VectorXcd& y) const {
  Eigen::VectorXcd z = l_inv_ * y;
  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXcd next = l_inv_ * (y - (apply(z) - l_ * z));
    const double step = (next - z).norm();
    z = next;
    if (step <= 1e-14 * (1.0 + z.norm())) return z;
  }
  raise(ErrorCode::convergence, "inverse fixed-point iteration did not converge");
}

Eigen::MatrixXd BumpExtension::real_jacobian(const Eigen::VectorXcd& z) const {
  const double r = z.norm();
  if (r >= eta_) return l_real_;
  const std::size_t n = f_.dim();
  std::vector<Complex> pt(z.data(), z.data() + z.size());
  Eigen::MatrixXcd df(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      df(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = df_[i * n + j].evaluate(pt);
  const double rho = bump(r, eta_);
  Eigen::MatrixXd out = realify(Eigen::MatrixXcd(rho * df + (1.0 - rho) * l_));
  const double drho = bump_derivative(r, eta_);
  if (drho != 0.0 && r > 0.0) {
    const Eigen::VectorXd dev = realify(Eigen::VectorXcd(evaluate(f_, z) - l_ * z));
    out += dev * ((drho / r) * realify(z)).transpose();
  }
  return out;
}

double BumpExtension::c1_deviation(std::size_t samples) const {
  std::mt19937_64 rng(0);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(f_.dim());
  double dev = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXcd dir(n);
    for (Eigen::Index i = 0; i < n; ++i) dir(i) = Complex(normal(rng), normal(rng));
    const double radius = eta_ * (static_cast<double>(s) + 0.5) / static_cast<double>(samples);
    const Eigen::VectorXcd z = radius * dir / dir.norm();
    dev = std::max(dev, (apply(z) - l_ * z).norm());
    dev = std::max(dev, op_norm(real_jacobian(z) - l_real_));
  }
  return dev;
}

ExtensionResult extend_with_bump(const GermJet& f, const Eigen::MatrixXcd& l, double eta, double eps,
                                 int max_shrink) {
  if (!(eta > 0.0) || !(eps > 0.0)) raise(ErrorCode::parameter, "eta and eps must be positive");
  if (l.rows() != static_cast<Eigen::Index>(f.dim()) || l.cols() != l.rows())
    raise(ErrorCode::dimension, "linear map does not match the germ");
  if ((f.linear_part() - l).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + l.cwiseAbs().maxCoeff()))
    raise(ErrorCode::precondition, "linear part of the germ differs from L");
  ExtensionResult out;
  for (int shrink = 0; shrink <= max_shrink; ++shrink) {
    auto map = std::make_shared<const BumpExtension>(f, l, eta);
    const double dev = map->c1_deviation();
    if (dev < eps) {
      out.map = std::move(map);
      out.deviation = dev;
      out.eta = eta;
      out.shrinks = shrink;
      return out;
    }
    eta *= 0.5;
  }
  raise(ErrorCode::convergence, "C^1 deviation stays above eps after " + std::to_string(max_shrink) +
                                    " halvings of eta");
}

bool axis_invariant(const GermJet& f, double tol) {
  for (std::size_t i = 1; i < f.dim(); ++i)
    for (const Term& t : f[i].terms())
      if (t.index.last_nonzero() == 0 && std::abs(t.coeff) > tol) return false;
  return true;
}

void SplittingSpec::validate() const {
  if (h + k + l == 0) raise(ErrorCode::dimension, "empty splitting");
  if (!(0.0 < lambda && lambda < lambda_p && lambda_p < 1.0 && 1.0 < mu_p && mu_p < mu))
    raise(ErrorCode::parameter, "rates must satisfy 0 < lambda < lambda' < 1 < mu' < mu");
  if (!(gamma0 > 0.0 && gamma0 < 1.0)) raise(ErrorCode::parameter, "cone aperture must lie in (0, 1)");
  if (!(c_contract > 0.0) || !(c_expand > 0.0)) raise(ErrorCode::parameter, "rate bounds must be positive");
}

double SplittingSpec::epsilon() const { return gamma0 * std::min(lambda_p - lambda, mu - mu_p) / 10.0; }

SplittingSpec spec_from_linear(const Eigen::MatrixXcd& l, std::size_t h, std::size_t k, std::size_t lu,
                               double gamma0) {
  if (static_cast<std::size_t>(l.rows()) != h + k + lu) raise(ErrorCode::dimension, "block sizes do not match L");
  const double ns = k == 0 ? 0.0 : op_norm(realify(block(l, h, k)));
  const double mu_min = lu == 0 ? 2.0 : min_singular(realify(block(l, h + k, lu)));
  if (!(ns < 1.0) || !(mu_min > 1.0))
    raise(ErrorCode::parameter, "stable block norm must be < 1 and unstable conorm > 1");
  SplittingSpec s;
  s.h = h;
  s.k = k;
  s.l = lu;
  s.lambda = (2.0 * ns + 1.0) / 3.0;
  s.lambda_p = (ns + 2.0) / 3.0;
  s.mu_p = (mu_min + 2.0) / 3.0;
  s.mu = (2.0 * mu_min + 1.0) / 3.0;
  s.gamma0 = gamma0;
  s.c_contract = s.lambda;
  s.c_expand = s.mu;
  s.validate();
  return s;
}

double cone_ratio(const Eigen::MatrixXd& frame, std::size_t n, std::size_t first, std::size_t count) {
  if (frame.cols() == 0) return 0.0;
  Eigen::MatrixXd rest(static_cast<Eigen::Index>(2 * (n - count)), frame.cols());
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    if (i >= 2 * first && i < 2 * (first + count)) continue;
    rest.row(row++) = frame.row(static_cast<Eigen::Index>(i));
  }
  if (rest.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rest.transpose() * rest);
  const double a = std::clamp(es.eigenvalues().maxCoeff(), 0.0, 1.0);
  if (a >= 1.0 - 1e-15) return std::numeric_limits<double>::infinity();
  return std::sqrt(a / (1.0 - a));
}

ConeSplitting cone_splitting(const SmoothMap& f, const SplittingSpec& spec, const Eigen::VectorXcd& x,
                             int max_depth, double tol, bool check_cones) {
  spec.validate();
  const std::size_t n = f.dim();
  if (n != spec.dim() || static_cast<std::size_t>(x.size()) != n)
    raise(ErrorCode::dimension, "splitting dimensions do not match the map");
  ConeSplitting out;
  out.x = x;
  out.e_s = Eigen::MatrixXd(static_cast<Eigen::Index>(2 * n), 0);
  out.e_u = out.e_s;

  if (spec.k > 0) {
    const Eigen::MatrixXd model = coordinate_frame(n, spec.h, spec.k);
    std::vector<Eigen::VectorXcd> pts{x};
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lus;
    auto frame_at = [&](int depth) {
      while (static_cast<int>(pts.size()) <= depth) {
        pts.push_back(f.apply(pts.back()));
        if (!finite(pts.back())) raise(ErrorCode::numerical, "forward orbit left the representable range");
      }
      while (static_cast<int>(lus.size()) < depth) lus.emplace_back(f.real_jacobian(pts[lus.size()]));
      Eigen::MatrixXd v = model;
      for (int j = depth - 1; j >= 0; --j) v = orthonormalize(lus[static_cast<std::size_t>(j)].solve(v));
      return v;
    };
    int depth = 1;
    Eigen::MatrixXd v = frame_at(depth);
    for (;;) {
      if (2 * depth > max_depth)
        raise(ErrorCode::convergence, "stable splitting did not converge; last projector distance " +
                                          std::to_string(out.distance_s));
      Eigen::MatrixXd v2 = frame_at(2 * depth);
      out.distance_s = projector_distance(v, v2);
      if (out.distance_s < tol) {
        out.e_s = std::move(v2);
        out.iterations_s = depth;
        break;
      }
      v = std::move(v2);
      depth *= 2;
    }
  }

  if (spec.l > 0) {
    const Eigen::MatrixXd model = coordinate_frame(n, spec.h + spec.k, spec.l);
    std::vector<Eigen::VectorXcd> pts{x};
    std::vector<Eigen::MatrixXd> jacs{Eigen::MatrixXd()};
    auto frame_at = [&](int depth) {
      while (static_cast<int>(pts.size()) <= depth) {
        pts.push_back(f.apply_inverse(pts.back()));
        if (!finite(pts.back())) raise(ErrorCode::numerical, "backward orbit left the representable range");
        jacs.push_back(f.real_jacobian(pts.back()));
      }
      Eigen::MatrixXd v = model;
      for (int j = depth; j >= 1; --j) v = orthonormalize(jacs[static_cast<std::size_t>(j)] * v);
      return v;
    };
    int depth = 1;
    Eigen::MatrixXd v = frame_at(depth);
    for (;;) {
      if (2 * depth > max_depth)
        raise(ErrorCode::convergence, "unstable splitting did not converge; last projector distance " +
                                          std::to_string(out.distance_u));
      Eigen::MatrixXd v2 = frame_at(2 * depth);
      out.distance_u = projector_distance(v, v2);
      if (out.distance_u < tol) {
        out.e_u = std::move(v2);
        out.iterations_u = depth;
        break;
      }
      v = std::move(v2);
      depth *= 2;
    }
  }

  out.cone_ratio_s = cone_ratio(out.e_s, n, spec.h, spec.k);
  out.cone_ratio_u = cone_ratio(out.e_u, n, spec.h + spec.k, spec.l);
  if (check_cones && (out.cone_ratio_s > spec.gamma0 || out.cone_ratio_u > spec.gamma0))
    raise(ErrorCode::aperture_exceeded, "splitting leaves the cone of aperture " + std::to_string(spec.gamma0) +
                                            " (ratios " + std::to_string(out.cone_ratio_s) + ", " +
                                            std::to_string(out.cone_ratio_u) + ")");
  return out;
}

SplittingCertificate certify_splitting(const SmoothMap& f, const SplittingSpec& spec, const ConeSplitting& at_x,
                                       const ConeSplitting& at_fx, double invariance_tol) {
  const Eigen::MatrixXd j = f.real_jacobian(at_x.x);
  SplittingCertificate c;
  auto invariance = [&](const Eigen::MatrixXd& e, const Eigen::MatrixXd& e_next) {
    if (e.cols() == 0) return 0.0;
    const Eigen::MatrixXd image = j * e;
    const Eigen::MatrixXd m = e_next.transpose() * image;
    return (image - e_next * m).norm();
  };
  c.invariance_s = invariance(at_x.e_s, at_fx.e_s);
  c.invariance_u = invariance(at_x.e_u, at_fx.e_u);
  c.contraction = at_x.e_s.cols() == 0 ? 0.0 : op_norm(j * at_x.e_s);
  c.expansion = at_x.e_u.cols() == 0 ? std::numeric_limits<double>::infinity() : min_singular(j * at_x.e_u);
  c.cone_s = at_x.cone_ratio_s;
  c.cone_u = at_x.cone_ratio_u;
  c.rates_ok = c.contraction <= spec.c_contract && c.expansion >= spec.c_expand;
  c.cones_ok = c.cone_s <= spec.gamma0 && c.cone_u <= spec.gamma0;
  c.invariant_ok = std::max(c.invariance_s, c.invariance_u) <= invariance_tol;
  return c;
}

Eigen::MatrixXcd InvolutionHomotopy::at(double s) const {
  const Eigen::Index n = triangular.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  if (s <= 0.5) {
    const double tau = 1.0 - 2.0 * s;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) m(i, j) = std::pow(tau, static_cast<double>(j - i)) * triangular(i, j);
  } else {
    const double t = 2.0 * s - 1.0;
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = (1.0 - t) * triangular(i, i) + t * diagonal_target(i, i);
  }
  return unitary * m * unitary.adjoint();
}

InvolutionHomotopy involution_homotopy(const Eigen::MatrixXcd& lp, int n_samples, double det_tol,
                                       double axis_tol) {
  const Eigen::Index n = lp.rows();
  if (n == 0 || lp.cols() != n) raise(ErrorCode::dimension, "involution homotopy needs a square matrix");
  if (n_samples < 2) raise(ErrorCode::parameter, "need at least two homotopy samples");
  InvolutionHomotopy h;
  bool upper = true;
  for (Eigen::Index i = 0; i < n && upper; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (lp(i, j) != Complex(0.0)) {
        upper = false;
        break;
      }
  if (upper) {
    h.unitary = Eigen::MatrixXcd::Identity(n, n);
    h.triangular = lp;
  } else {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(lp);
    h.unitary = schur.matrixU();
    h.triangular = schur.matrixT();
  }
  h.diagonal_target = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = h.triangular(i, i);
    h.diagonal_target(i, i) = (std::abs(d.imag()) <= axis_tol && d.real() < 0.0) ? -1.0 : 1.0;
  }
  h.a = upper ? h.diagonal_target : Eigen::MatrixXcd(h.unitary * h.diagonal_target * h.unitary.adjoint());

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lp);
  const double scale = std::pow(svd.singularValues()(0), static_cast<double>(n));
  h.min_abs_det = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_samples; ++j) {
    const double s = static_cast<double>(j) / static_cast<double>(n_samples - 1);
    const double t = s <= 0.5 ? 0.0 : 2.0 * s - 1.0;
    double det = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      det *= std::abs((1.0 - t) * h.triangular(i, i) + t * h.diagonal_target(i, i));
    h.samples.push_back(s);
    h.abs_det.push_back(det);
    h.min_abs_det = std::min(h.min_abs_det, det);
  }
  if (!(h.min_abs_det > det_tol * scale))
    raise(ErrorCode::homotopy_degenerated, "homotopy to an involution passes near a singular matrix (min |det| " +
                                               std::to_string(h.min_abs_det) + ")");
  return h;
}

TrivializedBundleMap inverse_bundle_map(const TrivializedBundleMap& m) {
  TrivializedBundleMap inv = m;
  inv.base_map = m.base_inverse;
  inv.base_inverse = m.base_map;
  inv.fiber_matrix = [m](const Eigen::VectorXcd& x) -> Eigen::MatrixXd {
    return m.fiber_matrix(m.base_inverse(x)).inverse();
  };
  return inv;
}

double fiber_norm(const TrivializedBundleMap& m, const Eigen::VectorXcd& x, const Eigen::VectorXd& v) {
  if (!m.frame) return v.norm();
  return (m.frame(x) * v).norm();
}

namespace {

Eigen::MatrixXd frame_or_identity(const TrivializedBundleMap& m, const Eigen::VectorXcd& x) {
  if (m.frame) return m.frame(x);
  return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m.fiber_dim), static_cast<Eigen::Index>(m.fiber_dim));
}

// sup |phi_x v| / |v| with ambient norms over x and F(x).
double fiber_contraction(const TrivializedBundleMap& m, const Eigen::VectorXcd& x) {
  const Eigen::MatrixXd gx = frame_or_identity(m, x);
  const Eigen::MatrixXd gfx = frame_or_identity(m, m.base_map(x));
  const Eigen::MatrixXd phi = m.fiber_matrix(x);
  Eigen::HouseholderQR<Eigen::MatrixXd> qx(gx);
  const auto r = static_cast<Eigen::Index>(m.fiber_dim);
  const Eigen::MatrixXd rx = qx.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd mapped = gfx * phi * rx.inverse();
  return op_norm(mapped);
}

}  // namespace

FiberConjugacy::FiberConjugacy(TrivializedBundleMap alpha, TrivializedBundleMap beta, BaseMap gamma0,
                               Eigen::MatrixXcd l0, std::span<const Eigen::VectorXcd> sample_bases,
                               FiberConjugacyOptions opts)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), gamma0_(std::move(gamma0)), opts_(opts) {
  const auto r = static_cast<std::size_t>(2 * l0.rows());
  if (alpha_.fiber_dim != r || beta_.fiber_dim != r) raise(ErrorCode::dimension, "fiber dimension mismatch");
  if (sample_bases.empty()) raise(ErrorCode::parameter, "need at least one sample base point");
  l0_ = realify(l0);
  homotopy_ = involution_homotopy(l0, opts_.homotopy_samples);

  for (const auto& x : sample_bases) {
    sup_alpha_ = std::max(sup_alpha_, fiber_contraction(alpha_, x));
    sup_beta_ = std::max(sup_beta_, fiber_contraction(beta_, gamma0_(x)));
  }
  if (!(sup_alpha_ < 1.0) || !(sup_beta_ < 1.0))
    raise(ErrorCode::precondition, "fiber maps are not uniformly contracting (sup " +
                                       std::to_string(std::max(sup_alpha_, sup_beta_)) + ")");
  delta_ = 0.5 * (1.0 - std::max(sup_alpha_, sup_beta_));

  const double l0_norm = op_norm(l0_);
  const double c = 2.0 * (1.0 + l0_norm);
  gamma_ = opts_.gamma;
  segment_min_sv_ = std::numeric_limits<double>::infinity();
  for (const auto& x0 : sample_bases) {
    for (const TrivializedBundleMap* m : {&alpha_, &beta_}) {
      const Eigen::VectorXcd x = m == &alpha_ ? x0 : gamma0_(x0);
      const Eigen::MatrixXd frame = frame_or_identity(*m, x);
      if (m->inclusion.size() != 0) gamma_ = std::max(gamma_, op_norm(frame - m->inclusion));
      const Eigen::MatrixXd phi_hat = m->fiber_matrix(m->base_inverse(x));
      gamma_ = std::max(gamma_, op_norm(frame * (phi_hat - l0_)) / c);
      for (int j = 0; j <= 10; ++j) {
        const double u = j / 10.0;
        segment_min_sv_ = std::min(segment_min_sv_, min_singular((1.0 - u) * l0_ + u * phi_hat));
      }
    }
  }
  const double margin = min_singular(l0_) - gamma_ * l0_norm - c * gamma_;
  if (!(margin > 0.0))
    raise(ErrorCode::parameter, "gamma " + std::to_string(gamma_) + " too large for L0 (margin " +
                                    std::to_string(margin) + ")");
  if (!(segment_min_sv_ > 1e-12))
    raise(ErrorCode::homotopy_degenerated, "segment from L0 to the fiber map is singular");
}

Eigen::MatrixXd FiberConjugacy::path_matrix(const TrivializedBundleMap& m, const Eigen::VectorXcd& x,
                                            double s) const {
  if (s <= 0.5) return realify(homotopy_.at(1.0 - 2.0 * s));
  const double u = 2.0 * s - 1.0;
  return (1.0 - u) * l0_ + u * m.fiber_matrix(m.base_inverse(x));
}

Eigen::VectorXd FiberConjugacy::chi(const TrivializedBundleMap& m, const Eigen::VectorXcd& x,
                                    const ShellCoords& c) const {
  if (c.t <= 0.5) {
    const Eigen::VectorXd y = path_matrix(m, x, 2.0 * c.t) * c.v;
    return (1.0 - 2.0 * c.t * delta_) / fiber_norm(m, x, y) * y;
  }
  const Eigen::VectorXcd xp = m.base_inverse(x);
  const Eigen::VectorXd p = c.v / fiber_norm(m, xp, c.v);
  const Eigen::VectorXd q = m.fiber_matrix(xp) * p;
  const double s = (2.0 * c.t - 1.0) + (2.0 - 2.0 * c.t) * (1.0 - delta_) / fiber_norm(m, x, q);
  return s * q;
}

FiberConjugacy::ShellCoords FiberConjugacy::chi_inverse(const TrivializedBundleMap& m, const Eigen::VectorXcd& x,
                                                        const Eigen::VectorXd& w) const {
  ShellCoords c;
  const double nrm = fiber_norm(m, x, w);
  if (nrm >= 1.0 - delta_) {
    c.t = std::clamp((1.0 - nrm) / (2.0 * delta_), 0.0, 0.5);
    const Eigen::VectorXd v = path_matrix(m, x, 2.0 * c.t).partialPivLu().solve(w);
    c.v = v / v.norm();
    return c;
  }
  const Eigen::VectorXcd xp = m.base_inverse(x);
  const Eigen::MatrixXd phi = m.fiber_matrix(xp);
  const Eigen::VectorXd wp = phi.partialPivLu().solve(w);
  c.v = wp / wp.norm();
  const double a = fiber_norm(m, x, phi * c.v) / fiber_norm(m, xp, c.v);
  c.t = std::clamp(0.5 + ((1.0 - delta_) - nrm) / (2.0 * ((1.0 - delta_) - a)), 0.5, 1.0);
  return c;
}

FiberConjugacy::ShellCoords FiberConjugacy::chi_inverse_alpha(const Eigen::VectorXcd& x,
                                                              const Eigen::VectorXd& w) const {
  return chi_inverse(alpha_, x, w);
}

Eigen::VectorXd FiberConjugacy::chi_beta(const Eigen::VectorXcd& x, const ShellCoords& c) const {
  return chi(beta_, x, c);
}

Eigen::VectorXd FiberConjugacy::shell_map(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const {
  return chi(beta_, gamma0_(x), chi_inverse(alpha_, x, v));
}

Eigen::VectorXd FiberConjugacy::operator()(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const {
  if (static_cast<std::size_t>(v.size()) != alpha_.fiber_dim) raise(ErrorCode::dimension, "fiber vector size");
  if (v.norm() == 0.0) return Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXcd cx = x;
  Eigen::VectorXd cw = v;
  int m = 0;
  if (fiber_norm(alpha_, cx, cw) > 1.0) {
    while (fiber_norm(alpha_, cx, cw) > 1.0) {
      cw = alpha_.fiber_matrix(cx) * cw;
      cx = alpha_.base_map(cx);
      if (++m > opts_.max_orbit) raise(ErrorCode::numerical, "orbit did not reach the fundamental shell");
    }
  } else {
    for (;;) {
      const Eigen::VectorXcd xp = alpha_.base_inverse(cx);
      const Eigen::VectorXd wp = alpha_.fiber_matrix(xp).partialPivLu().solve(cw);
      if (fiber_norm(alpha_, xp, wp) >= 1.0) break;
      cx = xp;
      cw = wp;
      if (--m < -opts_.max_orbit) raise(ErrorCode::numerical, "orbit did not reach the fundamental shell");
    }
  }
  Eigen::VectorXcd y = gamma0_(cx);
  Eigen::VectorXd u = chi(beta_, y, chi_inverse(alpha_, cx, cw));
  for (; m > 0; --m) {
    const Eigen::VectorXcd yp = beta_.base_inverse(y);
    u = beta_.fiber_matrix(yp).partialPivLu().solve(u);
    y = yp;
  }
  for (; m < 0; ++m) {
    u = beta_.fiber_matrix(y) * u;
    y = beta_.base_map(y);
  }
  return u;
}

double conjugacy_check(const FiberConjugacy& h, const TrivializedBundleMap& alpha,
                       const TrivializedBundleMap& beta, const BaseMap& gamma0,
                       std::span<const FiberSample> samples) {
  double sup = 0.0;
  for (const auto& s : samples) {
    const Eigen::VectorXcd fx = alpha.base_map(s.x);
    const Eigen::VectorXd lhs = h(fx, alpha.fiber_matrix(s.x) * s.v);
    const Eigen::VectorXd rhs = beta.fiber_matrix(gamma0(s.x)) * h(s.x, s.v);
    sup = std::max(sup, fiber_norm(beta, gamma0(fx), lhs - rhs));
  }
  return sup;
}

AxisBundles::AxisBundles(std::shared_ptr<const SmoothMap> f, SplittingSpec spec)
    : f_(std::move(f)), spec_(spec) {
  spec_.validate();
  if (spec_.h != 1) raise(ErrorCode::dimension, "axis bundles need a one-dimensional center");
  if (f_->dim() != spec_.dim()) raise(ErrorCode::dimension, "splitting dimensions do not match the map");
}

const ConeSplitting& AxisBundles::splitting(const Eigen::VectorXcd& x1) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::pair<double, double> key{x1(0).real(), x1(0).imag()};
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_->dim()));
  z(0) = x1(0);
  return cache_.emplace(key, cone_splitting(*f_, spec_, z)).first->second;
}

std::size_t AxisBundles::cache_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

Eigen::MatrixXd AxisBundles::stable_frame(const Eigen::VectorXcd& x1) const {
  const Eigen::MatrixXd& q = splitting(x1).e_s;
  const Eigen::MatrixXd p = coordinate_frame(f_->dim(), spec_.h, spec_.k).transpose();
  return q * (p * q).inverse();
}

Eigen::MatrixXd AxisBundles::unstable_frame(const Eigen::VectorXcd& x1) const {
  const Eigen::MatrixXd& q = splitting(x1).e_u;
  const Eigen::MatrixXd p = coordinate_frame(f_->dim(), spec_.h + spec_.k, spec_.l).transpose();
  return q * (p * q).inverse();
}

Eigen::MatrixXd AxisBundles::stable_matrix(const Eigen::VectorXcd& x1) const {
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_->dim()));
  z(0) = x1(0);
  const Eigen::MatrixXd p = coordinate_frame(f_->dim(), spec_.h, spec_.k).transpose();
  return p * f_->real_jacobian(z) * stable_frame(x1);
}

Eigen::MatrixXd AxisBundles::unstable_matrix(const Eigen::VectorXcd& x1) const {
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_->dim()));
  z(0) = x1(0);
  const Eigen::MatrixXd p = coordinate_frame(f_->dim(), spec_.h + spec_.k, spec_.l).transpose();
  return p * f_->real_jacobian(z) * unstable_frame(x1);
}

Eigen::VectorXcd AxisBundles::base_map(const Eigen::VectorXcd& x1) const {
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_->dim()));
  z(0) = x1(0);
  return f_->apply(z).head(1);
}

Eigen::VectorXcd AxisBundles::base_inverse(const Eigen::VectorXcd& x1) const {
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_->dim()));
  z(0) = x1(0);
  return f_->apply_inverse(z).head(1);
}

namespace {

// Axis dynamics of f in the first coordinate, the linear part elsewhere.
GermJet decoupled_model(const GermJet& f) {
  const std::size_t n = f.dim();
  const int d = f.trunc_degree();
  const Eigen::MatrixXcd l = f.linear_part();
  std::vector<PolyJet> comps;
  PolyJet first(n, d);
  for (const Term& t : f[0].terms())
    if (t.index.last_nonzero() == 0) first.set(t.index, t.coeff);
  comps.push_back(std::move(first));
  for (std::size_t i = 1; i < n; ++i) {
    PolyJet c(n, d);
    for (std::size_t j = 1; j < n; ++j)
      c.set(MultiIndex::unit(n, j), l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    comps.push_back(std::move(c));
  }
  return GermJet(std::move(comps));
}

TrivializedBundleMap stable_bundle(std::shared_ptr<const AxisBundles> b) {
  const std::size_t n = b->map().dim();
  const SplittingSpec& s = b->spec();
  TrivializedBundleMap m;
  m.fiber_dim = 2 * s.k;
  m.base_map = [b](const Eigen::VectorXcd& x) { return b->base_map(x); };
  m.base_inverse = [b](const Eigen::VectorXcd& x) { return b->base_inverse(x); };
  m.fiber_matrix = [b](const Eigen::VectorXcd& x) { return b->stable_matrix(x); };
  m.frame = [b](const Eigen::VectorXcd& x) { return b->stable_frame(x); };
  m.inclusion = coordinate_frame(n, s.h, s.k);
  return m;
}

// Unstable bundle over the total space of the stable bundle, base (x, v).
TrivializedBundleMap unstable_bundle(std::shared_ptr<const AxisBundles> b) {
  const std::size_t n = b->map().dim();
  const SplittingSpec& s = b->spec();
  TrivializedBundleMap m;
  m.fiber_dim = 2 * s.l;
  const auto k = static_cast<Eigen::Index>(s.k);
  m.base_map = [b, k](const Eigen::VectorXcd& xv) {
    Eigen::VectorXcd out(xv.size());
    const Eigen::VectorXcd x = xv.head(1);
    out.head(1) = b->base_map(x);
    if (k > 0) out.tail(k) = complexify(Eigen::VectorXd(b->stable_matrix(x) * realify(Eigen::VectorXcd(xv.tail(k)))));
    return out;
  };
  m.base_inverse = [b, k](const Eigen::VectorXcd& xv) {
    Eigen::VectorXcd out(xv.size());
    const Eigen::VectorXcd xp = b->base_inverse(xv.head(1));
    out.head(1) = xp;
    if (k > 0)
      out.tail(k) = complexify(
          Eigen::VectorXd(b->stable_matrix(xp).partialPivLu().solve(realify(Eigen::VectorXcd(xv.tail(k))))));
    return out;
  };
  m.fiber_matrix = [b](const Eigen::VectorXcd& xv) { return b->unstable_matrix(xv.head(1)); };
  m.frame = [b](const Eigen::VectorXcd& xv) { return b->unstable_frame(xv.head(1)); };
  m.inclusion = coordinate_frame(n, s.h + s.k, s.l);
  return m;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index size) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> expo(-1.0, 1.0);
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = normal(rng);
  return std::pow(10.0, expo(rng)) * v / v.norm();
}

}  // namespace

TangentConjugacyReport verify_tangent_conjugacy(const GermJet& f, const SplittingSpec& spec, double eta,
                                                std::size_t n_samples, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = f.dim();
  if (spec.h != 1 || spec.dim() != n) raise(ErrorCode::dimension, "tangent conjugacy needs h = 1 and h+k+l = n");
  if (!axis_invariant(f)) raise(ErrorCode::precondition, "z_1-axis is not invariant; straighten the germ first");
  if (n_samples == 0) raise(ErrorCode::parameter, "need at least one sample");
  const Eigen::MatrixXcd l = f.linear_part();

  TangentConjugacyReport rep;
  const ExtensionResult ext = extend_with_bump(f, l, eta, spec.epsilon());
  rep.eta = ext.eta;
  rep.deviation = ext.deviation;
  auto fb = std::make_shared<const BumpExtension>(decoupled_model(f), l, ext.eta);
  auto ba = std::make_shared<const AxisBundles>(ext.map, spec);
  auto bb = std::make_shared<const AxisBundles>(fb, spec);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n_base = std::min<std::size_t>(40, n_samples);
  std::vector<Eigen::VectorXcd> bases;
  for (std::size_t i = 0; i < n_base; ++i) {
    const double r = ext.eta * (0.05 + 0.9 * unit(rng));
    const double th = 2.0 * std::acos(-1.0) * unit(rng);
    bases.push_back(Eigen::VectorXcd::Constant(1, std::polar(r, th)));
  }
  const BaseMap id = [](const Eigen::VectorXcd& x) { return x; };
  const auto k = static_cast<Eigen::Index>(spec.k);
  const auto lu = static_cast<Eigen::Index>(spec.l);

  std::unique_ptr<FiberConjugacy> hs;
  TrivializedBundleMap sa, sb;
  if (spec.k > 0) {
    sa = stable_bundle(ba);
    sb = stable_bundle(bb);
    hs = std::make_unique<FiberConjugacy>(sa, sb, id, block(l, 1, spec.k), bases);
    rep.delta_s = hs->delta();
    rep.gamma_s = hs->gamma();
  }
  auto hs_eval = [&](const Eigen::VectorXcd& x, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return hs ? (*hs)(x, v) : v;
  };

  std::unique_ptr<FiberConjugacy> hu;
  TrivializedBundleMap ua, ub;
  BaseMap gamma_hat;
  if (spec.l > 0) {
    ua = inverse_bundle_map(unstable_bundle(ba));
    ub = inverse_bundle_map(unstable_bundle(bb));
    gamma_hat = [&hs_eval, k](const Eigen::VectorXcd& xv) {
      Eigen::VectorXcd out = xv;
      if (k > 0) out.tail(k) = complexify(hs_eval(xv.head(1), realify(Eigen::VectorXcd(xv.tail(k)))));
      return out;
    };
    std::vector<Eigen::VectorXcd> hat_bases;
    for (const auto& x : bases) {
      Eigen::VectorXcd xv = Eigen::VectorXcd::Zero(1 + k);
      xv(0) = x(0);
      hat_bases.push_back(xv);
    }
    const Eigen::MatrixXcd lu_block = block(l, 1 + spec.k, spec.l);
    hu = std::make_unique<FiberConjugacy>(ua, ub, gamma_hat, Eigen::MatrixXcd(lu_block.inverse()), hat_bases);
    rep.delta_u = hu->delta();
    rep.gamma_u = hu->gamma();
  }

  rep.rows.resize(n_base);
  for (std::size_t i = 0; i < n_base; ++i) rep.rows[i].x = bases[i](0);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const std::size_t bi = s % n_base;
    const Eigen::VectorXcd& x = bases[bi];
    const Eigen::VectorXcd fx = ba->base_map(x);
    double res = 0.0;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * k);
    if (k > 0) {
      v = random_vector(rng, 2 * k);
      const Eigen::VectorXd lhs = (*hs)(fx, sa.fiber_matrix(x) * v);
      const Eigen::VectorXd rhs = sb.fiber_matrix(x) * (*hs)(x, v);
      const double r = fiber_norm(sb, fx, lhs - rhs);
      rep.residual_stable = std::max(rep.residual_stable, r);
      res = std::max(res, r);
    }
    if (lu > 0) {
      Eigen::VectorXcd xv(1 + k);
      xv(0) = x(0);
      if (k > 0) xv.tail(k) = complexify(v);
      const Eigen::VectorXd w = random_vector(rng, 2 * lu);
      // Forward unstable maps are the inverses of the bundle maps used to build H_u.
      const Eigen::VectorXcd fxv = ua.base_inverse(xv);
      const Eigen::MatrixXd phi_a = ba->unstable_matrix(x);
      const Eigen::MatrixXd phi_b = bb->unstable_matrix(x);
      const Eigen::VectorXd lhs = (*hu)(fxv, phi_a * w);
      const Eigen::VectorXd rhs = phi_b * (*hu)(xv, w);
      const double r = fiber_norm(ub, gamma_hat(fxv), lhs - rhs);
      rep.residual_unstable = std::max(rep.residual_unstable, r);
      res = std::max(res, r);
    }
    rep.rows[bi].residual = std::max(rep.rows[bi].residual, res);
    rep.residual = std::max(rep.residual, res);
  }
  rep.samples = n_samples;
  return rep;
}

}  // namespace semihyp
