#include "semihyp/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "semihyp/error.hpp"

namespace semihyp {
namespace {

bool is_diagonal(const Eigen::MatrixXcd& a) {
  for (Eigen::Index i = 0; i + 1 < a.rows(); ++i) {
    if (a(i, i + 1) != Complex(0.0)) return false;
  }
  return true;
}

// Conjugator step z -> (z_1 + xi(z), z_2, ..., z_n).
GermJet first_coordinate_step(std::size_t n, int trunc, const PolyJet& xi) {
  GermJet h = GermJet::identity(n, trunc);
  h.set_component(0, h[0] + xi);
  return h;
}

}  // namespace

NormalizationResult normalize_first_coordinate(const GermJet& f, const SpectralData& s) {
  const std::size_t n = f.dim();
  const int trunc = f.trunc_degree();
  if (n != s.dim()) raise(ErrorCode::dimension, "spectral data does not match germ dimension");
  const Eigen::MatrixXcd a = f.linear_part();
  if ((a - s.linear_part).cwiseAbs().maxCoeff() > 1e-12) {
    raise(ErrorCode::precondition, "germ linear part differs from the analysed matrix");
  }
  const Complex l1 = s.lambda1();
  const bool diagonal = is_diagonal(a);
  const GermJet lin = GermJet::linear(a, trunc);

  GermJet conj = GermJet::identity(n, trunc);
  for (int d = 2; d <= trunc; ++d) {
    const GermJet hd = conj.truncated(d);
    const GermJet inner = compose(f.truncated(d), invert(hd));
    const PolyJet g1 = compose(hd[0], inner.components());

    auto monos = monomials_of_degree(n, d);
    std::reverse(monos.begin(), monos.end());  // decreasing lex
    const auto ranking = ranking_for(n, d);
    const std::size_t base = ranking->count_up_to(d - 1);
    std::vector<Complex> acc(ranking->size() - base, 0.0);

    PolyJet xi(n, trunc);
    for (const auto& p : monos) {
      const Complex phi = g1.coeff(p);
      const Complex rhs = phi + acc[ranking->rank(p) - base];
      Complex x = 0.0;
      if (p[0] == d) {
        if ((d - 1) % s.q != 0) x = rhs / (l1 - std::pow(l1, d));
      } else {
        const auto sd = small_denominator(s, p);
        if (sd.near_resonant) {
          raise(ErrorCode::resonance_obstruction,
                "small denominator at exponent " + p.to_string());
        }
        x = rhs / sd.value;
      }
      if (x == Complex(0.0)) continue;
      xi.set(p, x);
      if (diagonal) continue;
      // Lex-smaller terms of (Az)^P feed the coefficients still to be solved.
      const PolyJet expansion = compose(PolyJet::monomial(n, d, p, 1.0), lin.truncated(d).components());
      for (const auto& t : expansion.terms()) {
        if (t.index == p) continue;
        acc[ranking->rank(t.index) - base] += x * t.coeff;
      }
    }
    if (xi.empty()) continue;
    conj = compose(first_coordinate_step(n, trunc, xi), conj);
  }
  return {conjugate(conj, f), conj};
}

Classification classify(const GermJet& normalized, const SpectralData& s, double tol,
                        std::optional<GermJet> conjugator) {
  Classification c{CaseTag::linearizable_i, s.q, 0, 0.0,
                   conjugator ? *conjugator : GermJet::identity(normalized.dim(), normalized.trunc_degree()),
                   normalized};
  const std::size_t n = normalized.dim();
  for (int k = 1; k * s.q + 1 <= normalized.trunc_degree(); ++k) {
    const Complex a = normalized[0].coeff(MultiIndex::pure_power(n, 0, k * s.q + 1));
    if (std::abs(a) >= tol) {
      c.case_tag = CaseTag::parabolic_ii;
      c.k = k;
      c.a_k = a;
      break;
    }
  }
  return c;
}

bool axis_generic(const GermJet& f, int q, double tol) {
  const GermJet fq = iterate(f, q);
  for (std::size_t j = 1; j < f.dim(); ++j) {
    bool nonzero = false;
    for (const auto& t : fq[j].terms()) {
      if (t.index[0] == t.index.degree() && std::abs(t.coeff) >= tol) {
        nonzero = true;
        break;
      }
    }
    if (!nonzero) return false;
  }
  return true;
}

ShearResult quadratic_shear(const GermJet& f, const SpectralData& s, std::uint64_t seed,
                            int max_retries, double radius) {
  const std::size_t n = f.dim();
  const int trunc = f.trunc_degree();
  if (n == 1 || trunc < 2 || axis_generic(f, s.q, s.tol)) {
    return {f, GermJet::identity(n, trunc), std::vector<Complex>(n, 0.0)};
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<Complex> eps(n, 0.0);
    std::vector<PolyJet> comps;
    comps.push_back(PolyJet::variable(n, trunc, 0));
    for (std::size_t j = 1; j < n; ++j) {
      const double r = radius * std::sqrt(unit(rng));
      const double th = 2.0 * std::numbers::pi * unit(rng);
      eps[j] = std::polar(r, th);
      PolyJet c = PolyJet::variable(n, trunc, j);
      c.set(MultiIndex::pure_power(n, 0, 2), eps[j]);
      comps.push_back(std::move(c));
    }
    GermJet h(std::move(comps));
    GermJet g = conjugate(h, f);
    if (axis_generic(g, s.q, s.tol)) return {std::move(g), std::move(h), std::move(eps)};
  }
  raise(ErrorCode::degenerate_axis,
        "no quadratic shear made the axis generic after " + std::to_string(max_retries) + " draws");
}

GermJet averaging_linearizer(const GermJet& f, const SpectralData& s, double tol) {
  const std::size_t n = f.dim();
  const int trunc = f.trunc_degree();
  if (s.q < 2) raise(ErrorCode::precondition, "averaging needs q > 1");
  const GermJet fq = iterate(f, s.q);
  // Roundoff in degree-d terms grows like |lambda|^(d(q-1)) under iteration.
  double growth = 1.0;
  for (const Complex& l : s.eigenvalues) growth = std::max(growth, std::abs(l));
  growth = std::pow(growth, static_cast<double>(trunc) * (s.q - 1));
  if (max_abs_difference(fq[0], PolyJet::variable(n, trunc, 0)) > tol * growth) {
    raise(ErrorCode::precondition, "(f^q)_1 differs from z_1");
  }
  const Complex l1 = s.lambda1();
  std::vector<PolyJet> sum;
  for (std::size_t i = 0; i < n; ++i) sum.emplace_back(n, trunc);
  GermJet fj = GermJet::identity(n, trunc);
  Complex scale = 1.0;
  for (int j = 0; j < s.q; ++j) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += fj[i] * scale;
    fj = compose(f, fj);
    scale /= l1;
  }
  GermJet h(std::move(sum));
  for (std::size_t i = 0; i < n; ++i) {
    Complex eta = 0.0;
    Complex ratio = 1.0;
    for (int j = 0; j < s.q; ++j) {
      eta += ratio;
      ratio *= s.eigenvalues[i] / l1;
    }
    if (std::abs(eta) <= tol) {
      raise(ErrorCode::averaging_degenerate, "eta_" + std::to_string(i + 1) + " vanishes");
    }
  }
  return h;
}

GermJet first_axis_scaling(std::size_t n, int trunc_degree, Complex c) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  d(0, 0) = c;
  return GermJet::linear(d, trunc_degree);
}

Complex camacho_scale(const Classification& c, Complex lambda1) {
  const int m = c.k * c.q;
  return std::pow(c.a_k / lambda1, 1.0 / m);
}

GermJet camacho_rescale(const Classification& c, double tol) {
  if (c.case_tag != CaseTag::parabolic_ii || c.k < 1) raise(ErrorCode::precondition, "rescaling needs case ii");
  if (std::abs(c.a_k) < tol) raise(ErrorCode::precondition, "leading coefficient a_k vanishes");
  const Complex l1 = c.normalized.linear_part()(0, 0);
  const Complex scale = camacho_scale(c, l1);
  const GermJet d = first_axis_scaling(c.normalized.dim(), c.normalized.trunc_degree(), scale);
  return conjugate(d, c.normalized);
}

}  // namespace semihyp
