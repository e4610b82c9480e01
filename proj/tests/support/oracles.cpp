#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace semihyp::testing {

namespace {

int degree(const std::vector<int>& e) { return std::accumulate(e.begin(), e.end(), 0); }

}  // namespace

Dense to_dense(const PolyJet& p) {
  Dense d;
  for (const auto& t : p.terms()) d[t.index.to_vector()] += t.coeff;
  return d;
}

PolyJet from_dense(const Dense& d, std::size_t n, int trunc) {
  PolyJet p(n, trunc);
  for (const auto& [e, c] : d)
    if (degree(e) <= trunc) p.add(MultiIndex(std::span<const int>(e)), c);
  return p;
}

Dense naive_mul(const Dense& a, const Dense& b, int trunc) {
  Dense r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      if (degree(e) <= trunc) r[e] += ca * cb;
    }
  return r;
}

Dense naive_compose(const Dense& outer, const std::vector<Dense>& inner, int trunc) {
  const std::size_t m = inner.size();
  const std::size_t n = inner.empty() ? 0 : (inner[0].empty() ? 0 : inner[0].begin()->first.size());
  Dense one;
  one[std::vector<int>(n, 0)] = 1.0;
  Dense r;
  for (const auto& [e, c] : outer) {
    Dense term = one;
    for (std::size_t v = 0; v < m; ++v)
      for (int k = 0; k < e[v]; ++k) term = naive_mul(term, inner[v], trunc);
    for (const auto& [te, tc] : term) r[te] += c * tc;
  }
  return r;
}

PolyJet oracle_mul(const PolyJet& a, const PolyJet& b) {
  const int trunc = std::min(a.trunc_degree(), b.trunc_degree());
  return from_dense(naive_mul(to_dense(a), to_dense(b), trunc), a.n_vars(), trunc);
}

PolyJet oracle_compose(const PolyJet& outer, const GermJet& inner) {
  std::vector<Dense> in;
  for (std::size_t i = 0; i < inner.dim(); ++i) {
    Dense d = to_dense(inner[i]);
    if (d.empty()) d[std::vector<int>(inner.dim(), 0)] = 0.0;
    in.push_back(std::move(d));
  }
  const int trunc = std::min(outer.trunc_degree(), inner.trunc_degree());
  return from_dense(naive_compose(to_dense(outer), in, trunc), inner.dim(), trunc);
}

GermJet oracle_compose(const GermJet& outer, const GermJet& inner) {
  std::vector<PolyJet> c;
  for (std::size_t i = 0; i < outer.dim(); ++i) c.push_back(oracle_compose(outer[i], inner));
  return GermJet(std::move(c));
}

double distance_to_identity(const GermJet& g) {
  return max_abs_difference(g, GermJet::identity(g.dim(), g.trunc_degree()));
}

Complex primitive_root(int h, int q) { return std::polar(1.0, 2.0 * std::numbers::pi * h / q); }

GermJet random_germ_with_linear(const Eigen::MatrixXcd& a, int N, double density, std::mt19937_64& rng,
                                double coeff_scale) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  GermJet g = GermJet::linear(a, N);
  for (std::size_t i = 0; i < n; ++i) {
    PolyJet p = g[i];
    for (int d = 2; d <= N; ++d)
      for (const auto& m : monomials_of_degree(n, d))
        if (coin(rng) < density) p.set(m, coeff_scale * Complex(u(rng), u(rng)));
    g.set_component(i, p);
  }
  return g;
}

GermJet random_semi_hyperbolic(const RandomGermOptions& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> hs;
    for (int h = 1; h <= o.q; ++h)
      if (std::gcd(h, o.q) == 1) hs.push_back(h);
    const int h = hs[static_cast<std::size_t>(u(rng) * hs.size()) % hs.size()];
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(o.n), static_cast<Eigen::Index>(o.n));
    a(0, 0) = primitive_root(h, o.q);
    for (std::size_t i = 1; i < o.n; ++i) {
      const double mod = u(rng) < 0.5 ? 0.3 + 0.4 * u(rng) : 1.5 + u(rng);
      a(i, i) = std::polar(mod, 2.0 * std::numbers::pi * u(rng));
    }
    if (o.jordan_block && o.n >= 3) {
      a(2, 2) = a(1, 1);
      a(1, 2) = 1.0;
    }
    GermJet g = random_germ_with_linear(a, o.N, o.density, rng, o.coeff_scale);
    const SpectralData s = spectral(g);
    if (!check_quasi_absence(s, o.N, 1e-6).quasi_absent) continue;
    double gap = 1.0;
    for (int d = 2; d <= o.N; ++d)
      for (const auto& m : monomials_of_degree(o.n, d))
        if (m[0] != d) gap = std::min(gap, std::abs(small_denominator(s, m).value));
    if (gap >= 0.05) return g;
  }
  throw std::runtime_error("no quasi-absent germ drawn");
}

SpectralData spectral(const GermJet& f, int q_max) {
  SpectralOptions o;
  o.q_max = q_max;
  return analyze_linear_part(f.linear_part(), o);
}

}  // namespace semihyp::testing
