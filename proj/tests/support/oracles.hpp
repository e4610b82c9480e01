#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "semihyp/germ_jet.hpp"
#include "semihyp/spectrum.hpp"

namespace semihyp::testing {

/// Dense coefficient table keyed by exponent vector; no pruning, no ranking.
using Dense = std::map<std::vector<int>, Complex>;

Dense to_dense(const PolyJet& p);
PolyJet from_dense(const Dense& d, std::size_t n, int trunc);

/// Brute-force O(terms^2) convolution truncated at `trunc`.
Dense naive_mul(const Dense& a, const Dense& b, int trunc);
/// Monomial-by-monomial substitution outer(inner) using naive_mul only.
Dense naive_compose(const Dense& outer, const std::vector<Dense>& inner, int trunc);

PolyJet oracle_mul(const PolyJet& a, const PolyJet& b);
PolyJet oracle_compose(const PolyJet& outer, const GermJet& inner);
GermJet oracle_compose(const GermJet& outer, const GermJet& inner);

/// Largest |c| over the nonlinear coefficients of g - id.
double distance_to_identity(const GermJet& g);

Complex primitive_root(int h, int q);

struct RandomGermOptions {
  std::size_t n = 2;
  int N = 6;
  int q = 1;
  double density = 0.5;
  double coeff_scale = 1.0;
  /// Linear part diagonal; eigenvalue moduli in [0.3, 0.7] or [1.5, 2.5].
  bool jordan_block = false;
};

/// Random diagonal-linear-part semi-hyperbolic germ passing quasi-absence at
/// degree N.
GermJet random_semi_hyperbolic(const RandomGermOptions& o, std::mt19937_64& rng);

/// Random jet with the given linear part and random terms of degree 2..N.
GermJet random_germ_with_linear(const Eigen::MatrixXcd& a, int N, double density, std::mt19937_64& rng,
                                double coeff_scale = 1.0);

SpectralData spectral(const GermJet& f, int q_max = 64);

}  // namespace semihyp::testing
