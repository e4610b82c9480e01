#pragma once

#include <Eigen/Dense>
#include <vector>

#include "semihyp/poly_jet.hpp"

namespace semihyp {

struct SpectralOptions {
  int q_max = 64;
  double tol = 1e-9;
  /// Minimal distance of |lambda_i| (i >= 2) from 0 and from 1.
  double moduli_margin = 1e-6;
};

/// Linear-part data of a semi-hyperbolic germ. lambda_1 is a primitive q-th
/// root of unity; the other eigenvalues have modulus away from 0 and 1.
struct SpectralData {
  std::vector<Complex> eigenvalues;
  int q = 1;
  double moduli_margin = 1e-6;
  double tol = 1e-9;
  /// Jordan superdiagonal rho_i = A(i, i+1) for i = 2, ..., n-1 (0-based 1..n-2).
  std::vector<int> superdiagonal;
  Eigen::MatrixXcd linear_part;

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  Complex lambda1() const { return eigenvalues.front(); }
};

/// Throws a format error unless A is upper bidiagonal in Jordan form:
/// superdiagonal entries 0 or 1 (1 only between equal eigenvalues) and
/// A(0,1) = 0.
void validate_jordan_shape(const Eigen::MatrixXcd& a, double tol = 1e-12);

SpectralData analyze_linear_part(const Eigen::MatrixXcd& a, const SpectralOptions& opts = {});

struct ResonanceReport {
  bool quasi_absent = true;
  /// Exponents (r_2, ..., r_n) with |lambda_2^r_2 ... lambda_n^r_n - 1| < tol.
  std::vector<MultiIndex> witnesses;
  int degree_bound = 0;
};

/// Exhaustive search over 1 <= r_2 + ... + r_n <= degree_bound.
ResonanceReport check_quasi_absence(const SpectralData& s, int degree_bound, double tol);

struct SmallDenominator {
  Complex value;
  bool near_resonant = false;
};

/// lambda_1 - Lambda^P, flagged when its modulus is below s.tol.
SmallDenominator small_denominator(const SpectralData& s, const MultiIndex& p);

/// Lambda^P = prod lambda_i^{p_i}.
Complex eigen_power(const std::vector<Complex>& lambda, const MultiIndex& p);

/// A = basis * diagonal * basis^{-1} with the unit-modulus eigenvalue moved to
/// position 0. Intended for diagonalizable inputs only; throws a format error
/// when the eigenvector basis is numerically singular.
struct Diagonalization {
  Eigen::MatrixXcd diagonal;
  Eigen::MatrixXcd basis;
};
Diagonalization diagonalize(const Eigen::MatrixXcd& a, double cond_limit = 1e8);

}  // namespace semihyp
