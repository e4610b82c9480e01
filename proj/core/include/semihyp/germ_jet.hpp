#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "semihyp/poly_jet.hpp"

namespace semihyp {

/// Truncated jet of a germ f : (C^n, 0) -> (C^n, 0), stored as n scalar jets
/// in n variables sharing one truncation degree.
///
/// Construction rejects components with a constant term. Invertibility of the
/// linear part is checked by the operations that need it (invert, conjugate).
class GermJet {
 public:
  explicit GermJet(std::vector<PolyJet> components);

  static GermJet identity(std::size_t n, int trunc_degree);
  static GermJet linear(const Eigen::MatrixXcd& a, int trunc_degree);

  std::size_t dim() const noexcept { return components_.size(); }
  int trunc_degree() const noexcept { return trunc_; }

  const PolyJet& operator[](std::size_t i) const { return components_[i]; }
  std::span<const PolyJet> components() const noexcept { return components_; }

  /// Matrix of degree-1 coefficients: row i holds the linear terms of f_i.
  Eigen::MatrixXcd linear_part() const;
  bool has_invertible_linear_part(double tol = 1e-12) const;

  GermJet truncated(int degree) const;
  /// f minus its linear part.
  GermJet nonlinear_part() const;

  void set_component(std::size_t i, PolyJet p);

 private:
  std::vector<PolyJet> components_;
  int trunc_;
};

GermJet operator+(const GermJet& a, const GermJet& b);
GermJet operator-(const GermJet& a, const GermJet& b);

/// outer o inner, truncated at the smaller degree.
GermJet compose(const GermJet& outer, const GermJet& inner);

/// Compositional inverse, solved degree by degree.
GermJet invert(const GermJet& g);

/// h o f o h^-1.
GermJet conjugate(const GermJet& h, const GermJet& f);

/// f^m for m >= 0 (m = 0 gives the identity jet).
GermJet iterate(const GermJet& f, int m);

/// M * f, i.e. the linear map M applied after f.
GermJet apply_matrix(const Eigen::MatrixXcd& m, const GermJet& f);

/// Evaluates the polynomial jet at a point (truncation error ignored).
Eigen::VectorXcd evaluate(const GermJet& g, std::span<const Complex> z);
Eigen::VectorXcd evaluate(const GermJet& g, const Eigen::VectorXcd& z);

/// Jacobian matrix of the polynomial jet at z.
Eigen::MatrixXcd jacobian(const GermJet& g, const Eigen::VectorXcd& z);

/// Germ written in permuted coordinates: with w_i = z_{perm[i]}, returns the
/// map w -> w' where w'_i = f_{perm[i]}(z).
GermJet permute_coordinates(const GermJet& f, std::span<const std::size_t> perm);

double max_abs_difference(const GermJet& a, const GermJet& b);

}  // namespace semihyp
