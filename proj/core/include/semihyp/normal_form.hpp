#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "semihyp/germ_jet.hpp"
#include "semihyp/spectrum.hpp"

namespace semihyp {

enum class CaseTag { linearizable_i, parabolic_ii };

struct NormalizationResult {
  GermJet normalized;
  GermJet conjugator;
};

/// Degree-by-degree elimination of the first coordinate: returns h and
/// h o f o h^-1 whose first component is lambda_1 z_1 plus pure powers
/// z_1^{kq+1}.
NormalizationResult normalize_first_coordinate(const GermJet& f, const SpectralData& s);

struct Classification {
  CaseTag case_tag = CaseTag::linearizable_i;
  int q = 1;
  /// Case ii only: first k with a_k = coeff of z_1^{kq+1} above tolerance.
  int k = 0;
  Complex a_k = 0.0;
  GermJet conjugator;
  GermJet normalized;
};

Classification classify(const GermJet& normalized, const SpectralData& s, double tol,
                        std::optional<GermJet> conjugator = std::nullopt);

/// (f^q)_j restricted to the z_1-axis is nonzero for every j >= 2.
bool axis_generic(const GermJet& f, int q, double tol);

struct ShearResult {
  GermJet germ;
  /// h(z) = (z_1, z_2 + eps_2 z_1^2, ..., z_n + eps_n z_1^2)
  GermJet shear;
  std::vector<Complex> eps;
};

/// Conjugates by a random quadratic shear until axis_generic holds. Returns f
/// unchanged (all eps zero) when it already holds.
ShearResult quadratic_shear(const GermJet& f, const SpectralData& s, std::uint64_t seed = 0,
                            int max_retries = 8, double radius = 0.1);

/// h = sum_{j<q} f^j / lambda_1^j. Requires (f^q)_1 = z_1 through the
/// truncation degree.
GermJet averaging_linearizer(const GermJet& f, const SpectralData& s, double tol = 1e-8);

/// c with c^{kq} = a_k / lambda_1 (principal root).
Complex camacho_scale(const Classification& c, Complex lambda1);

/// Conjugates the normalized germ by z -> (c z_1, z_2, ..., z_n) so the
/// leading coefficient a_k becomes lambda_1.
GermJet camacho_rescale(const Classification& c, double tol = 1e-9);

/// The diagonal map z -> (c z_1, z_2, ..., z_n) as a jet.
GermJet first_axis_scaling(std::size_t n, int trunc_degree, Complex c);

}  // namespace semihyp
