#pragma once

#include <vector>

#include "semihyp/germ_jet.hpp"
#include "semihyp/spectrum.hpp"

namespace semihyp {

/// Graph S = {(z_1, u_2(z_1), ..., u_n(z_1))} of the center curve; each u_i is
/// a jet in the single variable z_1 with no terms of degree < 2.
struct CurveJet {
  std::vector<PolyJet> u;
  int trunc_degree = 0;
};

/// Solves f_i(z_1, u(z_1)) = u_i(f_1(z_1, u(z_1))) order by order.
CurveJet center_jet(const GermJet& f, const SpectralData& s, int trunc_degree);

/// Components i = 2..n of f(z_1, u) - u(f_1(z_1, u)), as jets in z_1.
std::vector<PolyJet> invariance_residual(const GermJet& f, const CurveJet& c);
double max_invariance_residual(const GermJet& f, const CurveJet& c);

/// Conjugates f by z -> (z_1, z_2 - u_2(z_1), ..., z_n - u_n(z_1)), which
/// makes the z_1-axis invariant through the truncation degree.
GermJet straighten(const GermJet& f, const CurveJet& c);

}  // namespace semihyp
