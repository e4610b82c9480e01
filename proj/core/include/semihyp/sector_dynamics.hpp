#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace semihyp {

using Complex = std::complex<double>;
using Map1D = std::function<Complex(Complex)>;

/// Point of the sector manifold C*[kq] in chart psi_l(i): sheet l in {0,1},
/// sector i in {0, ..., kq-1}, and w with arg(w) in (-l pi, 2 pi - l pi).
struct SectorPoint {
  int sheet = 0;
  int sector = 0;
  Complex w;
};

/// Angle of w read in the chart of sheet l, in [-l pi, 2 pi - l pi).
double chart_arg(Complex w, int sheet);

/// gamma: z -> psi_l(i)(z^{-kq}). Sheet 0 is used unless z lies on a sheet-0
/// boundary ray (those rays belong to no sheet-0 sector).
SectorPoint to_sector(Complex z, int k, int q);
/// Same map read on a prescribed sheet.
SectorPoint to_sector_on_sheet(Complex z, int sheet, int k, int q);

/// gamma^{-1}: the kq-th root of 1/w lying in S_l(i).
Complex from_sector(const SectorPoint& p, int k, int q);

struct BlendParams {
  int k = 1;
  int q = 1;
  int h = 1;
  /// Chart radius R0 > kq; Phi is defined for |w| > R0, i.e. |z| < rho = R0^{-1/kq}.
  double r0 = 0.0;
  /// Bump radius, 0 < eta < rho.
  double eta = 0.0;
  /// Orbit-extension budget per grid node.
  int max_iter = 20000;

  int kq() const noexcept { return k * q; }
  double rho() const;
  /// R-hat = eta^{-kq}.
  double r_hat() const;
  Complex lambda() const;
};

/// Defaults: R0 = 2kq, eta = (16 R0)^{-1/kq} (so R-hat = 16 R0). Validates gcd(h, q) = 1, 0 < h <= q,
/// R0 > kq and 0 < eta < rho.
BlendParams make_blend_params(int k, int q, int h, double eta = 0.0, double r0 = 0.0);

/// Phi: psi_l(i)(w) -> psi_l(i')(w - kq), i' = (i + hk) mod kq.
SectorPoint translate_Phi(const SectorPoint& p, const BlendParams& params);

/// gamma^{-1} o Phi o gamma computed through the charts.
Complex model_phi_charts(Complex z, const BlendParams& params);
/// Closed form lambda z (1 - kq z^{kq})^{-1/kq} of the same map, |z| < rho.
Complex model_phi(Complex z, const BlendParams& params);

/// Radial C-infinity cutoff: 1 on [0, eta/2], 0 on [eta, inf), slope <= 4/eta.
double bump(double r, double eta);
double bump_derivative(double r, double eta);

/// f-tilde = bump * f + (1 - bump) * phi.
Map1D blend(Map1D f, const BlendParams& params);

/// Polar annulus grid r in [r_min_factor, r_max_factor] * eta.
struct GridSpec {
  int n_r = 200;
  int n_theta = 200;
  double r_min_factor = 0.5;
  double r_max_factor = 1.25;
};

/// Sampled conjugacy Gamma on a polar grid, stored as displacement
/// Gamma(z) - z, with bilinear interpolation in (r, theta).
class DiscreteConjugacy {
 public:
  DiscreteConjugacy(double r_min, double r_max, int n_r, int n_theta, double eta);

  int n_r() const noexcept { return n_r_; }
  int n_theta() const noexcept { return n_theta_; }
  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  double eta() const noexcept { return eta_; }

  Complex node(int ir, int it) const;
  std::size_t index(int ir, int it) const { return static_cast<std::size_t>(ir) * n_theta_ + it; }

  bool covered(int ir, int it) const { return covered_[index(ir, it)] != 0; }
  int orbit_index(int ir, int it) const { return m_[index(ir, it)]; }
  Complex image(int ir, int it) const { return node(ir, it) + disp_[index(ir, it)]; }
  std::size_t covered_count() const;

  void set_node(int ir, int it, std::optional<Complex> image, int m);

  /// Interpolated Gamma(z); identity for |z| >= eta, empty outside coverage.
  std::optional<Complex> evaluate(Complex z) const;

 private:
  double r_min_, r_max_;
  int n_r_, n_theta_;
  double eta_;
  std::vector<Complex> disp_;
  std::vector<int> m_;
  std::vector<char> covered_;
};

/// Minimal-modulus m with Phi^m(w) in the fundamental region (disk of radius
/// r_hat or strip 0 <= Re w <= kq).
int fundamental_orbit_index(Complex w, double r_hat, int kq);

/// Builds Gamma_0 on the fundamental region and extends it along Phi-orbits.
DiscreteConjugacy build_fundamental_conjugacy(const Map1D& f_tilde, const BlendParams& params,
                                              const GridSpec& grid);

/// Single-point version of the construction (empty if the orbit budget is exceeded).
std::optional<Complex> fundamental_conjugacy_at(Complex z, const Map1D& f_tilde,
                                                const BlendParams& params, int* m_out = nullptr);

struct ResidualReport {
  double sup = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  /// Per-node |Gamma(phi(z)) - f~(Gamma(z))|, NaN where skipped.
  std::vector<double> per_node;
};

/// sup over grid nodes of |Gamma(phi(z)) - f~(Gamma(z))|, Gamma(phi(z)) by
/// interpolation; nodes whose phi-image leaves the coverage are skipped.
ResidualReport conjugacy_residual(const DiscreteConjugacy& gamma, const Map1D& phi,
                                  const Map1D& f_tilde);

/// Number of grid cells whose image triangles are degenerate or reversed.
std::size_t count_fold_overs(const DiscreteConjugacy& gamma);

/// sup |F~(w) - Phi(w)| in chart coordinates over the grid nodes with |z| < eta.
double sup_chart_distance(const Map1D& f_tilde, const BlendParams& params, const GridSpec& grid);

void write_gamma_csv(const std::filesystem::path& path, const DiscreteConjugacy& gamma,
                     const ResidualReport& residual);
void write_orbit_csv(const std::filesystem::path& path, const Map1D& map, std::span<const Complex> starts,
                     int steps);

}  // namespace semihyp
