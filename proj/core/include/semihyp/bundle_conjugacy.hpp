#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "semihyp/germ_jet.hpp"

namespace semihyp {

/// C^n viewed as R^{2n} with interleaved (re z_1, im z_1, re z_2, ...).
Eigen::VectorXd realify(const Eigen::VectorXcd& z);
Eigen::MatrixXd realify(const Eigen::MatrixXcd& a);
Eigen::VectorXcd complexify(const Eigen::VectorXd& x);

/// Real 2n x 2m matrix selecting complex coordinates [first, first + count).
Eigen::MatrixXd coordinate_frame(std::size_t n, std::size_t first, std::size_t count);

/// Diffeomorphism of C^n with its real Jacobian.
class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  virtual std::size_t dim() const = 0;
  virtual Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const = 0;
  virtual Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& z) const = 0;
  virtual Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd& z) const = 0;
};

class LinearMap final : public SmoothMap {
 public:
  explicit LinearMap(Eigen::MatrixXcd l);
  std::size_t dim() const override { return static_cast<std::size_t>(l_.rows()); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const override { return l_ * z; }
  Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& z) const override { return l_inv_ * z; }
  Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd&) const override { return real_; }

 private:
  Eigen::MatrixXcd l_, l_inv_;
  Eigen::MatrixXd real_;
};

/// F(z) = rho_eta(|z|) f(z) + (1 - rho_eta(|z|)) L z, with f a polynomial jet.
class BumpExtension final : public SmoothMap {
 public:
  BumpExtension(GermJet f, Eigen::MatrixXcd l, double eta);

  std::size_t dim() const override { return f_.dim(); }
  double eta() const noexcept { return eta_; }
  const Eigen::MatrixXcd& linear() const noexcept { return l_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const override;
  /// Fixed-point solve of L z + (F - L)(z) = y.
  Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd& y) const override;
  Eigen::MatrixXd real_jacobian(const Eigen::VectorXcd& z) const override;

  /// sup over a deterministic sample of the ball |z| < eta of |F(z) - Lz| and
  /// of the Jacobian deviation (operator 2-norm); F = L outside the ball.
  double c1_deviation(std::size_t samples = 4000) const;

 private:
  GermJet f_;
  std::vector<PolyJet> df_;  // row-major n x n partial derivatives
  Eigen::MatrixXcd l_, l_inv_;
  Eigen::MatrixXd l_real_;
  double eta_;
};

struct ExtensionResult {
  std::shared_ptr<const BumpExtension> map;
  double deviation = 0.0;
  double eta = 0.0;
  int shrinks = 0;
};

/// Halves eta until the C^1 deviation from L drops below eps. Requires the
/// linear part of f to equal L.
ExtensionResult extend_with_bump(const GermJet& f, const Eigen::MatrixXcd& l, double eta, double eps,
                                 int max_shrink = 30);

/// f_j(z_1, 0, ..., 0) vanishes for j >= 2 (coefficients below tol).
bool axis_invariant(const GermJet& f, double tol = 1e-12);

/// Dimensions (h, k, l) of center/stable/unstable blocks, in that coordinate
/// order, and the rate / cone constants.
struct SplittingSpec {
  std::size_t h = 1, k = 0, l = 0;
  double lambda = 0.6, lambda_p = 0.9, mu_p = 1.1, mu = 1.8;
  double gamma0 = 0.1;
  double c_contract = 0.6;  // c'
  double c_expand = 1.8;    // c

  std::size_t dim() const noexcept { return h + k + l; }
  void validate() const;
  /// Default C^1 closeness epsilon = gamma0 * min(lambda' - lambda, mu - mu') / 10.
  double epsilon() const;
};

/// Rates placed between the block norms of L and 1: lambda = (2|L_s| + 1)/3,
/// lambda' = (|L_s| + 2)/3, and symmetrically for the unstable block.
SplittingSpec spec_from_linear(const Eigen::MatrixXcd& l, std::size_t h, std::size_t k, std::size_t lu,
                               double gamma0 = 0.1);

struct ConeSplitting {
  Eigen::VectorXcd x;
  /// Real orthonormal frames (2n x 2k and 2n x 2l).
  Eigen::MatrixXd e_s, e_u;
  int iterations_s = 0, iterations_u = 0;
  double distance_s = 0.0, distance_u = 0.0;
  /// sup |(v_1, 0, v_3)| / |v_2| over E_s, and |(v_1, v_2, 0)| / |v_3| over E_u.
  double cone_ratio_s = 0.0, cone_ratio_u = 0.0;
};

/// Pulls the model stable plane back along the forward orbit (and pushes the
/// unstable plane along the backward orbit), orthonormalizing each step, with
/// depths 1, 2, 4, ... until successive projectors differ by < tol.
ConeSplitting cone_splitting(const SmoothMap& f, const SplittingSpec& spec, const Eigen::VectorXcd& x,
                             int max_depth = 4096, double tol = 1e-10, bool check_cones = true);

/// sup |P_rest v| / |P_block v| over the span of an orthonormal real frame.
double cone_ratio(const Eigen::MatrixXd& frame, std::size_t n, std::size_t first, std::size_t count);

struct SplittingCertificate {
  double invariance_s = 0.0, invariance_u = 0.0;
  /// max |dF v| / |v| on E_s and min |dF v| / |v| on E_u.
  double contraction = 0.0, expansion = 0.0;
  double cone_s = 0.0, cone_u = 0.0;
  bool rates_ok = false, cones_ok = false, invariant_ok = false;
};

/// Certificates at x given the splittings at x and at F(x).
SplittingCertificate certify_splitting(const SmoothMap& f, const SplittingSpec& spec, const ConeSplitting& at_x,
                                       const ConeSplitting& at_fx, double invariance_tol = 1e-6);

/// Path of invertible matrices from the input (s = 0) to an involution a
/// (s = 1): first T(tau) = (tau^{j-i} t_ij) shrinks the Schur form to its
/// diagonal, then (1 - t) D + t A with A = diag(+-1).
struct InvolutionHomotopy {
  Eigen::MatrixXcd unitary;
  Eigen::MatrixXcd triangular;
  Eigen::MatrixXcd diagonal_target;  // A
  Eigen::MatrixXcd a;                // unitary * A * unitary^*
  std::vector<double> samples;
  std::vector<double> abs_det;
  double min_abs_det = 0.0;

  Eigen::MatrixXcd at(double s) const;
};

/// Upper-triangular input is used as is (so a = A exactly); otherwise a
/// complex Schur form is computed. Throws homotopy_degenerated when some
/// sampled |det| <= det_tol * |Lp|^n.
InvolutionHomotopy involution_homotopy(const Eigen::MatrixXcd& lp, int n_samples = 100, double det_tol = 1e-8,
                                       double axis_tol = 1e-12);

using BaseMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

/// Fiberwise linear bundle map over a base map, written in a trivialization:
/// fiber_matrix(x) sends coordinates over x to coordinates over F(x), and
/// frame(x) embeds coordinates over x into the ambient space (ambient norms).
struct TrivializedBundleMap {
  std::size_t fiber_dim = 0;  // real
  BaseMap base_map, base_inverse;
  std::function<Eigen::MatrixXd(const Eigen::VectorXcd&)> fiber_matrix;
  std::function<Eigen::MatrixXd(const Eigen::VectorXcd&)> frame;
  /// Model inclusion of the fiber coordinates into the ambient space.
  Eigen::MatrixXd inclusion;
};

/// Same bundle with the inverse dynamics (for expanding fibers).
TrivializedBundleMap inverse_bundle_map(const TrivializedBundleMap& m);

struct FiberConjugacyOptions {
  /// Lower bound for gamma; the measured frame/dynamics closeness is used if larger.
  double gamma = 0.0;
  int homotopy_samples = 100;
  int max_orbit = 400;
};

/// Conjugacy H between two uniformly fiber-contracting bundle maps lifting a
/// base conjugacy Gamma_0, built on the fundamental shell and extended along
/// orbits.
class FiberConjugacy {
 public:
  FiberConjugacy(TrivializedBundleMap alpha, TrivializedBundleMap beta, BaseMap gamma0, Eigen::MatrixXcd l0,
                 std::span<const Eigen::VectorXcd> sample_bases, FiberConjugacyOptions opts = {});

  /// H(x, v): coordinates over Gamma_0(x) of the image of the vector with
  /// coordinates v over x.
  Eigen::VectorXd operator()(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const;
  /// H_0 on the fundamental shell.
  Eigen::VectorXd shell_map(const Eigen::VectorXcd& x, const Eigen::VectorXd& v) const;

  double delta() const noexcept { return delta_; }
  double gamma() const noexcept { return gamma_; }
  /// sup |phi_x| measured on the samples for alpha and beta.
  double contraction_alpha() const noexcept { return sup_alpha_; }
  double contraction_beta() const noexcept { return sup_beta_; }
  /// min over sampled u of sigma_min((1 - u) L0 + u phi-hat).
  double segment_min_singular() const noexcept { return segment_min_sv_; }
  const InvolutionHomotopy& homotopy() const noexcept { return homotopy_; }

  struct ShellCoords {
    Eigen::VectorXd v;  // unit model direction
    double t = 0.0;
  };
  ShellCoords chi_inverse_alpha(const Eigen::VectorXcd& x, const Eigen::VectorXd& w) const;
  Eigen::VectorXd chi_beta(const Eigen::VectorXcd& x, const ShellCoords& c) const;

 private:
  Eigen::MatrixXd path_matrix(const TrivializedBundleMap& m, const Eigen::VectorXcd& x, double s) const;
  Eigen::VectorXd chi(const TrivializedBundleMap& m, const Eigen::VectorXcd& x, const ShellCoords& c) const;
  ShellCoords chi_inverse(const TrivializedBundleMap& m, const Eigen::VectorXcd& x,
                          const Eigen::VectorXd& w) const;

  TrivializedBundleMap alpha_, beta_;
  BaseMap gamma0_;
  Eigen::MatrixXd l0_;
  InvolutionHomotopy homotopy_;
  FiberConjugacyOptions opts_;
  double delta_ = 0.0, gamma_ = 0.0, sup_alpha_ = 0.0, sup_beta_ = 0.0, segment_min_sv_ = 0.0;
};

/// Ambient norm |frame(x) v|.
double fiber_norm(const TrivializedBundleMap& m, const Eigen::VectorXcd& x, const Eigen::VectorXd& v);

struct FiberSample {
  Eigen::VectorXcd x;
  Eigen::VectorXd v;
};

/// sup over samples of |H(phi_alpha(v)) - phi_beta(H(v))| in the ambient norm.
double conjugacy_check(const FiberConjugacy& h, const TrivializedBundleMap& alpha,
                       const TrivializedBundleMap& beta, const BaseMap& gamma0,
                       std::span<const FiberSample> samples);

/// Frames and bundle maps of E_s / E_u along the z_1-axis of a bump-extended
/// map (center dimension 1), with splittings cached per base point.
class AxisBundles {
 public:
  AxisBundles(std::shared_ptr<const SmoothMap> f, SplittingSpec spec);

  const ConeSplitting& splitting(const Eigen::VectorXcd& x1) const;
  /// Graph trivialization over the model plane: 2n x 2k (resp. 2n x 2l).
  Eigen::MatrixXd stable_frame(const Eigen::VectorXcd& x1) const;
  Eigen::MatrixXd unstable_frame(const Eigen::VectorXcd& x1) const;
  Eigen::MatrixXd stable_matrix(const Eigen::VectorXcd& x1) const;
  Eigen::MatrixXd unstable_matrix(const Eigen::VectorXcd& x1) const;
  Eigen::VectorXcd base_map(const Eigen::VectorXcd& x1) const;
  Eigen::VectorXcd base_inverse(const Eigen::VectorXcd& x1) const;
  const SmoothMap& map() const { return *f_; }
  const SplittingSpec& spec() const { return spec_; }
  std::size_t cache_size() const;

 private:
  std::shared_ptr<const SmoothMap> f_;
  SplittingSpec spec_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, ConeSplitting> cache_;
};

/// Result of the two-step tangent-bundle conjugacy between the bump extension
/// of f and the extension of its decoupled model (axis dynamics of f, linear
/// elsewhere), with Gamma = id on the axis.
struct TangentConjugacyReport {
  double eta = 0.0;
  double deviation = 0.0;
  double residual = 0.0;
  double residual_stable = 0.0;
  double residual_unstable = 0.0;
  std::size_t samples = 0;
  double delta_s = 0.0, gamma_s = 0.0, delta_u = 0.0, gamma_u = 0.0;
  struct Row {
    Complex x;
    double residual = 0.0;
  };
  std::vector<Row> rows;
};

/// f must be ordered (center, stable, unstable) with h = 1 and an invariant
/// z_1-axis. Samples base points on the axis inside radius eta and random
/// fiber vectors of norm in [0.1, 10].
TangentConjugacyReport verify_tangent_conjugacy(const GermJet& f, const SplittingSpec& spec, double eta,
                                                std::size_t n_samples = 1000, std::uint64_t seed = 0);

}  // namespace semihyp
