// End-to-end acceptance checks; prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "semihyp/bundle_conjugacy.hpp"
#include "semihyp/center_manifold.hpp"
#include "semihyp/error.hpp"
#include "semihyp/normal_form.hpp"
#include "semihyp/sector_dynamics.hpp"
#include "semihyp_cli/pipeline.hpp"

using namespace semihyp;
using namespace semihyp::testing;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

PolyJet z(std::size_t n, int N, std::size_t i, Complex c = 1.0) { return PolyJet::variable(n, N, i, c); }

double structure_defect(const GermJet& g, int q) {
  double d = 0.0;
  for (const auto& t : g[0].terms()) {
    if (t.index.degree() < 2) continue;
    bool pure = true;
    for (std::size_t i = 1; i < t.index.size(); ++i) pure = pure && t.index[i] == 0;
    if (!pure || (t.index[0] - 1) % q != 0) d = std::max(d, std::abs(t.coeff));
  }
  return d;
}

struct NormalizedSample {
  GermJet f;
  SpectralData s;
  NormalizationResult r;
};

std::vector<NormalizedSample> criterion1_samples() {
  static std::vector<NormalizedSample> cache;
  if (!cache.empty()) return cache;
  std::mt19937_64 rng(20240601);
  const int Ns[] = {6, 8, 10};
  for (int i = 0; i < 50; ++i) {
    RandomGermOptions o;
    o.n = 2 + i % 2;
    o.N = Ns[(i / 2) % 3];
    o.q = 1 + (i / 6) % 4;
    o.density = 0.3;
    o.coeff_scale = 0.5;
    o.jordan_block = (i % 5 == 1);
    GermJet f = random_semi_hyperbolic(o, rng);
    SpectralData s = spectral(f);
    NormalizationResult r = normalize_first_coordinate(f, s);
    cache.push_back({std::move(f), std::move(s), std::move(r)});
  }
  return cache;
}

Outcome criterion1() {
  double worst_struct = 0.0, worst_witness = 0.0;
  for (const auto& c : criterion1_samples()) {
    const GermJet w = conjugate(c.r.conjugator, c.f);
    worst_struct = std::max(worst_struct, structure_defect(w, c.s.q));
    worst_witness = std::max(worst_witness, max_abs_difference(w, c.r.normalized));
  }
  return {worst_struct < 1e-10 && worst_witness < 1e-10,
          "50 germs; max forbidden coeff " + sci(worst_struct) + ", witness mismatch " + sci(worst_witness) +
              " (tol 1e-10)"};
}

Outcome criterion2() {
  double worst = 0.0;
  bool same = true;
  for (const auto& c : criterion1_samples()) {
    const NormalizationResult again = normalize_first_coordinate(c.r.normalized, c.s);
    worst = std::max(worst, distance_to_identity(again.conjugator));
    const Classification a = classify(c.r.normalized, c.s, 1e-9), b = classify(again.normalized, c.s, 1e-9);
    same = same && a.case_tag == b.case_tag && a.k == b.k && std::abs(a.a_k - b.a_k) < 1e-10;
  }
  return {worst < 1e-10 && same,
          "re-normalization conjugator nonlinear max " + sci(worst) + (same ? ", (k, a_k) preserved" : ", (k, a_k) changed")};
}

Outcome criterion3() {
  std::mt19937_64 rng(303);
  double worst_first = 0.0, worst_diag = 0.0;
  int count = 0;
  for (int i = 0; i < 20; ++i) {
    RandomGermOptions o;
    o.n = 2 + i % 2;
    o.N = 5 + i % 3;
    o.q = 2 + i % 3;
    o.density = 0.3;
    o.coeff_scale = 0.5;
    GermJet g = random_semi_hyperbolic(o, rng);
    g.set_component(0, z(o.n, o.N, 0, g.linear_part()(0, 0)));
    const GermJet h0 = random_germ_with_linear(Eigen::MatrixXcd::Identity(o.n, o.n), o.N, 0.3, rng, 0.25);
    const GermJet f = conjugate(invert(h0), g);
    const SpectralData s = spectral(f);
    const NormalizationResult r = normalize_first_coordinate(f, s);
    if (classify(r.normalized, s, 1e-9).case_tag != CaseTag::linearizable_i) return {false, "germ not case i"};
    const GermJet h = averaging_linearizer(r.normalized, s);
    const GermJet out = conjugate(h, r.normalized);
    worst_first = std::max(worst_first, max_abs_difference(out[0], z(o.n, o.N, 0, s.lambda1())));
    const Eigen::MatrixXcd dh = h.linear_part();
    for (std::size_t k = 0; k < o.n; ++k) {
      Complex eta = 0.0;
      for (int j = 0; j < s.q; ++j) eta += std::pow(s.eigenvalues[k] / s.lambda1(), j);
      worst_diag = std::max(worst_diag, std::abs(dh(k, k) - eta));
    }
    ++count;
  }
  return {worst_first < 1e-10 && worst_diag < 1e-12,
          std::to_string(count) + " case-i germs; first coordinate residual " + sci(worst_first) +
              ", dh0 diagonal error " + sci(worst_diag)};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    RandomGermOptions o;
    o.n = 2 + i % 3;
    o.N = 6 + i % 3;
    o.q = 1 + i % 4;
    o.density = 0.4;
    const GermJet f = random_semi_hyperbolic(o, rng);
    worst = std::max(worst, max_invariance_residual(f, center_jet(f, spectral(f), o.N)));
  }
  GermJet hand({z(2, 6, 0, -1.0), z(2, 6, 1, 2.0) + PolyJet::monomial(2, 6, MultiIndex({2, 0}), 1.0)});
  const Complex c = center_jet(hand, spectral(hand), 6).u[0].coeff(MultiIndex({2}));
  const bool hand_ok = std::abs(c + 1.0) < 1e-12;
  return {worst < 1e-9 && hand_ok, "20 germs; max invariance residual " + sci(worst) + "; hand case u2 coeff " +
                                       sci(c.real()) + (hand_ok ? " (= -1)" : " (expected -1)")};
}

Outcome criterion5() {
  const int triples[][3] = {{1, 1, 1}, {1, 2, 1}, {2, 3, 2}};
  double worst_rel = 0.0;
  for (const auto& t : triples) {
    const BlendParams p = make_blend_params(t[0], t[1], t[2]);
    for (int j = 0; j < 360; ++j) {
      const Complex zz = std::polar(1e-3, 2 * kPi * (j + 0.5) / 360);
      const Complex model = p.lambda() * zz + p.lambda() * std::pow(zz, p.kq() + 1);
      worst_rel = std::max(worst_rel, std::abs(model_phi_charts(zz, p) - model) / std::abs(model));
    }
  }
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> r(1e-3, 1.0), th(-kPi, kPi);
  double worst_trip = 0.0;
  for (const auto& t : triples)
    for (int i = 0; i < 1000; ++i) {
      const Complex zz = std::polar(r(rng), th(rng));
      worst_trip = std::max(worst_trip, std::abs(from_sector(to_sector(zz, t[0], t[1]), t[0], t[1]) - zz));
    }
  return {worst_rel < 1e-4 && worst_trip < 1e-12,
          "relative error on |z| = 1e-3: " + sci(worst_rel) + "; round trip " + sci(worst_trip)};
}

Outcome criterion6() {
  const BlendParams p = make_blend_params(1, 2, 1);
  const Complex lam = p.lambda();
  Map1D f = [lam](Complex x) { return lam * x + lam * x * x * x + x * x * x * x; };
  Map1D phi = [p](Complex x) { return model_phi(x, p); };
  Map1D ft = blend(f, p);
  std::string detail;
  double r50 = 0.0, r200 = 0.0, r400 = 0.0;
  bool ok = true;
  for (int g : {50, 200, 400}) {
    GridSpec grid;
    grid.n_r = grid.n_theta = g;
    const DiscreteConjugacy gamma = build_fundamental_conjugacy(ft, p, grid);
    const ResidualReport res = conjugacy_residual(gamma, phi, ft);
    const std::size_t folds = count_fold_overs(gamma);
    bool identity_outside = true;
    for (int ir = 0; ir < g; ++ir)
      for (int it = 0; it < g; ++it)
        if (std::abs(gamma.node(ir, it)) >= p.eta) identity_outside = identity_outside && gamma.image(ir, it) == gamma.node(ir, it);
    ok = ok && folds == 0 && identity_outside && gamma.covered_count() == static_cast<std::size_t>(g) * g;
    (g == 50 ? r50 : g == 200 ? r200 : r400) = res.sup;
    detail += std::to_string(g) + "^2: " + sci(res.sup) + " folds " + std::to_string(folds) + "; ";
  }
  ok = ok && r200 < 1e-3 && r50 / r400 >= 2.0;
  return {ok, detail + "shrink 50->400 x" + sci(r50 / r400)};
}

Outcome criterion7() {
  double worst_ratio = 0.0;
  for (double eta : {0.05, 0.1, 0.5}) {
    const int n = 10000;
    double slope = 0.0;
    double prev = bump(0.0, eta);
    for (int i = 1; i <= n; ++i) {
      const double r = eta * i / n;
      const double b = bump(r, eta);
      slope = std::max({slope, std::abs(b - prev) / (eta / n), std::abs(bump_derivative(r, eta))});
      prev = b;
    }
    worst_ratio = std::max(worst_ratio, slope * eta / 4.0);
  }
  return {worst_ratio <= 1.0 + 1e-9, "max slope / (4/eta) = " + sci(worst_ratio)};
}

GermJet cubic_saddle() {
  return GermJet({z(3, 6, 0, -1.0) + PolyJet::monomial(3, 6, MultiIndex({3, 0, 0}), 1.0), z(3, 6, 1, 0.5),
                  z(3, 6, 2, 2.0)});
}

Outcome criterion8() {
  SplittingSpec spec;
  spec.h = spec.k = spec.l = 1;
  const GermJet f = cubic_saddle();
  const ExtensionResult ext = extend_with_bump(f, f.linear_part(), 0.1, spec.epsilon());
  const SmoothMap& F = *ext.map;
  bool ok = true;
  double worst_inv = 0.0, worst_cone = 0.0, contr = 0.0, expn = 1e300;
  for (int j = 0; j < 20; ++j) {
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(3);
    x(0) = std::polar(ext.eta * (0.05 + 0.9 * j / 19.0), 2 * kPi * std::fmod(0.618034 * j, 1.0));
    const ConeSplitting a = cone_splitting(F, spec, x), b = cone_splitting(F, spec, F.apply(x));
    const SplittingCertificate c = certify_splitting(F, spec, a, b);
    ok = ok && c.rates_ok && c.cones_ok && c.invariant_ok && c.invariance_s < 1e-6 && c.invariance_u < 1e-6;
    worst_inv = std::max({worst_inv, c.invariance_s, c.invariance_u});
    worst_cone = std::max({worst_cone, c.cone_s, c.cone_u});
    contr = std::max(contr, c.contraction);
    expn = std::min(expn, c.expansion);
  }
  LinearMap L(f.linear_part());
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(3);
  x(0) = 0.5;
  const ConeSplitting lin = cone_splitting(L, spec, x);
  const auto proj = [](const Eigen::MatrixXd& e) { return Eigen::MatrixXd(e * e.transpose()); };
  const bool planes = lin.iterations_s == 1 && lin.iterations_u == 1 &&
                      (proj(lin.e_s) - proj(coordinate_frame(3, 1, 1))).norm() < 1e-14 &&
                      (proj(lin.e_u) - proj(coordinate_frame(3, 2, 1))).norm() < 1e-14;
  return {ok && planes, "eta " + sci(ext.eta) + "; invariance " + sci(worst_inv) + ", cone ratio " + sci(worst_cone) +
                            " <= " + sci(spec.gamma0) + ", |dF|_Es " + sci(contr) + " <= " + sci(spec.c_contract) +
                            ", |dF|_Eu " + sci(expn) + " >= " + sci(spec.c_expand) +
                            (planes ? "; F=L planes in 1 iteration" : "; F=L planes FAILED")};
}

Outcome criterion9() {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  bool ok = true;
  double worst_margin = 1e300;
  int negatives = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + i % 4;
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const double pick = coin(rng);
      if (pick < 0.3) {
        t(r, r) = -(0.2 + 2 * coin(rng));
      } else if (pick < 0.4) {
        t(r, r) = 0.2 + 2 * coin(rng);
      } else {
        t(r, r) = std::polar(0.2 + 2 * coin(rng), kPi * u(rng));
      }
      for (int c = r + 1; c < n; ++c) t(r, c) = Complex(u(rng), u(rng));
    }
    const InvolutionHomotopy h = involution_homotopy(t);
    const double norm = t.operatorNorm();
    ok = ok && h.samples.size() == 100 && h.min_abs_det > 1e-8 * std::pow(norm, n);
    worst_margin = std::min(worst_margin, h.min_abs_det / std::pow(norm, n));
    ok = ok && (h.a * h.a - Eigen::MatrixXcd::Identity(n, n)).norm() == 0.0;
    for (int r = 0; r < n; ++r) {
      const Complex l = t(r, r);
      const bool neg = std::abs(l.imag()) <= 1e-12 && l.real() < 0.0;
      negatives += neg;
      ok = ok && (h.a(r, r) == Complex(-1.0)) == neg;
    }
  }
  return {ok, "50 matrices (" + std::to_string(negatives) + " negative-real eigenvalues); min |det| / |L|^n " +
                  sci(worst_margin) + "; a^2 = id exactly"};
}

Outcome criterion10() {
  TrivializedBundleMap a, b;
  a.fiber_dim = b.fiber_dim = 2;
  BaseMap id = [](const Eigen::VectorXcd& x) { return x; };
  a.base_map = a.base_inverse = b.base_map = b.base_inverse = id;
  a.fiber_matrix = [](const Eigen::VectorXcd&) { return Eigen::MatrixXd(0.5 * Eigen::MatrixXd::Identity(2, 2)); };
  b.fiber_matrix = [](const Eigen::VectorXcd&) { return Eigen::MatrixXd(0.4 * Eigen::MatrixXd::Identity(2, 2)); };
  const std::vector<Eigen::VectorXcd> bases{Eigen::VectorXcd(0)};
  FiberConjugacy H(a, b, id, Eigen::MatrixXcd::Constant(1, 1, 0.45), bases);
  std::vector<FiberSample> samples;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd v(2);
    v << std::cos(0.7 * i), std::sin(0.7 * i);
    samples.push_back({Eigen::VectorXcd(0), v * std::pow(10.0, -2.0 + 4.0 * i / 999.0)});
  }
  const double scalar = conjugacy_check(H, a, b, id, samples);
  const double alpha = std::log(0.4) / std::log(0.5);
  double oracle = 0.0;
  for (int m = -6; m <= 12; ++m) {
    Eigen::VectorXd v(2);
    v << std::cos(0.3 * m), std::sin(0.3 * m);
    v *= std::pow(0.5, m);
    const double expect = std::pow(v.norm(), alpha);
    oracle = std::max(oracle, std::abs(H(Eigen::VectorXcd(0), v).norm() - expect) / expect);
  }

  auto m = [](std::initializer_list<int> e) { return PolyJet::monomial(3, 6, MultiIndex(e), 1.0); };
  const GermJet f({z(3, 6, 0, -1.0) + m({1, 1, 0}) + m({0, 1, 1}), z(3, 6, 1, 0.5) + m({1, 1, 0}) + m({1, 0, 1}),
                   z(3, 6, 2, 2.0) + m({1, 0, 1}) + m({2, 1, 0})});
  SplittingSpec spec;
  spec.h = spec.k = spec.l = 1;
  const TangentConjugacyReport r = verify_tangent_conjugacy(f, spec, 0.1, 1000, 0);
  return {scalar < 1e-8 && oracle < 1e-12 && r.residual < 1e-6 && r.samples == 1000,
          "scalar residual " + sci(scalar) + ", radial oracle rel err " + sci(oracle) + "; n=3 residual " +
              sci(r.residual) + " on " + std::to_string(r.samples) + " samples"};
}

Outcome criterion11() {
  using namespace semihyp::cli;
  const auto root = std::filesystem::temp_directory_path() / "semihyp_acceptance";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);

  GermJet g({z(2, 10, 0, Complex(0, 1)) + PolyJet::monomial(2, 10, MultiIndex({5, 0}), 1.0), z(2, 10, 1, 0.5)});
  const auto input = root / "g.json";
  {
    std::ofstream out(input);
    out << document_to_json(document_from_germ(g)).dump(2);
  }
  std::ostringstream log, err;
  if (run_classify_command(input, {}, root / "classify", log, err) != kExitOk) return {false, err.str()};
  const nlohmann::json rep = nlohmann::json::parse(std::ifstream(root / "classify" / "report.json"));
  const auto& cls = rep["classification"];
  const Complex a1(cls["a_k"][0].get<double>(), cls["a_k"][1].get<double>());
  bool ok = cls["case"] == "ii" && cls["k"] == 1 && std::abs(a1 - 1.0) < 1e-12 && rep["spectrum"]["q"] == 4;
  std::string detail = "g: case " + cls["case"].get<std::string>() + ", k = " + std::to_string(cls["k"].get<int>()) +
                       ", a_1 = " + sci(a1.real()) + "; experiments:";
  for (Experiment e : {Experiment::center, Experiment::sector, Experiment::splitting, Experiment::bundle}) {
    VerifySettings vs;
    vs.experiment = e;
    const int code = run_verify_command(input, vs, root / to_string(e), log, err);
    ok = ok && code == kExitOk;
    detail += " " + to_string(e) + (code == kExitOk ? " pass" : " FAIL");
  }
  std::mt19937_64 rng(1111);
  int linear_ok = 0;
  for (int i = 0; i < 12; ++i) {
    RandomGermOptions o;
    o.n = 2 + i % 3;
    o.q = 1 + i % 4;
    o.N = 8;
    o.density = 0.0;
    o.jordan_block = i % 2 == 1;
    const Pipeline p = run_pipeline(document_from_germ(random_semi_hyperbolic(o, rng)));
    linear_ok += p.cls.case_tag == CaseTag::linearizable_i && distance_to_identity(p.normal.conjugator) == 0.0;
  }
  ok = ok && linear_ok == 12;
  return {ok, detail + "; linear Jordan inputs case i with identity conjugator " + std::to_string(linear_ok) + "/12"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"normal-form structure", criterion1},   {"idempotence", criterion2},
      {"averaging exactness", criterion3},     {"center-jet invariance", criterion4},
      {"sector-coordinate fidelity", criterion5}, {"fundamental-domain conjugacy", criterion6},
      {"bump slope bound", criterion7},        {"splitting certificates", criterion8},
      {"involution homotopy", criterion9},     {"bundle conjugacy", criterion10},
      {"end-to-end classification", criterion11},
  };
  int failed = 0, index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-30s %s  %s  [%.1fs]\n", index, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
