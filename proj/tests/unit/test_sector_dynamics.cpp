#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "semihyp/error.hpp"
#include "semihyp/sector_dynamics.hpp"

using namespace semihyp;

namespace {

constexpr double kPi = std::numbers::pi;

Complex model_taylor(Complex z, const BlendParams& p) {
  return p.lambda() * z + p.lambda() * std::pow(z, p.kq() + 1);
}

}  // namespace

TEST(SectorCharts, Examples) {
  SectorPoint p = to_sector(std::polar(1.0, kPi / 4), 1, 1);
  EXPECT_EQ(p.sheet, 0);
  EXPECT_EQ(p.sector, 0);
  EXPECT_LT(std::abs(p.w - std::polar(1.0, -kPi / 4)), 1e-15);
  EXPECT_NEAR(chart_arg(p.w, 0), 7 * kPi / 4, 1e-14);

  p = to_sector(std::polar(1.0, kPi / 2), 1, 2);
  EXPECT_EQ(p.sheet, 0);
  EXPECT_EQ(p.sector, 0);
  EXPECT_LT(std::abs(p.w - std::polar(1.0, -kPi)), 1e-15);
  EXPECT_NEAR(chart_arg(p.w, 0), kPi, 1e-14);

  const Complex w(0.3, -2.0);
  EXPECT_LT(std::abs(from_sector({0, 0, w}, 1, 1) - 1.0 / w), 1e-15);
  EXPECT_THROW((void)to_sector(0.0, 1, 1), Error);
}

TEST(SectorCharts, RoundTripAndModulusLaw) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r(1e-3, 2.0), th(-kPi, kPi);
  const std::pair<int, int> kqs[] = {{1, 1}, {1, 2}, {2, 3}, {1, 4}, {3, 2}};
  for (auto [k, q] : kqs)
    for (int i = 0; i < 1000; ++i) {
      const Complex z = std::polar(r(rng), th(rng));
      const SectorPoint p = to_sector(z, k, q);
      EXPECT_LT(std::abs(from_sector(p, k, q) - z), 1e-12 * std::abs(z));
      EXPECT_NEAR(std::abs(p.w), std::pow(std::abs(z), -k * q), 1e-12 * std::abs(p.w));
      const double a = chart_arg(p.w, p.sheet);
      EXPECT_GE(a, -p.sheet * kPi - 1e-12);
      EXPECT_LT(a, 2 * kPi - p.sheet * kPi + 1e-12);
    }
}

TEST(SectorCharts, GluingConsistency) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> r(0.01, 1.0), off(-1e-6, 1e-6);
  const int k = 1, q = 3, m = k * q;
  for (int i = 0; i < 1000; ++i) {
    const int b = i % (2 * m);
    const Complex z = std::polar(r(rng), b * kPi / m + off(rng));
    for (int sheet : {0, 1}) {
      const SectorPoint p = to_sector_on_sheet(z, sheet, k, q);
      EXPECT_LT(std::abs(from_sector(p, k, q) - z), 1e-12);
    }
    const SectorPoint a = to_sector_on_sheet(z, 0, k, q), c = to_sector_on_sheet(z, 1, k, q);
    EXPECT_LT(std::abs(a.w - c.w), 1e-12 * std::abs(a.w));
  }
}

TEST(TranslatePhi, Examples) {
  const BlendParams p1 = make_blend_params(1, 1, 1);
  const Complex w(5.0, 3.0);
  SectorPoint out = translate_Phi({0, 0, w}, p1);
  EXPECT_EQ(out.sector, 0);
  EXPECT_LT(std::abs(out.w - (w - 1.0)), 1e-15);

  const BlendParams p4 = make_blend_params(1, 4, 1);
  for (int i = 0; i < 4; ++i) {
    const Complex w4 = std::polar(50.0, 2.0);
    EXPECT_EQ(translate_Phi({0, i, w4}, p4).sector, (i + 1) % 4);
  }
  try {
    (void)translate_Phi({0, 0, Complex(1.0, 0.5)}, p1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::out_of_domain);
  }
}

TEST(TranslatePhi, TaylorFidelity) {
  const int triples[][3] = {{1, 1, 1}, {1, 2, 1}, {2, 3, 2}};
  for (const auto& t : triples) {
    const BlendParams p = make_blend_params(t[0], t[1], t[2]);
    for (int j = 0; j < 64; ++j) {
      const Complex z = std::polar(1e-3, 2 * kPi * (j + 0.25) / 64);
      const Complex expect = model_taylor(z, p);
      EXPECT_LT(std::abs(model_phi_charts(z, p) - expect) / std::abs(expect), 1e-4);
      EXPECT_LT(std::abs(model_phi(z, p) - model_phi_charts(z, p)), 1e-14);
    }
  }
}

TEST(TranslatePhi, ConjugatesTaylorModelAsymptotically) {
  const BlendParams p = make_blend_params(1, 2, 1);
  double prev = 1e300;
  for (double mod : {1e3, 1e4, 1e5}) {
    double worst = 0.0;
    for (int j = 0; j < 16; ++j) {
      const SectorPoint s{0, j % 2, std::polar(mod, 2 * kPi * (j + 0.5) / 16)};
      const Complex z = from_sector(s, p.k, p.q);
      const SectorPoint model = to_sector(model_taylor(z, p), p.k, p.q);
      const SectorPoint phi = translate_Phi(s, p);
      worst = std::max(worst, std::abs(model.w - phi.w));
    }
    EXPECT_LT(worst, prev);
    prev = worst;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(BlendParams, DefaultsAndValidation) {
  const BlendParams p = make_blend_params(1, 2, 1);
  EXPECT_EQ(p.r0, 4.0);
  EXPECT_GE(p.r_hat(), 4 * p.r0 * (1 - 1e-12));
  EXPECT_LT(p.eta, p.rho());
  EXPECT_THROW((void)make_blend_params(1, 4, 2), Error);
  EXPECT_THROW((void)make_blend_params(1, 2, 1, 0.9), Error);
  EXPECT_THROW((void)make_blend_params(1, 2, 1, 0.0, 1.5), Error);
}

TEST(Bump, ProfileAndSlopeBound) {
  for (double eta : {0.05, 0.1, 0.5}) {
    EXPECT_EQ(bump(0.0, eta), 1.0);
    EXPECT_EQ(bump(eta, eta), 0.0);
    EXPECT_EQ(bump(0.49 * eta, eta), 1.0);
    const int n = 10000;
    double max_slope = 0.0, prev = 1.0;
    for (int i = 0; i <= n; ++i) {
      const double r = 1.2 * eta * i / n;
      const double b = bump(r, eta);
      EXPECT_LE(b, prev + 1e-15);
      prev = b;
      max_slope = std::max(max_slope, std::abs(bump_derivative(r, eta)));
      if (i) max_slope = std::max(max_slope, std::abs(b - bump(1.2 * eta * (i - 1) / n, eta)) / (1.2 * eta / n));
    }
    EXPECT_LE(max_slope, 4.0 / eta * (1 + 1e-9));
    EXPECT_GT(max_slope, 3.9 / eta);
  }
}

TEST(Blend, Properties) {
  const BlendParams p = make_blend_params(1, 2, 1);
  Map1D phi = [p](Complex z) { return model_phi(z, p); };
  const Complex lam = p.lambda();
  Map1D f = [lam](Complex z) { return lam * z + lam * z * z * z + z * z * z * z; };
  Map1D same = blend(phi, p), ft = blend(f, p);
  double worst_gap = 0.0;
  for (int i = 0; i < 400; ++i) {
    const Complex z = std::polar(p.eta * (0.05 + 1.5 * i / 400.0), 0.37 * i);
    EXPECT_LT(std::abs(same(z) - phi(z)), 1e-16);
    if (std::abs(z) >= p.eta) EXPECT_EQ(ft(z), phi(z));
    if (std::abs(z) <= 0.5 * p.eta) EXPECT_EQ(ft(z), f(z));
    if (std::abs(z) > 0.5 * p.eta && std::abs(z) < p.eta) {
      worst_gap = std::max(worst_gap, std::abs(ft(z) - phi(z)) - std::abs(f(z) - phi(z)));
    }
  }
  EXPECT_LE(worst_gap, 1e-16);
}

TEST(FundamentalConjugacy, ModelGivesIdentity) {
  const BlendParams p = make_blend_params(1, 2, 1);
  Map1D phi = [p](Complex z) { return model_phi(z, p); };
  GridSpec grid;
  grid.n_r = grid.n_theta = 40;
  const DiscreteConjugacy g = build_fundamental_conjugacy(phi, p, grid);
  EXPECT_EQ(g.covered_count(), 1600u);
  double disp = 0.0;
  for (int ir = 0; ir < 40; ++ir)
    for (int it = 0; it < 40; ++it) disp = std::max(disp, std::abs(g.image(ir, it) - g.node(ir, it)));
  EXPECT_LT(disp, 1e-9);
  EXPECT_LT(conjugacy_residual(g, phi, phi).sup, 1e-9);
}

TEST(FundamentalConjugacy, PipelineResidualAndIdentityOutside) {
  const BlendParams p = make_blend_params(1, 2, 1);
  const Complex lam = p.lambda();
  Map1D f = [lam](Complex z) { return lam * z + lam * z * z * z + z * z * z * z; };
  Map1D phi = [p](Complex z) { return model_phi(z, p); };
  Map1D ft = blend(f, p);
  GridSpec grid;
  grid.n_r = grid.n_theta = 50;
  EXPECT_LT(sup_chart_distance(ft, p, grid), p.kq() / 4.0);
  const DiscreteConjugacy g = build_fundamental_conjugacy(ft, p, grid);
  EXPECT_EQ(g.covered_count(), 2500u);
  const ResidualReport r = conjugacy_residual(g, phi, ft);
  EXPECT_LT(r.sup, 1e-3);
  EXPECT_EQ(count_fold_overs(g), 0u);
  for (int ir = 0; ir < 50; ++ir)
    for (int it = 0; it < 50; ++it) {
      if (std::abs(g.node(ir, it)) >= p.eta) EXPECT_EQ(g.image(ir, it), g.node(ir, it));
      EXPECT_LE(std::abs(g.orbit_index(ir, it)), p.max_iter);
    }
  const Complex outside = std::polar(1.1 * p.eta, 0.3);
  ASSERT_TRUE(g.evaluate(outside).has_value());
  EXPECT_EQ(*g.evaluate(outside), outside);

  // Grid value agrees with the single-point construction.
  int m = 0;
  const auto direct = fundamental_conjugacy_at(g.node(10, 7), ft, p, &m);
  ASSERT_TRUE(direct.has_value());
  EXPECT_LT(std::abs(*direct - g.image(10, 7)), 1e-12);
  EXPECT_EQ(m, g.orbit_index(10, 7));
}

TEST(FundamentalConjugacy, OrbitIndex) {
  EXPECT_EQ(fundamental_orbit_index(Complex(1.0, 1.0), 10.0, 2), 0);
  EXPECT_EQ(fundamental_orbit_index(Complex(1.0, 100.0), 10.0, 2), 0);
  EXPECT_EQ(fundamental_orbit_index(Complex(7.0, 100.0), 10.0, 2), 3);
  EXPECT_EQ(fundamental_orbit_index(Complex(-3.0, 100.0), 10.0, 2), -2);
}

TEST(FundamentalConjugacy, CsvExport) {
  const BlendParams p = make_blend_params(1, 1, 1);
  Map1D phi = [p](Complex z) { return model_phi(z, p); };
  GridSpec grid;
  grid.n_r = grid.n_theta = 8;
  const DiscreteConjugacy g = build_fundamental_conjugacy(phi, p, grid);
  const auto dir = std::filesystem::temp_directory_path() / "semihyp_sector_test";
  std::filesystem::create_directories(dir);
  write_gamma_csv(dir / "gamma.csv", g, conjugacy_residual(g, phi, phi));
  const Complex starts[] = {Complex(0.1, 0.05)};
  write_orbit_csv(dir / "orbits.csv", phi, starts, 5);
  std::ifstream a(dir / "gamma.csv"), b(dir / "orbits.csv");
  std::string ha, hb;
  std::getline(a, ha);
  std::getline(b, hb);
  EXPECT_NE(ha.find("re_z"), std::string::npos);
  EXPECT_NE(ha.find("residual"), std::string::npos);
  EXPECT_NE(hb.find("step"), std::string::npos);
  int lines = 0;
  for (std::string s; std::getline(a, s);) ++lines;
  EXPECT_EQ(lines, 64);
}
