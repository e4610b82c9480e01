#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

#include "semihyp/germ_jet.hpp"
#include "semihyp/normal_form.hpp"
#include "semihyp/spectrum.hpp"

using namespace semihyp;

namespace {

PolyJet random_poly(std::size_t n, int N, int min_degree, std::mt19937_64& rng) {
  std::normal_distribution<double> c(0.0, 0.3);
  PolyJet p(n, N);
  for (int d = min_degree; d <= N; ++d)
    for (const auto& m : monomials_of_degree(n, d)) p.set(m, Complex(c(rng), c(rng)));
  return p;
}

// Linear part diag(i, 0.5, 2, 0.4, ...), dense nonlinear terms.
GermJet random_germ(std::size_t n, int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PolyJet> comps;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex l = i == 0 ? Complex(0, 1) : Complex(i % 2 ? 0.5 : 2.0 + 0.1 * i, 0.05 * i);
    comps.push_back(PolyJet::variable(n, N, i, l) + random_poly(n, N, 2, rng));
  }
  return GermJet(std::move(comps));
}

void BM_Mul(benchmark::State& st) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(st.range(0));
  const int N = static_cast<int>(st.range(1));
  const PolyJet a = random_poly(n, N, 1, rng), b = random_poly(n, N, 1, rng);
  for (auto _ : st) benchmark::DoNotOptimize(mul(a, b));
}
BENCHMARK(BM_Mul)->Args({2, 10})->Args({3, 8})->Args({3, 12})->Args({4, 8});

void BM_Compose(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const int N = static_cast<int>(st.range(1));
  const GermJet f = random_germ(n, N, 2), g = random_germ(n, N, 3);
  for (auto _ : st) benchmark::DoNotOptimize(compose(f, g));
}
BENCHMARK(BM_Compose)->Args({2, 10})->Args({3, 8})->Args({3, 10});

void BM_Invert(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const int N = static_cast<int>(st.range(1));
  const GermJet f = random_germ(n, N, 4);
  for (auto _ : st) benchmark::DoNotOptimize(invert(f));
}
BENCHMARK(BM_Invert)->Args({2, 10})->Args({3, 8});

void BM_Normalize(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const int N = static_cast<int>(st.range(1));
  const GermJet f = random_germ(n, N, 5);
  const SpectralData s = analyze_linear_part(f.linear_part());
  for (auto _ : st) benchmark::DoNotOptimize(normalize_first_coordinate(f, s));
}
BENCHMARK(BM_Normalize)->Args({2, 8})->Args({2, 12})->Args({3, 8});

}  // namespace
BENCHMARK_MAIN();
