#include <benchmark/benchmark.h>

#include "gpt/instrument.hpp"
#include "gpt/lp.hpp"
#include "gpt/models.hpp"
#include "gpt/random_models.hpp"
#include "gpt/rng.hpp"
#include "gpt/thermo.hpp"

using namespace gpt;

namespace {

lp::LinearProgram random_feasible_program(int m, int n, Rng& rng) {
  Eigen::MatrixXd a(m, n);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) a(r, c) = rng.normal();
  }
  Eigen::VectorXd xstar(n);
  for (int c = 0; c < n; ++c) xstar(c) = rng.uniform();
  lp::LinearProgram p;
  p.A = a;
  p.b = a * xstar;
  return p;
}

void BM_lp_solve_random(benchmark::State& state) {
  Rng rng(1);
  const auto p = random_feasible_program(static_cast<int>(state.range(0)),
                                         static_cast<int>(state.range(1)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lp::solve(p));
  }
}
BENCHMARK(BM_lp_solve_random)->Args({10, 20})->Args({30, 60});

void BM_enumerate_square_bit_center(benchmark::State& state) {
  const auto space = make_square_bit();
  const State center(Eigen::Vector3d(0, 0, 1), space);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_pdp_decompositions(center, *space));
  }
}
BENCHMARK(BM_enumerate_square_bit_center);

void BM_enumerate_classical(benchmark::State& state) {
  const auto space = make_classical(static_cast<int>(state.range(0)));
  Rng rng(7);
  const State rho = random_simplex_state(space, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_pdp_decompositions(rho, *space));
  }
}
BENCHMARK(BM_enumerate_classical)->Arg(4)->Arg(6);

void BM_min_over_product_states(benchmark::State& state) {
  const auto& fx = load_omega_bar();
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_over_product_states(fx.op_e1, 1, 16,
                                                     static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_min_over_product_states)->Arg(10)->Arg(30);

void BM_eig_herm(benchmark::State& state) {
  Rng rng(3);
  const int d = static_cast<int>(state.range(0));
  Eigen::MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = std::complex<double>(rng.normal(), rng.normal());
  }
  const HermMat a(Eigen::MatrixXcd(0.5 * (m + m.adjoint())));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eig_herm(a));
  }
}
BENCHMARK(BM_eig_herm)->Arg(4)->Arg(8);

void BM_groenewold_majorizes(benchmark::State& state) {
  const auto space = make_classical(4);
  Rng rng(11);
  const auto t = random_classical_instrument(space, 4, rng);
  const auto s = coarse_grain(t, random_kernel(3, 4, rng));
  const State rho = random_simplex_state(space, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(groenewold_majorizes(t, s, rho));
  }
}
BENCHMARK(BM_groenewold_majorizes);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
