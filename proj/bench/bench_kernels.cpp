// Serial reference kernels against their OpenMP versions. Each benchmark runs
// with arg 0 = serial, 1 = parallel; GMT_LAB_THREADS caps the thread count.

#include "gmtlab/measure.hpp"
#include "gmtlab/parallel.hpp"
#include "gmtlab/quadrature.hpp"
#include "gmtlab/verification.hpp"

#include <benchmark/benchmark.h>

using namespace gmtlab;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_MonteCarlo(benchmark::State& state) {
  const auto cone = ManifoldDescriptor::kp_cone();
  const auto f = scalar_integrand([](const Vec&) { return 1.0; });
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        monte_carlo_fallback(cone, {Vec::Zero(4), 0.8}, f, 400000, kDefaultSeed,
                             policy_of(state)));
  }
  label(state);
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Cubature(benchmark::State& state) {
  const auto s3 = ManifoldDescriptor::sphere(3, 1.0, 4);
  Vec z = Vec::Zero(4);
  z[3] = -1.0;
  const auto f = scalar_integrand([](const Vec&) { return 1.0; });
  QuadratureOptions opt;
  opt.rel_tol = 1e-11;
  opt.policy = policy_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_over_ball(s3, {z, 1.0}, f, opt));
  }
  label(state);
}
BENCHMARK(BM_Cubature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MassGrid(benchmark::State& state) {
  const MeasureSpec mu = builtin("kp_cone");
  const auto centers = default_centers(mu);
  QuadratureOptions opt;
  opt.rel_tol = 1e-10;
  opt.policy = policy_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_mass_grid(mu, centers, {0.25, 0.5, 1.0}, opt));
  }
  label(state);
}
BENCHMARK(BM_MassGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
