#include <benchmark/benchmark.h>

#include <random>

#include "tgqpt/forward.hpp"
#include "tgqpt/inversion.hpp"
#include "tgqpt/sensitivity.hpp"

using namespace tgqpt;

namespace {

struct Fixture {
  EnergyLevelScheme scheme = EnergyLevelScheme::published();
  DipoleSet dipoles = DipoleSet::synthetic_default();
  PulsePair pulses = default_pulses(scheme);
  WaitingTimeGrid grid = WaitingTimeGrid::published();
  std::vector<ProcessMatrix> chi = model_chi(KineticsModel::published_defaults(), grid);
  SignalSet normalized = normalize_signals(
      synthesize_signals(chi, grid, dipoles, pulses, scheme), pulses, dipoles);
  InversionSystem system =
      build_system(extract_coefficients(normalized).coefficients);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_SynthesizeSignals(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        synthesize_signals(f.chi, f.grid, f.dipoles, f.pulses, f.scheme));
  }
}
BENCHMARK(BM_SynthesizeSignals);

void BM_SpreadAndIntegrate(benchmark::State& state) {
  const Fixture& f = fixture();
  const SignalSet raw =
      synthesize_signals(f.chi, f.grid, f.dipoles, f.pulses, f.scheme);
  for (auto _ : state) {
    const SpectrumSet spectra = spread_to_spectra(raw, f.scheme, 100.0);
    benchmark::DoNotOptimize(
        SignalSet::integrate(spectra, f.scheme, kDefaultSigma4));
  }
}
BENCHMARK(BM_SpreadAndIntegrate);

void BM_SolveFeasiblePoint(benchmark::State& state) {
  const Fixture& f = fixture();
  const SignalVector s = assemble_signal_vector(f.normalized, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_constrained(f.system.M, s));
  }
}
BENCHMARK(BM_SolveFeasiblePoint);

void BM_SolveProjectedPoint(benchmark::State& state) {
  // 5% noise pushes the unconstrained optimum outside the cone and
  // exercises the splitting iteration.
  const Fixture& f = fixture();
  const SignalSet noisy = add_noise(f.normalized, 0.05, 11);
  const SignalVector s = assemble_signal_vector(noisy, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_constrained(f.system.M, s));
  }
}
BENCHMARK(BM_SolveProjectedPoint);

void BM_SolveTrajectory(benchmark::State& state) {
  const Fixture& f = fixture();
  const SignalSet noisy = add_noise(f.normalized, 0.01, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_trajectory(f.system, noisy, {}, 1));
  }
}
BENCHMARK(BM_SolveTrajectory);

void BM_ConditionNumber(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(condition_number(f.system.M));
  }
}
BENCHMARK(BM_ConditionNumber);

void BM_ScanCell(benchmark::State& state) {
  const Fixture& f = fixture();
  const auto coeffs = extract_coefficients(f.normalized).coefficients;
  ScanConfig config;
  config.coefficients = {'D'};
  config.factors = {-1.6};
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan(coeffs, f.normalized, config, 1));
  }
}
BENCHMARK(BM_ScanCell);

}  // namespace

BENCHMARK_MAIN();
