#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "tgqpt/inversion.hpp"

using namespace tgqpt;

TEST_SUITE("inversion") {

TEST_CASE("normalization with unit pulses and dipoles is the identity") {
  const auto data = synthetic::published_model_dataset();
  DipoleSet unit;  // all magnitudes 1
  PulsePair unit_pulses = data.pulses;
  unit_pulses[0].peak_amplitude = 1.0;
  unit_pulses[1].peak_amplitude = 1.0;
  const auto raw = synthesize_signals(data.chi, data.grid, unit, unit_pulses,
                                      data.scheme);
  const auto normalized = normalize_signals(raw, unit_pulses, unit);
  for (int flat = 0; flat < SignalSet::size(); ++flat) {
    CHECK(normalized.at(flat).series == raw.at(flat).series);
  }
}

TEST_CASE("normalization divides out the pulse and preparation scales") {
  const auto scheme = EnergyLevelScheme::published();
  const auto dipoles = DipoleSet::synthetic_default();
  PulsePair pulses = default_pulses(scheme);
  pulses[0].peak_amplitude = 2.5;
  pulses[1].peak_amplitude = 0.6;
  const auto grid = WaitingTimeGrid::published();
  const auto chi = model_chi(KineticsModel::published_defaults(), grid);
  const auto normalized = normalize_signals(
      synthesize_signals(chi, grid, dipoles, pulses, scheme), pulses, dipoles);
  // T = 0 values equal the coefficient formulas regardless of pulse scale.
  const auto ext = extract_coefficients(normalized);
  CHECK(ext.coefficients.a.real() == doctest::Approx(1.21).epsilon(1e-12));
  CHECK(ext.coefficients.d.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ext.coefficients.f.real() == doctest::Approx(-0.055).epsilon(1e-12));
  CHECK(ext.coefficients.h.real() == doctest::Approx(-0.85).epsilon(1e-12));
}

TEST_CASE("zero normalization denominator is rejected") {
  const auto data = synthetic::published_model_dataset();
  PulsePair broken = data.pulses;
  broken[0].peak_amplitude = 0.0;
  CHECK_THROWS_AS(normalize_signals(data.normalized, broken, data.dipoles),
                  ValidationError);
}

TEST_CASE("dipole ratio from a 4:1 absorption peak ratio is 2") {
  const auto scheme = EnergyLevelScheme::published();
  std::vector<double> freq, abs_spec;
  for (double w = 16000; w <= 17600; w += 5.0) {
    const double ui = (w - scheme.w_Ig()) / 150.0;
    const double uo = (w - scheme.w_Og()) / 150.0;
    freq.push_back(w);
    abs_spec.push_back(std::exp(-ui * ui) + 4.0 * std::exp(-uo * uo));
  }
  CHECK(dipole_ratio_from_absorption(freq, abs_spec, scheme) ==
        doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("coefficient extraction flags degenerate combinations") {
  // mu_IO_I = mu_Og makes B vanish: warning, not error.
  DipoleSet d = DipoleSet::synthetic_default();
  d.mu_IO_I = d.mu_Og;
  const auto scheme = EnergyLevelScheme::published();
  const auto pulses = default_pulses(scheme);
  const auto grid = WaitingTimeGrid::published();
  const auto chi = model_chi(KineticsModel::published_defaults(), grid);
  const auto normalized = normalize_signals(
      synthesize_signals(chi, grid, d, pulses, scheme), pulses, d);
  const auto ext = extract_coefficients(normalized);
  CHECK(std::abs(ext.coefficients.b) <= 1e-12);
  REQUIRE(ext.warnings.size() >= 1);
  CHECK(ext.warnings[0].find("B") != std::string::npos);

  // mu_OO_O = sqrt(2) mu_Og makes A vanish: the population block is lost.
  DipoleSet bad = DipoleSet::synthetic_default();
  bad.mu_OO_O = std::sqrt(2.0) * bad.mu_Og;
  const auto broken = normalize_signals(
      synthesize_signals(chi, grid, bad, pulses, scheme), pulses, bad);
  CHECK_THROWS_AS(extract_coefficients(broken), ValidationError);
}

TEST_CASE("block matrices follow the printed layout") {
  CoefficientSet ones{1, 1, 1, 1, 1, 1, 1, 1};
  const auto pop = population_block(ones);
  const Complex i{0, 1};
  // Second row: [A, B, 0, 0].
  CHECK(pop(1, 0) == Complex{1, 0});
  CHECK(pop(1, 1) == Complex{1, 0});
  CHECK(pop(1, 2) == Complex{0, 0});
  CHECK(pop(1, 3) == Complex{0, 0});
  // First row couples the conjugate coherence: [0, 0, G, -iG].
  CHECK(pop(0, 2) == Complex{1, 0});
  CHECK(pop(0, 3) == -i);

  const auto coh = coherence_block(ones);
  // Second row: [A, B, 0, 0, -iA, -iB, 0, 0].
  CHECK(coh(1, 0) == Complex{1, 0});
  CHECK(coh(1, 1) == Complex{1, 0});
  CHECK(coh(1, 4) == -i);
  CHECK(coh(1, 5) == -i);
  CHECK(coh(1, 2) == Complex{0, 0});
  // Eighth row is its conjugate-prepared partner: [A, B, 0, 0, iA, iB, 0, 0].
  CHECK(coh(7, 0) == Complex{1, 0});
  CHECK(coh(7, 4) == i);

  const auto system = build_system(ones);
  // Off-block entries are exactly zero and the two population blocks match.
  CHECK(system.M.block<6, 4>(0, 4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(system.M.block<6, 8>(0, 8).cwiseAbs().maxCoeff() == 0.0);
  CHECK(system.M.block<6, 4>(6, 0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(system.M.block<12, 8>(12, 0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((system.M.block<6, 4>(0, 0) - system.M.block<6, 4>(6, 4))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("signal vector ordering") {
  CHECK(signal_row(PulseTriad::from_name("OOO"), DetectionSlot::FinalIO) == 0);
  CHECK(signal_row(PulseTriad::from_name("OOO"), DetectionSlot::Population) == 1);
  CHECK(signal_row(PulseTriad::from_name("OOI"), DetectionSlot::FinalIO) == 3);
  CHECK(signal_row(PulseTriad::from_name("IIO"), DetectionSlot::FinalIO) == 6);
  CHECK(signal_row(PulseTriad::from_name("III"), DetectionSlot::Population) == 10);
  CHECK(signal_row(PulseTriad::from_name("OIO"), DetectionSlot::FinalIO) == 12);
  CHECK(signal_row(PulseTriad::from_name("OII"), DetectionSlot::FinalIO) == 15);
  CHECK(signal_row(PulseTriad::from_name("IOO"), DetectionSlot::FinalIO) == 18);
  CHECK(signal_row(PulseTriad::from_name("IOI"), DetectionSlot::FinalOI) == 23);
}

TEST_CASE("T = 0 signal vector carries exactly the eight coefficients") {
  const auto data = synthetic::published_model_dataset();
  const SignalVector s = assemble_signal_vector(data.normalized, 0);
  const auto ext = extract_coefficients(data.normalized);
  const auto& c = ext.coefficients;
  const std::array<std::pair<int, Complex>, 8> expected = {{
      {signal_row(PulseTriad::from_name("OOO"), DetectionSlot::Population), c.a},
      {signal_row(PulseTriad::from_name("IIO"), DetectionSlot::Population), c.b},
      {signal_row(PulseTriad::from_name("OOI"), DetectionSlot::Population), c.c},
      {signal_row(PulseTriad::from_name("III"), DetectionSlot::Population), c.d},
      {signal_row(PulseTriad::from_name("IOI"), DetectionSlot::FinalOI), c.e},
      {signal_row(PulseTriad::from_name("IOO"), DetectionSlot::FinalOI), c.f},
      {signal_row(PulseTriad::from_name("OIO"), DetectionSlot::FinalIO), c.g},
      {signal_row(PulseTriad::from_name("OII"), DetectionSlot::FinalIO), c.h},
  }};
  int nonzero = 0;
  for (int row = 0; row < 24; ++row) {
    if (std::abs(s[row]) > 1e-14) ++nonzero;
  }
  CHECK(nonzero == 8);
  for (const auto& [row, value] : expected) {
    CHECK(std::abs(s[row] - value) <= 1e-14);
  }
}

TEST_CASE("signal vector at tau_OO mixes A and B with weight 1/e") {
  const WaitingTimeGrid grid({0.0, 212.0, 510.0});
  const synthetic::Dataset data(
      model_chi(KineticsModel::published_defaults(), grid), 0.0, 1, grid);
  const auto c = extract_coefficients(data.normalized).coefficients;
  const SignalVector s = assemble_signal_vector(data.normalized, 1);
  const double e1 = std::exp(-1.0);
  const Complex expected = c.a * e1 + c.b * (1.0 - e1);
  const int row =
      signal_row(PulseTriad::from_name("OOO"), DetectionSlot::Population);
  CHECK(std::abs(s[row] - expected) <= 1e-12);
}

TEST_CASE("all-zero signals invert to the zero map") {
  const auto data = synthetic::published_model_dataset();
  const auto system = synthetic::system_for(data);
  const SolveResult r = solve_constrained(system.M, SignalVector::Zero());
  CHECK(r.x.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.converged);
  CHECK(r.chi.is_trace_nonincreasing());
}

TEST_CASE("noiseless round trip recovers every parameter") {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const synthetic::Dataset data(
        synthetic::random_cp_trajectory(WaitingTimeGrid::published(), rng));
    const auto system = synthetic::system_for(data);
    const auto results = solve_trajectory(system, data.normalized, {}, 2);
    for (std::size_t t = 0; t < data.grid.size(); ++t) {
      worst = std::max(worst, (results[t].x - data.chi[t].to_vector())
                                  .cwiseAbs()
                                  .maxCoeff());
      CHECK(results[t].converged);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("equal complex overlap factors drop out of the inversion") {
  // The overlap factor enters the T = 0 coefficients and the T > 0
  // signals identically, so a common complex value cancels.
  DipoleSet dipoles = DipoleSet::synthetic_default();
  dipoles.f_OO = dipoles.f_II = dipoles.f_OI = dipoles.f_IO = {0.8, 0.3};
  const auto scheme = EnergyLevelScheme::published();
  const auto pulses = default_pulses(scheme);
  const auto grid = WaitingTimeGrid::published();
  std::mt19937_64 rng(909);
  const auto chi = synthetic::random_cp_trajectory(grid, rng);
  const auto normalized = normalize_signals(
      synthesize_signals(chi, grid, dipoles, pulses, scheme), pulses, dipoles);
  const auto system =
      build_system(extract_coefficients(normalized).coefficients);
  const auto results = solve_trajectory(system, normalized, {}, 2);
  for (std::size_t t = 0; t < grid.size(); ++t) {
    CHECK((results[t].x - chi[t].to_vector()).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("zero signals assemble to the zero vector") {
  auto data = synthetic::published_model_dataset();
  SignalSet zeros = data.normalized;
  for (int flat = 0; flat < SignalSet::size(); ++flat) {
    for (Complex& v : zeros.at(flat).series) v = 0.0;
  }
  CHECK(assemble_signal_vector(zeros, 3).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(assemble_signal_vector(zeros, data.grid.size()),
                  ValidationError);
}

TEST_CASE("an unphysical population is clipped to the feasible set") {
  const auto data = synthetic::published_model_dataset();
  const auto system = synthetic::system_for(data);
  ProcessVector x = ProcessMatrix::identity().to_vector();
  x[0] = 1.05;  // chi_OOOO above the population bound
  const SignalVector s = system.M * x;
  const SolveResult r = solve_constrained(system.M, s);
  CHECK(r.converged);
  CHECK(r.x[0] <= 1.0 + 1e-9);
  CHECK(r.objective > 0.0);
  CHECK(r.chi.population_sum(Exciton::O) <= 1.0 + 1e-9);
  CHECK(r.choi_eigenvalues(0) >= -1e-9);

  // Positivity-only mode keeps the overshoot: the Choi stays PSD there.
  SolveOptions positivity_only;
  positivity_only.trace_constraint = false;
  const SolveResult loose = solve_constrained(system.M, s, positivity_only);
  CHECK(loose.x[0] == doctest::Approx(1.05).epsilon(1e-9));
}

TEST_CASE("returned solutions are feasible under heavy noise") {
  std::mt19937_64 seed_gen(7);
  for (int seed = 0; seed < 20; ++seed) {
    const auto data = synthetic::published_model_dataset(0.05, seed_gen());
    const auto system = synthetic::system_for(data);
    const auto results = solve_trajectory(system, data.normalized, {}, 2);
    for (const auto& r : results) {
      CHECK(r.converged);
      CHECK(r.choi_eigenvalues(0) >= -1e-9);
      CHECK(r.chi.population_sum(Exciton::O) <= 1.0 + 1e-9);
      CHECK(r.chi.population_sum(Exciton::I) <= 1.0 + 1e-9);
      CHECK(r.chi.population_sum(Exciton::O) >= -1e-9);
      CHECK(r.chi.population_sum(Exciton::I) >= -1e-9);
    }
  }
}

TEST_CASE("positivity-only mode still returns completely positive maps") {
  SolveOptions positivity_only;
  positivity_only.trace_constraint = false;
  const auto data = synthetic::published_model_dataset(0.05, 31);
  const auto system = synthetic::system_for(data);
  const auto results =
      solve_trajectory(system, data.normalized, positivity_only, 2);
  for (const auto& r : results) {
    CHECK(r.converged);
    CHECK(r.choi_eigenvalues(0) >= -1e-9);
  }
}

TEST_CASE("no feasible direction improves the constrained optimum") {
  const auto data = synthetic::published_model_dataset(0.03, 17);
  const auto system = synthetic::system_for(data);
  // A mid-trajectory point where constraints are active.
  const SignalVector s = assemble_signal_vector(data.normalized, 16);
  const SolveResult r = solve_constrained(system.M, s);
  REQUIRE(r.converged);

  Eigen::Matrix<double, 48, 16> a;
  a.topRows<24>() = system.M.real();
  a.bottomRows<24>() = system.M.imag();
  Eigen::Matrix<double, 48, 1> b;
  b.head<24>() = s.real();
  b.tail<24>() = s.imag();

  std::mt19937_64 rng(55);
  std::normal_distribution<double> g(0.0, 1.0);
  int feasible_directions = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ProcessVector d;
    for (int k = 0; k < 16; ++k) d[k] = g(rng);
    d *= 1e-4 / d.norm();
    const ProcessVector candidate = r.x + d;
    const ProcessMatrix chi = ProcessMatrix::from_vector(candidate);
    if (choi_from_process(chi).min_eigenvalue() < 0.0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> leak(chi.leakage_block());
    if (leak.eigenvalues()(0) < 0.0) continue;
    ++feasible_directions;
    const double objective = (a * candidate - b).squaredNorm();
    CHECK(objective >= r.objective - 1e-10);
  }
  // The sampling must actually exercise feasible moves.
  CHECK(feasible_directions > 0);
}

TEST_CASE("objective grows monotonically with injected noise") {
  const std::array<double, 4> levels = {0.0, 0.01, 0.02, 0.05};
  std::array<double, 4> mean_objective{};
  for (int seed = 1; seed <= 20; ++seed) {
    for (std::size_t li = 0; li < levels.size(); ++li) {
      const auto data = synthetic::published_model_dataset(levels[li], seed);
      const auto system = synthetic::system_for(data);
      const auto results = solve_trajectory(system, data.normalized, {}, 2);
      double total = 0.0;
      for (const auto& r : results) total += r.objective;
      mean_objective[li] += total / 20.0;
    }
  }
  CHECK(mean_objective[0] <= mean_objective[1]);
  CHECK(mean_objective[1] <= mean_objective[2]);
  CHECK(mean_objective[2] <= mean_objective[3]);
}

TEST_CASE("secular data invert to negligible nonsecular terms") {
  const auto data = synthetic::published_model_dataset();
  const auto system = synthetic::system_for(data);
  const auto results = solve_trajectory(system, data.normalized, {}, 2);
  double worst = 0.0;
  for (const auto& r : results) {
    for (int k : {2, 3, 6, 7, 8, 9, 11, 12, 13, 15}) {
      worst = std::max(worst, std::abs(r.x[k]));
    }
  }
  CHECK(worst < 0.01);
}

TEST_CASE("rank-deficient systems are rejected") {
  CoefficientSet degenerate{1, 0, 1, 0, 1, 1, 1, 1};  // B = D = 0
  const auto system = build_system(degenerate);
  CHECK_THROWS_AS(
      solve_constrained(system.M, SignalVector::Constant(Complex{1, 0})),
      SolverError);
}

TEST_CASE("condition number is scale invariant and singular-aware") {
  const auto data = synthetic::published_model_dataset();
  const auto system = synthetic::system_for(data);
  const double kappa = condition_number(system.M);
  CHECK(kappa == doctest::Approx(condition_number(7.5 * system.M)));
  CHECK(std::isfinite(kappa));
  CHECK(kappa < 100.0);

  Eigen::MatrixXcd singular = Eigen::MatrixXcd::Zero(3, 2);
  singular(0, 0) = 1.0;
  CHECK(std::isinf(condition_number(singular)));
}

TEST_CASE("condition number cross-checked against the brute-force oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXcd m = oracle::random_complex(5, 4, rng);
    const auto sv = oracle::singular_values(m);
    const double expected = sv.front() / sv.back();
    CHECK(condition_number(m) == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("orthogonal-column coefficient set has condition number sqrt(2)") {
  // A = D = F = H = 1 and B = C = E = G = 0 scales disjoint column
  // blocks by 1 or sqrt(2).
  CoefficientSet c{1, 0, 0, 1, 0, 1, 0, 1};
  const auto system = build_system(c);
  const auto sv = oracle::singular_values(system.M);
  CHECK(sv.front() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(sv.back() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(condition_number(system.M) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

}  // TEST_SUITE
