#include "tgqpt/sensitivity.hpp"

#include <cmath>

namespace tgqpt {

const std::vector<double>& default_scan_factors() {
  static const std::vector<double> factors = {-10.0, -4.0, -1.6, -0.6, -0.25,
                                              -0.1,  0.1,  0.25, 0.6,  1.0,
                                              1.6,   4.0,  10.0};
  return factors;
}

ScanCell scan_errors(const std::vector<ProcessMatrix>& baseline,
                     const std::vector<ProcessMatrix>& perturbed) {
  if (baseline.size() != perturbed.size() || baseline.empty()) {
    throw ValidationError("trajectories must have equal nonzero length");
  }
  const double n_t = static_cast<double>(baseline.size());
  const double n_entries =
      static_cast<double>(baseline.front().to_vector().size());

  ScanCell cell;
  double worst_entry = 0.0;
  std::vector<double> per_t(baseline.size(), 0.0);
  for (Exciton i : {Exciton::O, Exciton::I}) {
    for (Exciton j : {Exciton::O, Exciton::I}) {
      for (Exciton q : {Exciton::O, Exciton::I}) {
        for (Exciton p : {Exciton::O, Exciton::I}) {
          double sum_t = 0.0;
          for (std::size_t k = 0; k < baseline.size(); ++k) {
            const double dev =
                std::abs(baseline[k](i, j, q, p) - perturbed[k](i, j, q, p));
            sum_t += dev;
            per_t[k] += dev;
          }
          worst_entry = std::max(worst_entry, sum_t);
        }
      }
    }
  }
  cell.error1 = worst_entry / n_t;
  double worst_t = 0.0;
  for (double v : per_t) worst_t = std::max(worst_t, v);
  cell.error2 = worst_t / n_entries;
  return cell;
}

namespace {

std::vector<ProcessMatrix> solved_matrices(const InversionSystem& system,
                                           const SignalSet& normalized,
                                           const SolveOptions& options) {
  const auto results = solve_trajectory(system, normalized, options, 1);
  std::vector<ProcessMatrix> out;
  out.reserve(results.size());
  for (const auto& r : results) {
    if (!r.converged) {
      throw SolverError("perturbed inversion did not converge");
    }
    out.push_back(r.chi);
  }
  return out;
}

}  // namespace

ScanResult scan(const CoefficientSet& baseline_coefficients,
                const SignalSet& normalized, const ScanConfig& config,
                int jobs) {
  if (config.coefficients.empty() || config.factors.empty()) {
    throw ValidationError("scan needs at least one coefficient and factor");
  }
  const std::vector<ProcessMatrix> baseline = solved_matrices(
      build_system(baseline_coefficients), normalized, config.solve);

  ScanResult result;
  result.coefficients = config.coefficients;
  result.factors = config.factors;
  result.cells.assign(config.coefficients.size(),
                      std::vector<ScanCell>(config.factors.size()));

  const std::size_t n_cells =
      config.coefficients.size() * config.factors.size();
  parallel_for_index(n_cells, jobs, [&](std::size_t flat) {
    const std::size_t ci = flat / config.factors.size();
    const std::size_t fi = flat % config.factors.size();
    ScanCell& cell = result.cells[ci][fi];
    try {
      const CoefficientSet scaled = baseline_coefficients.with_scaled(
          config.coefficients[ci], config.factors[fi]);
      const auto perturbed =
          solved_matrices(build_system(scaled), normalized, config.solve);
      cell = scan_errors(baseline, perturbed);
    } catch (const SolverError&) {
      cell.ok = false;
      cell.error1 = std::nan("");
      cell.error2 = std::nan("");
    }
  });
  return result;
}

}  // namespace tgqpt
