#pragma once

#include <vector>

#include "tgqpt/inversion.hpp"

namespace tgqpt {

/// Scaling factors of the published sensitivity scan.
const std::vector<double>& default_scan_factors();

/// One-at-a-time coefficient perturbation scan. Each cell scales a single
/// coefficient, rebuilds the system matrix and re-solves every waiting
/// time against the unchanged signals.
struct ScanConfig {
  std::vector<char> coefficients = {'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H'};
  std::vector<double> factors = default_scan_factors();
  SolveOptions solve;
};

struct ScanCell {
  double error1 = 0.0;  // max over chi entries of the T-averaged |deviation|
  double error2 = 0.0;  // max over T of the entry-averaged |deviation|
  bool ok = true;       // false when the perturbed solve failed
};

struct ScanResult {
  std::vector<char> coefficients;
  std::vector<double> factors;
  std::vector<std::vector<ScanCell>> cells;  // [coefficient][factor]
};

/// Error measures between a baseline and a perturbed trajectory:
/// error1 = max_{ijqp} sum_T |chi - chi'| / n_T,
/// error2 = max_T sum_{ijqp} |chi - chi'| / 16,
/// both over all 16 index tuples with complex modulus. Divisors come from
/// the dataset (grid length) and the unknown-vector size.
ScanCell scan_errors(const std::vector<ProcessMatrix>& baseline,
                     const std::vector<ProcessMatrix>& perturbed);

/// Runs the scan grid. The baseline reconstruction is computed with the
/// same solver, so the factor-1 column is exactly zero. Failed cells are
/// reported as failed, never as zeros.
ScanResult scan(const CoefficientSet& baseline_coefficients,
                const SignalSet& normalized, const ScanConfig& config = {},
                int jobs = 1);

}  // namespace tgqpt
