#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tgqpt/common.hpp"
#include "tgqpt/grid.hpp"

namespace tgqpt {

enum class FitModel { StretchedDecay, ComplementRise, DampedOscillation, Constant };

std::string fit_model_name(FitModel m);

/// Result of a kinetics fit. Parameters and covariance are ordered as
/// param_names; 95% intervals come from the linearized covariance at the
/// optimum scaled by the residual variance.
struct FitResult {
  FitModel model = FitModel::Constant;
  double tau = 0.0;        // fs
  double beta = 0.0;
  double omega_bar = 0.0;  // rad/fs (DampedOscillation only)
  double constant = 0.0;   // Constant only
  std::vector<std::string> param_names;
  Eigen::MatrixXd covariance;
  double residual_rms = 0.0;

  /// Half-width of the 95% confidence interval of one parameter.
  double ci95(std::size_t param) const;
};

/// Fits a real population series to exp(-(T/tau)^beta) or its complement
/// 1 - exp(-(T/tau)^beta) by damped Gauss-Newton with analytic Jacobians,
/// multistart over tau in {50, 100, 200, 400} fs and beta in {1, 2, 3},
/// beta bounded to [0.5, 5]. A constant model is fitted alongside and
/// returned instead when its residual wins.
FitResult fit_population(const std::vector<double>& series,
                         const WaitingTimeGrid& grid, FitModel form);

/// Fits a complex coherence series to exp(-i wbar T) exp(-(T/tau)^beta),
/// real and imaginary residuals jointly; wbar starts from the discrete
/// Fourier peak of the series. Real-valued input is an error.
FitResult fit_coherence(const std::vector<Complex>& series,
                        const WaitingTimeGrid& grid);

}  // namespace tgqpt
