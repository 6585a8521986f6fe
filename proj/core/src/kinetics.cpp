#include "tgqpt/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tgqpt {

std::string fit_model_name(FitModel m) {
  switch (m) {
    case FitModel::StretchedDecay: return "stretched_decay";
    case FitModel::ComplementRise: return "complement_rise";
    case FitModel::DampedOscillation: return "damped_oscillation";
    case FitModel::Constant: return "constant";
  }
  return "unknown";
}

double FitResult::ci95(std::size_t param) const {
  if (param >= param_names.size() ||
      covariance.rows() <= static_cast<Eigen::Index>(param)) {
    throw ValidationError("parameter index outside the fit");
  }
  const double var = covariance(param, param);
  return 1.96 * std::sqrt(std::max(var, 0.0));
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LmProblem {
  // Fills residuals (model - data) and the Jacobian d(residual)/d(theta).
  std::function<void(const VectorXd&, VectorXd&, MatrixXd&)> eval;
  int n_residuals = 0;
  VectorXd lower, upper;
};

struct LmOutcome {
  VectorXd theta;
  double rss = std::numeric_limits<double>::infinity();
  MatrixXd jtj;
  bool ok = false;
};

VectorXd clamp(const VectorXd& theta, const LmProblem& p) {
  return theta.cwiseMax(p.lower).cwiseMin(p.upper);
}

LmOutcome levenberg_marquardt(const LmProblem& p, VectorXd theta) {
  const int n_par = static_cast<int>(theta.size());
  theta = clamp(theta, p);
  VectorXd r(p.n_residuals);
  MatrixXd j(p.n_residuals, n_par);
  p.eval(theta, r, j);
  double rss = r.squaredNorm();
  if (!std::isfinite(rss)) return {};

  double lambda = 1e-3;
  for (int it = 0; it < 300; ++it) {
    const MatrixXd jtj = j.transpose() * j;
    const VectorXd g = j.transpose() * r;
    MatrixXd damped = jtj;
    for (int k = 0; k < n_par; ++k) {
      damped(k, k) += lambda * std::max(jtj(k, k), 1e-30);
    }
    const VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      lambda *= 10.0;
      if (lambda > 1e14) break;
      continue;
    }
    const VectorXd candidate = clamp(theta + step, p);
    VectorXd r_c(p.n_residuals);
    MatrixXd j_c(p.n_residuals, n_par);
    p.eval(candidate, r_c, j_c);
    const double rss_c = r_c.squaredNorm();
    if (std::isfinite(rss_c) && rss_c < rss) {
      const double improvement = rss - rss_c;
      const double step_size = (candidate - theta).norm();
      theta = candidate;
      r.swap(r_c);
      j.swap(j_c);
      rss = rss_c;
      lambda = std::max(lambda / 3.0, 1e-12);
      if (step_size < 1e-12 * (theta.norm() + 1e-12) ||
          improvement < 1e-18 * (rss + 1e-30)) {
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
  }
  LmOutcome out;
  out.theta = theta;
  out.rss = rss;
  out.jtj = j.transpose() * j;
  out.ok = std::isfinite(rss);
  return out;
}

MatrixXd covariance_from(const LmOutcome& fit, int n_residuals) {
  const int n_par = static_cast<int>(fit.theta.size());
  const int dof = std::max(n_residuals - n_par, 1);
  const double variance = fit.rss / dof;
  const MatrixXd inv = fit.jtj.completeOrthogonalDecomposition().pseudoInverse();
  return variance * inv;
}

// exp(-(T/tau)^beta) and its parameter derivatives; T = 0 maps to 1 with
// vanishing derivatives for beta > 0.
void stretched_value(double t, double tau, double beta, double& value,
                     double& d_tau, double& d_beta) {
  if (t <= 0.0) {
    value = 1.0;
    d_tau = 0.0;
    d_beta = 0.0;
    return;
  }
  const double ratio = t / tau;
  const double u = std::pow(ratio, beta);
  value = std::exp(-u);
  d_tau = value * u * beta / tau;
  d_beta = -value * u * std::log(ratio);
}

FitResult constant_fit(const std::vector<double>& series) {
  const double n = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double rss = 0.0;
  for (double v : series) rss += (v - mean) * (v - mean);
  FitResult out;
  out.model = FitModel::Constant;
  out.constant = mean;
  out.param_names = {"constant"};
  out.covariance = Eigen::MatrixXd::Constant(
      1, 1, series.size() > 1 ? rss / (n - 1.0) / n : 0.0);
  out.residual_rms = std::sqrt(rss / n);
  return out;
}

}  // namespace

FitResult fit_population(const std::vector<double>& series,
                         const WaitingTimeGrid& grid, FitModel form) {
  if (form != FitModel::StretchedDecay && form != FitModel::ComplementRise) {
    throw ValidationError("fit_population takes stretched_decay or complement_rise");
  }
  if (series.size() != grid.size()) {
    throw ValidationError("series length must match the grid");
  }
  if (series.size() < 8) {
    throw ValidationError("population fit needs at least 8 waiting times");
  }
  for (double v : series) {
    if (!(v >= -0.1 && v <= 1.1)) {
      throw ValidationError(
          "population values outside [-0.1, 1.1]; not a population series");
    }
  }

  const bool rise = form == FitModel::ComplementRise;
  const auto& t = grid.points();
  const int n = static_cast<int>(series.size());

  LmProblem problem;
  problem.n_residuals = n;
  problem.lower = (VectorXd(2) << 1e-3, 0.5).finished();
  problem.upper = (VectorXd(2) << 1e12, 5.0).finished();
  problem.eval = [&](const VectorXd& theta, VectorXd& r, MatrixXd& j) {
    const double tau = theta[0];
    const double beta = theta[1];
    for (int k = 0; k < n; ++k) {
      double value, d_tau, d_beta;
      stretched_value(t[k], tau, beta, value, d_tau, d_beta);
      if (rise) {
        r[k] = (1.0 - value) - series[k];
        j(k, 0) = -d_tau;
        j(k, 1) = -d_beta;
      } else {
        r[k] = value - series[k];
        j(k, 0) = d_tau;
        j(k, 1) = d_beta;
      }
    }
  };

  LmOutcome best;
  for (double tau0 : {50.0, 100.0, 200.0, 400.0}) {
    for (double beta0 : {1.0, 2.0, 3.0}) {
      const LmOutcome fit =
          levenberg_marquardt(problem, (VectorXd(2) << tau0, beta0).finished());
      if (fit.ok && fit.rss < best.rss) best = fit;
    }
  }
  if (!best.ok) {
    throw SolverError("population fit diverged from every start");
  }

  FitResult stretched;
  stretched.model = form;
  stretched.tau = best.theta[0];
  stretched.beta = best.theta[1];
  stretched.param_names = {"tau", "beta"};
  stretched.covariance = covariance_from(best, n);
  stretched.residual_rms = std::sqrt(best.rss / n);

  // A flat series is better described by a constant than by a degenerate
  // stretched exponential; compare residuals with a parameter-count penalty.
  const FitResult constant = constant_fit(series);
  const double guard = 1e-300;
  const double aic_stretched =
      n * std::log(std::max(best.rss, guard) / n) + 2.0 * 2;
  const double rss_const = constant.residual_rms * constant.residual_rms * n;
  const double aic_const = n * std::log(std::max(rss_const, guard) / n) + 2.0 * 1;
  return aic_const <= aic_stretched ? constant : stretched;
}

FitResult fit_coherence(const std::vector<Complex>& series,
                        const WaitingTimeGrid& grid) {
  if (series.size() != grid.size()) {
    throw ValidationError("series length must match the grid");
  }
  if (series.size() < 8) {
    throw ValidationError("coherence fit needs at least 8 waiting times");
  }
  double max_abs = 0.0, max_imag = 0.0;
  for (const Complex& v : series) {
    max_abs = std::max(max_abs, std::abs(v));
    max_imag = std::max(max_imag, std::abs(v.imag()));
  }
  if (max_abs == 0.0 || max_imag <= 1e-12 * max_abs) {
    throw ValidationError(
        "coherence fit requires complex data; the imaginary part carries the "
        "oscillation sign");
  }

  const auto& t = grid.points();
  const int n = static_cast<int>(series.size());

  // Initial frequency from the discrete Fourier peak over a grid four
  // times denser than the natural resolution, both signs scanned.
  double min_dt = std::numeric_limits<double>::infinity();
  for (int k = 1; k < n; ++k) min_dt = std::min(min_dt, t[k] - t[k - 1]);
  const double span = t[n - 1] - t[0];
  const double omega_max = M_PI / min_dt;
  const double d_omega = 2.0 * M_PI / (4.0 * span);
  double best_omega = 0.0, best_power = -1.0;
  std::vector<double> powers;
  for (double w = -omega_max; w <= omega_max + 0.5 * d_omega; w += d_omega) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += series[k] * std::polar(1.0, w * t[k]);
    }
    const double power = std::abs(acc);
    powers.push_back(power);
    if (power > best_power) {
      best_power = power;
      best_omega = w;
    }
  }
  std::nth_element(powers.begin(), powers.begin() + powers.size() / 2,
                   powers.end());
  const double floor = powers[powers.size() / 2];
  if (!(best_power > 3.0 * floor)) {
    throw SolverError("no spectral peak above the noise floor");
  }

  LmProblem problem;
  problem.n_residuals = 2 * n;
  problem.lower = (VectorXd(3) << -4.0 * omega_max, 1e-3, 0.5).finished();
  problem.upper = (VectorXd(3) << 4.0 * omega_max, 1e12, 5.0).finished();
  problem.eval = [&](const VectorXd& theta, VectorXd& r, MatrixXd& j) {
    const double w = theta[0];
    const double tau = theta[1];
    const double beta = theta[2];
    for (int k = 0; k < n; ++k) {
      double decay, d_tau, d_beta;
      stretched_value(t[k], tau, beta, decay, d_tau, d_beta);
      const Complex phase = std::polar(1.0, -w * t[k]);
      const Complex model = phase * decay;
      const Complex dm_dw = Complex{0.0, -t[k]} * model;
      const Complex dm_dtau = phase * d_tau;
      const Complex dm_dbeta = phase * d_beta;
      const Complex res = model - series[k];
      r[2 * k] = res.real();
      r[2 * k + 1] = res.imag();
      j(2 * k, 0) = dm_dw.real();
      j(2 * k + 1, 0) = dm_dw.imag();
      j(2 * k, 1) = dm_dtau.real();
      j(2 * k + 1, 1) = dm_dtau.imag();
      j(2 * k, 2) = dm_dbeta.real();
      j(2 * k + 1, 2) = dm_dbeta.imag();
    }
  };

  LmOutcome best;
  for (double tau0 : {50.0, 100.0, 200.0, 400.0, 4000.0}) {
    for (double beta0 : {1.0, 2.0, 3.0}) {
      const LmOutcome fit = levenberg_marquardt(
          problem, (VectorXd(3) << best_omega, tau0, beta0).finished());
      if (fit.ok && fit.rss < best.rss) best = fit;
    }
  }
  if (!best.ok) throw SolverError("coherence fit diverged from every start");

  FitResult out;
  out.model = FitModel::DampedOscillation;
  out.omega_bar = best.theta[0];
  out.tau = best.theta[1];
  out.beta = best.theta[2];
  out.param_names = {"omega_bar", "tau", "beta"};
  out.covariance = covariance_from(best, 2 * n);
  out.residual_rms = std::sqrt(best.rss / (2 * n));
  return out;
}

}  // namespace tgqpt
