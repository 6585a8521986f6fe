#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "tgqpt/dipoles.hpp"
#include "tgqpt/forward.hpp"
#include "tgqpt/process.hpp"
#include "tgqpt/spectra.hpp"

namespace tgqpt {

/// The eight T = 0 normalized signal values. They are read off the data,
/// so F and H carry the minus sign of their excited-state-absorption
/// pathway (for real positive dipoles and unit overlap factors,
/// F = -mu_OO_O*mu_OO_I and H = -mu_II_I*mu_II_O). The block matrices
/// below are laid out for exactly this signed convention; the noiseless
/// forward round trip closes to machine precision.
struct CoefficientSet {
  Complex a, b, c, d, e, f, g, h;

  Complex by_letter(char letter) const;
  CoefficientSet with_scaled(char letter, double factor) const;
};

using SystemMatrix = Eigen::Matrix<Complex, 24, 16>;
using SignalVector = Eigen::Matrix<Complex, 24, 1>;

/// The block-diagonal linear model M X(T) = S(T): population blocks
/// M_OO = M_II (6x4 each) and the coherence block M_OI (12x8), 24
/// complex equations in 16 real unknowns.
struct InversionSystem {
  SystemMatrix M;
  CoefficientSet coefficients;
};

/// Divides each series by max(E_p) max(E_q) max(E_r) mu_pg mu_qg, the
/// per-triad preparation/detection scale, leaving coefficient-weighted
/// combinations of chi elements.
SignalSet normalize_signals(const SignalSet& raw, const PulsePair& pulses,
                            const DipoleSet& dipoles);

/// mu_Og / mu_Ig estimated from an absorption spectrum as
/// sqrt(A(w_Og) / A(w_Ig)), nearest-bin lookup.
double dipole_ratio_from_absorption(std::span<const double> frequency,
                                    std::span<const double> absorbance,
                                    const EnergyLevelScheme& scheme);

struct ExtractionResult {
  CoefficientSet coefficients;
  std::vector<std::string> warnings;
};

/// Reads the eight designated (triad, slot) entries at T = 0:
/// A<-OOO:w_Og, B<-IIO:w_Og, C<-OOI:w_Ig, D<-III:w_Ig, E<-IOI:w_Og,
/// F<-IOO:w_OO_I, G<-OIO:w_Ig, H<-OII:w_II_O. |A| or |D| vanishing is an
/// error (degenerate population block); a vanishing B is a warning.
ExtractionResult extract_coefficients(const SignalSet& normalized);

Eigen::Matrix<Complex, 6, 4> population_block(const CoefficientSet& c);
Eigen::Matrix<Complex, 12, 8> coherence_block(const CoefficientSet& c);
InversionSystem build_system(const CoefficientSet& c);

/// Stacks the 24 normalized series values at one waiting time in the
/// fixed row order: OOO, OOI, IIO, III, OIO, OII, IOO, IOI, each with its
/// three slots in (FinalIO, Population, FinalOI) order.
SignalVector assemble_signal_vector(const SignalSet& normalized,
                                    std::size_t t_index);

/// Flat row index of (triad, slot) in the signal vector.
int signal_row(const PulseTriad& triad, DetectionSlot slot);

/// Ratio of largest to smallest singular value; +inf when singular.
double condition_number(const Eigen::MatrixXcd& m);

struct SolveOptions {
  bool trace_constraint = true;   // chi_gg block PSD on top of Choi PSD
  double tolerance = 1e-9;        // primal/dual residual stop
  int max_iterations = 50000;
  double over_relaxation = 1.7;
};

struct SolveResult {
  ProcessMatrix chi;
  ProcessVector x = ProcessVector::Zero();
  double objective = 0.0;         // ||M x - S||_2^2
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = true;
  Eigen::Vector4d choi_eigenvalues = Eigen::Vector4d::Zero();
  double min_leakage_eigenvalue = 0.0;
};

/// Least squares min ||M X - S||_2^2 subject to complete positivity
/// (Choi PSD) and, optionally, the trace-nonincreasing leakage-block PSD
/// constraint. The 24 complex equations are expanded to 48 real ones and
/// solved by operator splitting: a prefactored linear prox step
/// alternating with eigenvalue-clipping projections onto each cone.
/// Non-convergence returns the best iterate with converged = false;
/// a rank-deficient M throws SolverError.
SolveResult solve_constrained(const SystemMatrix& M, const SignalVector& S,
                              const SolveOptions& options = {});

/// Independent per-T solves over the whole dataset, run on up to `jobs`
/// threads.
std::vector<SolveResult> solve_trajectory(const InversionSystem& system,
                                          const SignalSet& normalized,
                                          const SolveOptions& options = {},
                                          int jobs = 1);

}  // namespace tgqpt
