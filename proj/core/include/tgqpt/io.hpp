#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tgqpt/forward.hpp"
#include "tgqpt/inversion.hpp"
#include "tgqpt/spectra.hpp"

namespace tgqpt {

/// Doubles in machine files carry 17 significant digits.
std::string format_g17(double v);

/// Spectrum CSV, one file per triad:
///   # triad=OOO
///   # n_freq=<int>
///   # n_T=<int>
///   <frequency axis row, cm^-1>
///   <T_fs>,<re>,<im>,<re>,<im>,...   (one row per waiting time)
void write_spectrum_csv(const std::filesystem::path& file,
                        const TGSpectrum& spectrum);
TGSpectrum read_spectrum_csv(const std::filesystem::path& file);

/// Reads/writes <dir>/<triad>.csv for all eight triads.
SpectrumSet read_spectrum_set(const std::filesystem::path& dir);
void write_spectrum_set(const std::filesystem::path& dir,
                        const SpectrumSet& spectra);

/// Integrated signal table: header then one row per
/// (triad, slot, waiting time): triad,slot,omega4_cm1,T_fs,re,im.
void write_signals_csv(const std::filesystem::path& file,
                       const SignalSet& signals);
SignalSet read_signals_csv(const std::filesystem::path& file);

/// Everything needed to regenerate and reduce a synthetic dataset.
struct DatasetManifest {
  EnergyLevelScheme scheme = EnergyLevelScheme::published();
  DipoleSet dipoles = DipoleSet::synthetic_default();
  PulsePair pulses = default_pulses(EnergyLevelScheme::published());
  KineticsModel kinetics = KineticsModel::published_defaults();
  WaitingTimeGrid grid = WaitingTimeGrid::published();
  double lineshape_fwhm = 100.0;
  double sigma4 = kDefaultSigma4;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

void write_manifest(const std::filesystem::path& file,
                    const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& file);

/// A chi(T) trajectory as 16 real parameters per waiting time. Both the
/// simulator's ground-truth file and the inversion output parse into this.
struct ChiTrajectory {
  WaitingTimeGrid grid = WaitingTimeGrid::published();
  std::vector<ProcessVector> x;

  std::vector<ProcessMatrix> matrices() const;
};

void write_chi_truth_json(const std::filesystem::path& file,
                          const ChiTrajectory& trajectory);

/// Inversion output: per T the 16 unknowns, Choi eigenvalues, objective,
/// residuals and iteration count, plus the condition number, constraint
/// mode and extracted coefficients.
void write_inversion_json(const std::filesystem::path& file,
                          const WaitingTimeGrid& grid,
                          const std::vector<SolveResult>& results,
                          double kappa, bool trace_constraint,
                          const CoefficientSet& coefficients);

ChiTrajectory read_chi_json(const std::filesystem::path& file);

/// Flat plotting table: T_fs,entry,re,im.
void write_chi_csv(const std::filesystem::path& file,
                   const ChiTrajectory& trajectory);

void write_scheme_json(const std::filesystem::path& file,
                       const LevelAssignment& assignment);

void write_contribution_csv(const std::filesystem::path& file,
                            const std::array<ContributionRow, 8>& table);

void write_coefficients_json(const std::filesystem::path& file,
                             const CoefficientSet& coefficients);
CoefficientSet read_coefficients_json(const std::filesystem::path& file);

}  // namespace tgqpt
