#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tgqpt/dipoles.hpp"
#include "tgqpt/process.hpp"
#include "tgqpt/spectra.hpp"

namespace tgqpt {

/// Narrowband Gaussian excitation pulse, amplitude profile in field units.
struct PulseSpectrum {
  Exciton label = Exciton::O;
  double center = 0.0;          // cm^-1
  double fwhm = 0.0;            // cm^-1
  double peak_amplitude = 1.0;  // > 0

  double amplitude(double w) const;

  /// Throws unless the pulse is selective: amplitude at the other SEM
  /// transition below 1% of peak.
  void validate_narrowband(const EnergyLevelScheme& scheme) const;

  static PulseSpectrum default_for(Exciton e, const EnergyLevelScheme& scheme);
};

/// Pulse shapes indexed by carrier label (O first).
using PulsePair = std::array<PulseSpectrum, 2>;

PulsePair default_pulses(const EnergyLevelScheme& scheme);

/// Parameters of the synthetic chi(T) trajectory:
///   chi_OOOO(T) = exp(-(T/tau_OO)^beta_OO)
///   chi_IIOO(T) = 1 - chi_OOOO(T)
///   chi_IIII(T) = chi_IIII_const, chi_OOII(T) = 0
///   chi_OIOI(T) = exp(-i wbar_OI T) exp(-(T/tau_OI)^beta_OI)
///   nonsecular entries = nonsecular_amplitude
/// At T = 0 the exact identity process is emitted regardless.
struct KineticsModel {
  double tau_OO = 212.0;       // fs
  double beta_OO = 3.3;
  double omega_bar_OI = 0.0;   // rad/fs; published_defaults() sets 2*pi/70
  double tau_OI = 200.0;       // fs
  double beta_OI = 2.0;
  double chi_IIII_const = 1.0;       // in [0, 1]
  double nonsecular_amplitude = 0.0; // >= 0, 0 = secular dynamics

  void validate() const;

  /// Table-1 center values: tau_OO 212 fs, beta_OO 3.3, period 70 fs,
  /// tau_OI 200 fs, beta_OI 2, chi_IIII 1, secular.
  static KineticsModel published_defaults();
};

std::vector<ProcessMatrix> model_chi(const KineticsModel& model,
                                     const WaitingTimeGrid& grid);

/// Generative model for the 24 integrated signals: stimulated emission,
/// excited-state absorption, ground-state bleach and recovery pathways,
/// with the recovery population tied to the exciton populations so the
/// total stays normalized. The chi trajectory must be trace-nonincreasing.
SignalSet synthesize_signals(const std::vector<ProcessMatrix>& chi,
                             const WaitingTimeGrid& grid,
                             const DipoleSet& dipoles,
                             const PulsePair& pulses,
                             const EnergyLevelScheme& scheme);

/// Frequency axis with spacing (w_Og - w_Ig)/32 on which all four scheme
/// frequencies fall exactly on grid points, padded 30 bins on each side.
std::vector<double> default_frequency_axis(const EnergyLevelScheme& scheme);

/// Spreads each integrated amplitude under a Gaussian lineshape of the
/// given FWHM, normalized by its analytic mass inside the sigma4 window
/// so that integrate_window reproduces the amplitudes. The FWHM must not
/// exceed the 330 cm^-1 peak separation.
SpectrumSet spread_to_spectra(const SignalSet& signals,
                              const EnergyLevelScheme& scheme,
                              double lineshape_fwhm,
                              double sigma4 = kDefaultSigma4,
                              std::vector<double> frequency_axis = {});

/// synthesize_signals followed by spread_to_spectra.
SpectrumSet synthesize_spectra(const std::vector<ProcessMatrix>& chi,
                               const WaitingTimeGrid& grid,
                               const DipoleSet& dipoles,
                               const PulsePair& pulses,
                               const EnergyLevelScheme& scheme,
                               double lineshape_fwhm,
                               double sigma4 = kDefaultSigma4);

/// Adds i.i.d. complex Gaussian noise with sqrt(E|n|^2) equal to
/// relative_sigma times the largest signal magnitude in the set.
/// Deterministic per seed.
SignalSet add_noise(const SignalSet& signals, double relative_sigma,
                    std::uint64_t seed);

}  // namespace tgqpt
