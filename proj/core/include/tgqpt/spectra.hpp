#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "tgqpt/common.hpp"
#include "tgqpt/grid.hpp"
#include "tgqpt/scheme.hpp"
#include "tgqpt/triad.hpp"

namespace tgqpt {

/// One frequency-resolved transient-grating spectrum: complex amplitude
/// on a (waiting time x emission frequency) grid, arbitrary signal units.
/// The frequency axis is uniform, ascending, with spacing <= 20 cm^-1 so
/// a sigma4 = 165 cm^-1 window holds at least 16 samples.
class TGSpectrum {
public:
  TGSpectrum(PulseTriad triad, std::vector<double> frequency_axis,
             WaitingTimeGrid waiting_times, Eigen::MatrixXcd values);

  const PulseTriad& triad() const { return triad_; }
  const std::vector<double>& frequency_axis() const { return freq_; }
  const WaitingTimeGrid& waiting_times() const { return grid_; }
  /// Rows index waiting times, columns index frequencies.
  const Eigen::MatrixXcd& values() const { return values_; }
  double spacing() const { return spacing_; }

private:
  PulseTriad triad_;
  std::vector<double> freq_;
  WaitingTimeGrid grid_;
  Eigen::MatrixXcd values_;
  double spacing_;
};

using SpectrumSet = std::array<TGSpectrum, 8>;  // canonical triad order

/// A window-integrated emission series: one complex amplitude per
/// waiting time, taken around omega4 (cm^-1).
struct IntegratedSignal {
  PulseTriad triad;
  double omega4 = 0.0;
  std::vector<Complex> series;
};

/// Trapezoidal integral of the spectrum over [omega4 - sigma4,
/// omega4 + sigma4], per waiting time. Window endpoints snap to the
/// nearest grid points; the raw window must lie inside the axis.
IntegratedSignal integrate_window(const TGSpectrum& spec, double omega4,
                                  double sigma4);

/// The 24 integrated series of one dataset, triad-major in canonical
/// triad order, slot-minor in (FinalIO, Population, FinalOI) order.
class SignalSet {
public:
  SignalSet(WaitingTimeGrid grid, std::array<IntegratedSignal, 24> signals);

  /// Integrates every (triad, slot) window of a spectrum set.
  static SignalSet integrate(const SpectrumSet& spectra,
                             const EnergyLevelScheme& scheme, double sigma4);

  const WaitingTimeGrid& grid() const { return grid_; }
  const IntegratedSignal& at(const PulseTriad& triad, DetectionSlot slot) const;
  const IntegratedSignal& at(int flat_index) const;
  IntegratedSignal& at(int flat_index);
  static constexpr int size() { return 24; }

  /// Largest |value| across all series; 0 for an all-zero set.
  double max_abs() const;

private:
  WaitingTimeGrid grid_;
  std::array<IntegratedSignal, 24> signals_;
};

struct LevelCrossCheck {
  std::string spectrum;   // triad name
  double peak;            // argmax frequency at T = 0
  double reference;       // scheme frequency it must sit near
  double deviation;       // |peak - reference|
};

struct LevelAssignment {
  EnergyLevelScheme scheme;
  std::array<LevelCrossCheck, 4> cross_checks;  // OOI, IIO, IOI, OIO
};

/// Self-consistent level assignment from the T = 0 peaks: w_Og from OOO,
/// w_Ig from III, w_OO_I from IOO, w_II_O from OII, then validation that
/// the four remaining spectra peak within sigma4 of their predicted
/// frequencies. Peak positions use |S(w, 0)|; a tied global maximum is an
/// error, as is any cross-check deviation beyond sigma4.
LevelAssignment assign_levels(const SpectrumSet& spectra,
                              double sigma4 = kDefaultSigma4);

struct ContributionRow {
  PulseTriad triad;
  std::array<double, 3> fraction{};        // per slot, sums to 1
  std::array<std::string, 3> reports_on{}; // chi elements behind each slot
  bool defined = true;                     // false for an all-zero triad
};

/// Normalized contribution of sum_T |signal|^2 per (triad, omega4),
/// annotated with the chi element(s) each window reports on.
std::array<ContributionRow, 8> contribution_table(const SignalSet& signals);

}  // namespace tgqpt
