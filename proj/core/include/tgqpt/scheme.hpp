#pragma once

#include "tgqpt/common.hpp"

namespace tgqpt {

/// Default half-width of an emission integration window, cm^-1.
inline constexpr double kDefaultSigma4 = 165.0;

/// The four distinct emission frequencies of the two-band ladder (cm^-1).
///
/// Degeneracies hold by construction: w_Ig = w_II_I = w_IO_O and
/// w_Og = w_OO_O = w_IO_I (doubly-excited energies are sums of the
/// single-exciton energies); the accessors for the degenerate names
/// return the stored SEM value. The four distinct frequencies must be
/// mutually separated by at least one full integration window (2*sigma4)
/// so that window integrals pick up single peaks.
class EnergyLevelScheme {
public:
  EnergyLevelScheme(double w_Ig, double w_Og, double w_OO_I, double w_II_O,
                    double min_separation = 2.0 * kDefaultSigma4);

  double w_Ig() const { return w_Ig_; }
  double w_Og() const { return w_Og_; }
  double w_OO_I() const { return w_OO_I_; }
  double w_II_O() const { return w_II_O_; }

  // Degenerate names.
  double w_II_I() const { return w_Ig_; }
  double w_IO_O() const { return w_Ig_; }
  double w_OO_O() const { return w_Og_; }
  double w_IO_I() const { return w_Og_; }

  /// g -> SEM transition frequency for one wall.
  double w_g(Exciton e) const { return e == Exciton::O ? w_Og_ : w_Ig_; }

  /// The published two-band scheme with harmonic doubly-excited energies:
  /// w_Ig = 16635, w_Og = 17068, w_OO_I = 2*w_Og - w_Ig, w_II_O = 2*w_Ig - w_Og.
  static EnergyLevelScheme published();

private:
  double w_Ig_, w_Og_, w_OO_I_, w_II_O_;
};

}  // namespace tgqpt
