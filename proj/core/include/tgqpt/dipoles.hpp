#pragma once

#include "tgqpt/common.hpp"

namespace tgqpt {

/// Transition dipole magnitudes in units of mu_Ig, plus the complex
/// pulse-pair overlap factors f_pq. Magnitudes are real and non-negative
/// (excitonic states taken real), and mu_Ig = 1 by convention.
struct DipoleSet {
  double mu_Ig = 1.0;
  double mu_Og = 1.0;
  double mu_II_I = 1.0;
  double mu_II_O = 1.0;
  double mu_OO_O = 1.0;
  double mu_OO_I = 1.0;
  double mu_IO_I = 1.0;
  double mu_IO_O = 1.0;
  Complex f_OO{1.0, 0.0};
  Complex f_II{1.0, 0.0};
  Complex f_OI{1.0, 0.0};
  Complex f_IO{1.0, 0.0};

  /// Throws ValidationError unless mu_Ig == 1 and all magnitudes are
  /// finite and non-negative.
  void validate() const;

  /// g -> SEM dipole for one wall.
  double mu_g(Exciton e) const { return e == Exciton::O ? mu_Og : mu_Ig; }

  /// Overlap factor for the pump pair (p, q).
  Complex f(Exciton p, Exciton q) const;

  /// Defaults used for synthetic datasets. mu_Og = mu_OO_O = 1.1 and
  /// mu_II_I = 1; the combination-band dipole mu_OO_I is small so the
  /// coherence information is carried by the E/G/H rows rather than F.
  static DipoleSet synthetic_default();
};

}  // namespace tgqpt
