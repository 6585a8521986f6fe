#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tgqpt/common.hpp"
#include "tgqpt/scheme.hpp"

namespace tgqpt {

/// Carrier assignment (p, q, r) of pulses 1, 2 and 3. Pulse 1 acts on the
/// bra and pulse 2 on the ket, so the pair (p, q) prepares |q><p| at the
/// start of the waiting time.
struct PulseTriad {
  Exciton p;
  Exciton q;
  Exciton r;

  /// The eight triads in their conventional listing order:
  /// OOO, OOI, III, IIO, OIO, OII, IOI, IOO.
  static const std::array<PulseTriad, 8>& all();

  std::string name() const;
  static PulseTriad from_name(std::string_view s);

  /// Position in all().
  int canonical_index() const;

  /// 1 when the pump pair prepares a population (p == q), else 0.
  double delta_qp() const { return p == q ? 1.0 : 0.0; }

  bool operator==(const PulseTriad&) const = default;
};

/// Role of each of the three emission windows of one spectrum, in the
/// row order of the signal vectors. Which frequency a slot sits at
/// depends on the third pulse:
///   FinalIO    detects chi_{IO,qp}:  w_Ig (r=O) or w_II_O (r=I)
///   Population detects chi_{OO,qp} and chi_{II,qp} (plus bleach and
///              recovery): w_Og (r=O) or w_Ig (r=I)
///   FinalOI    detects chi_{OI,qp}:  w_OO_I (r=O) or w_Og (r=I)
enum class DetectionSlot : int { FinalIO = 0, Population = 1, FinalOI = 2 };

inline constexpr std::array<DetectionSlot, 3> kDetectionSlots = {
    DetectionSlot::FinalIO, DetectionSlot::Population, DetectionSlot::FinalOI};

/// Emission frequency of a slot for a given third pulse.
double emission_frequency(const EnergyLevelScheme& scheme, Exciton r,
                          DetectionSlot slot);

/// Scheme-level name of that frequency ("w_Ig", "w_Og", "w_OO_I", "w_II_O").
std::string emission_name(Exciton r, DetectionSlot slot);

}  // namespace tgqpt
