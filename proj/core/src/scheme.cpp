#include "tgqpt/scheme.hpp"

#include <cmath>
#include <sstream>

#include "tgqpt/dipoles.hpp"
#include "tgqpt/grid.hpp"

namespace tgqpt {

EnergyLevelScheme::EnergyLevelScheme(double w_Ig, double w_Og, double w_OO_I,
                                     double w_II_O, double min_separation)
    : w_Ig_(w_Ig), w_Og_(w_Og), w_OO_I_(w_OO_I), w_II_O_(w_II_O) {
  for (double w : {w_Ig, w_Og, w_OO_I, w_II_O}) {
    if (!std::isfinite(w) || w <= 0) {
      throw ValidationError("scheme frequencies must be finite and positive");
    }
  }
  if (!(w_Og > w_Ig)) throw ValidationError("scheme requires w_Og > w_Ig");
  if (!(w_OO_I > w_Og)) throw ValidationError("scheme requires w_OO_I > w_Og");
  if (!(w_II_O < w_Ig)) throw ValidationError("scheme requires w_II_O < w_Ig");
  const double freqs[4] = {w_II_O, w_Ig, w_Og, w_OO_I};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (std::abs(freqs[j] - freqs[i]) < min_separation) {
        std::ostringstream msg;
        msg << "scheme frequencies " << freqs[i] << " and " << freqs[j]
            << " are closer than the integration window width "
            << min_separation << " cm^-1";
        throw ValidationError(msg.str());
      }
    }
  }
}

EnergyLevelScheme EnergyLevelScheme::published() {
  const double w_Ig = 16635.0;
  const double w_Og = 17068.0;
  return {w_Ig, w_Og, 2 * w_Og - w_Ig, 2 * w_Ig - w_Og};
}

void DipoleSet::validate() const {
  if (mu_Ig != 1.0) {
    throw ValidationError("mu_Ig is the dipole unit and must equal 1");
  }
  for (double mu : {mu_Og, mu_II_I, mu_II_O, mu_OO_O, mu_OO_I, mu_IO_I, mu_IO_O}) {
    if (!std::isfinite(mu) || mu < 0) {
      throw ValidationError("dipole magnitudes must be finite and non-negative");
    }
  }
  for (const Complex& fv : {f_OO, f_II, f_OI, f_IO}) {
    if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag())) {
      throw ValidationError("overlap factors must be finite");
    }
  }
}

Complex DipoleSet::f(Exciton p, Exciton q) const {
  if (p == Exciton::O) return q == Exciton::O ? f_OO : f_OI;
  return q == Exciton::I ? f_II : f_IO;
}

DipoleSet DipoleSet::synthetic_default() {
  DipoleSet d;
  d.mu_Og = 1.1;
  d.mu_II_I = 1.0;
  d.mu_II_O = 0.85;
  d.mu_OO_O = 1.1;
  d.mu_OO_I = 0.05;
  d.mu_IO_I = 0.8;
  d.mu_IO_O = 0.75;
  return d;
}

WaitingTimeGrid::WaitingTimeGrid(std::vector<double> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("waiting-time grid is empty");
  if (points_.front() != 0.0) {
    throw ValidationError("waiting-time grid must start at exactly T = 0");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw ValidationError("waiting times must be strictly increasing");
    }
  }
  for (double t : points_) {
    if (!std::isfinite(t)) throw ValidationError("waiting times must be finite");
  }
}

WaitingTimeGrid WaitingTimeGrid::uniform(double t_max, int n) {
  if (n < 2 || !(t_max > 0)) {
    throw ValidationError("uniform grid needs n >= 2 and t_max > 0");
  }
  std::vector<double> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = t_max * i / (n - 1);
  pts[0] = 0.0;
  return WaitingTimeGrid(std::move(pts));
}

WaitingTimeGrid WaitingTimeGrid::published() { return uniform(510.0, 33); }

}  // namespace tgqpt
