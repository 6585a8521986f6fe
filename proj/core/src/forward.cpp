#include "tgqpt/forward.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tgqpt/units.hpp"

namespace tgqpt {

double PulseSpectrum::amplitude(double w) const {
  const double u = (w - center) / fwhm;
  return peak_amplitude * std::exp(-4.0 * M_LN2 * u * u);
}

void PulseSpectrum::validate_narrowband(const EnergyLevelScheme& scheme) const {
  if (!(fwhm > 0) || !(peak_amplitude > 0)) {
    throw ValidationError("pulse needs positive fwhm and peak amplitude");
  }
  const double other_line = scheme.w_g(other(label));
  if (amplitude(other_line) >= 0.01 * peak_amplitude) {
    std::ostringstream msg;
    msg << "pulse " << to_char(label) << " is not selective: amplitude at "
        << other_line << " cm^-1 is " << amplitude(other_line) / peak_amplitude
        << " of peak (limit 0.01)";
    throw ValidationError(msg.str());
  }
}

PulseSpectrum PulseSpectrum::default_for(Exciton e,
                                         const EnergyLevelScheme& scheme) {
  return {e, scheme.w_g(e), 200.0, 1.0};
}

PulsePair default_pulses(const EnergyLevelScheme& scheme) {
  return {PulseSpectrum::default_for(Exciton::O, scheme),
          PulseSpectrum::default_for(Exciton::I, scheme)};
}

void KineticsModel::validate() const {
  if (!(tau_OO > 0) || !(tau_OI > 0)) {
    throw ValidationError("kinetics: decay times must be positive");
  }
  if (!(beta_OO > 0) || !(beta_OI > 0)) {
    throw ValidationError("kinetics: stretching exponents must be positive");
  }
  if (!(chi_IIII_const >= 0.0 && chi_IIII_const <= 1.0)) {
    throw ValidationError("kinetics: chi_IIII_const must lie in [0, 1]");
  }
  if (!(nonsecular_amplitude >= 0.0)) {
    throw ValidationError("kinetics: nonsecular_amplitude must be >= 0");
  }
  if (!std::isfinite(omega_bar_OI)) {
    throw ValidationError("kinetics: omega_bar_OI must be finite");
  }
}

KineticsModel KineticsModel::published_defaults() {
  KineticsModel m;
  m.omega_bar_OI = 2.0 * M_PI / 70.0;
  return m;
}

std::vector<ProcessMatrix> model_chi(const KineticsModel& model,
                                     const WaitingTimeGrid& grid) {
  model.validate();
  std::vector<ProcessMatrix> out;
  out.reserve(grid.size());
  for (double t : grid.points()) {
    if (t == 0.0) {
      out.push_back(ProcessMatrix::identity());
      continue;
    }
    ProcessVector x = ProcessVector::Zero();
    const double survive = std::exp(-std::pow(t / model.tau_OO, model.beta_OO));
    x[0] = survive;
    x[1] = 1.0 - survive;
    x[4] = 0.0;
    x[5] = model.chi_IIII_const;
    const double coherence_mag =
        std::exp(-std::pow(t / model.tau_OI, model.beta_OI));
    x[10] = coherence_mag * std::cos(model.omega_bar_OI * t);
    x[14] = -coherence_mag * std::sin(model.omega_bar_OI * t);
    x[2] = x[6] = x[8] = x[9] = x[11] = model.nonsecular_amplitude;
    out.push_back(ProcessMatrix::from_vector(x));
  }
  return out;
}

namespace {

// Detection-side pathway sum for one emission slot, given the chi elements
// reached from the initial |q><p|. Stimulated emission and bleach add,
// excited-state absorption and ground-state recovery subtract; the
// recovery population follows from total-population conservation.
Complex detection_amplitude(const ProcessMatrix& chi, const DipoleSet& d,
                            const PulseTriad& triad, DetectionSlot slot) {
  const Exciton q = triad.q;
  const Exciton p = triad.p;
  const Complex chi_io = chi(Exciton::I, Exciton::O, q, p);
  const Complex chi_oi = chi(Exciton::O, Exciton::I, q, p);
  const Complex chi_oo = chi(Exciton::O, Exciton::O, q, p);
  const Complex chi_ii = chi(Exciton::I, Exciton::I, q, p);
  const double delta = triad.delta_qp();
  const Complex chi_gg = delta - chi_oo - chi_ii;

  if (triad.r == Exciton::O) {
    switch (slot) {
      case DetectionSlot::FinalIO:
        return (d.mu_Og * d.mu_Ig - d.mu_IO_I * d.mu_IO_O) * chi_io;
      case DetectionSlot::Population:
        return d.mu_Og * d.mu_Og * (delta - chi_gg + chi_oo) -
               d.mu_OO_O * d.mu_OO_O * chi_oo - d.mu_IO_I * d.mu_IO_I * chi_ii;
      case DetectionSlot::FinalOI:
        return -d.mu_OO_O * d.mu_OO_I * chi_oi;
    }
  } else {
    switch (slot) {
      case DetectionSlot::FinalIO:
        return -d.mu_II_I * d.mu_II_O * chi_io;
      case DetectionSlot::Population:
        return d.mu_Ig * d.mu_Ig * (delta - chi_gg + chi_ii) -
               d.mu_II_I * d.mu_II_I * chi_ii - d.mu_IO_O * d.mu_IO_O * chi_oo;
      case DetectionSlot::FinalOI:
        return (d.mu_Ig * d.mu_Og - d.mu_IO_O * d.mu_IO_I) * chi_oi;
    }
  }
  throw ValidationError("unreachable: unknown detection slot");
}

}  // namespace

SignalSet synthesize_signals(const std::vector<ProcessMatrix>& chi,
                             const WaitingTimeGrid& grid,
                             const DipoleSet& dipoles, const PulsePair& pulses,
                             const EnergyLevelScheme& scheme) {
  dipoles.validate();
  if (chi.size() != grid.size()) {
    throw ValidationError("chi trajectory length must match the grid");
  }
  for (const PulseSpectrum& pulse : pulses) pulse.validate_narrowband(scheme);
  for (std::size_t k = 0; k < chi.size(); ++k) {
    if (!chi[k].is_trace_nonincreasing()) {
      std::ostringstream msg;
      msg << "chi trajectory violates trace-nonincreasing populations at T = "
          << grid[k] << " fs";
      throw ValidationError(msg.str());
    }
  }

  std::array<IntegratedSignal, 24> signals;
  for (const PulseTriad& triad : PulseTriad::all()) {
    const Complex prefactor =
        dipoles.f(triad.p, triad.q) *
        pulses[index_of(triad.p)].peak_amplitude *
        pulses[index_of(triad.q)].peak_amplitude *
        pulses[index_of(triad.r)].peak_amplitude * dipoles.mu_g(triad.p) *
        dipoles.mu_g(triad.q);
    for (DetectionSlot slot : kDetectionSlots) {
      IntegratedSignal sig;
      sig.triad = triad;
      sig.omega4 = emission_frequency(scheme, triad.r, slot);
      sig.series.resize(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        sig.series[k] =
            prefactor * detection_amplitude(chi[k], dipoles, triad, slot);
      }
      signals[triad.canonical_index() * 3 + static_cast<int>(slot)] =
          std::move(sig);
    }
  }
  return SignalSet(grid, std::move(signals));
}

std::vector<double> default_frequency_axis(const EnergyLevelScheme& scheme) {
  const double gap = scheme.w_Og() - scheme.w_Ig();
  int divisions = 32;
  while (gap / divisions > 18.0) divisions *= 2;
  const double h = gap / divisions;
  const int margin = 30;
  const double start = scheme.w_II_O() - margin * h;
  const double end = scheme.w_OO_I() + margin * h;
  const int n = static_cast<int>(std::lround((end - start) / h)) + 1;
  std::vector<double> axis(n);
  for (int k = 0; k < n; ++k) axis[k] = start + k * h;
  return axis;
}

SpectrumSet spread_to_spectra(const SignalSet& signals,
                              const EnergyLevelScheme& scheme,
                              double lineshape_fwhm, double sigma4,
                              std::vector<double> frequency_axis) {
  if (!(lineshape_fwhm > 0)) {
    throw ValidationError("lineshape fwhm must be positive");
  }
  if (lineshape_fwhm > 2.0 * kDefaultSigma4) {
    throw ValidationError(
        "lineshape fwhm above 330 cm^-1; emission peaks would overlap");
  }
  if (frequency_axis.empty()) frequency_axis = default_frequency_axis(scheme);

  const double sigma_g = lineshape_fwhm / (2.0 * std::sqrt(2.0 * M_LN2));
  const double window_mass = std::erf(sigma4 / (sigma_g * std::sqrt(2.0)));
  const double norm = 1.0 / (sigma_g * std::sqrt(2.0 * M_PI) * window_mass);

  const WaitingTimeGrid& grid = signals.grid();
  const auto n_t = static_cast<Eigen::Index>(grid.size());
  const auto n_f = static_cast<Eigen::Index>(frequency_axis.size());

  std::vector<TGSpectrum> spectra;
  spectra.reserve(8);
  for (const PulseTriad& triad : PulseTriad::all()) {
    Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(n_t, n_f);
    for (DetectionSlot slot : kDetectionSlots) {
      const IntegratedSignal& sig = signals.at(triad, slot);
      for (Eigen::Index fi = 0; fi < n_f; ++fi) {
        const double dw = frequency_axis[fi] - sig.omega4;
        const double shape = norm * std::exp(-dw * dw / (2.0 * sigma_g * sigma_g));
        if (shape < 1e-300) continue;  // flush subnormal tails to zero
        for (Eigen::Index ti = 0; ti < n_t; ++ti) {
          values(ti, fi) += sig.series[ti] * shape;
        }
      }
    }
    spectra.emplace_back(triad, frequency_axis, grid, std::move(values));
  }
  return {spectra[0], spectra[1], spectra[2], spectra[3],
          spectra[4], spectra[5], spectra[6], spectra[7]};
}

SpectrumSet synthesize_spectra(const std::vector<ProcessMatrix>& chi,
                               const WaitingTimeGrid& grid,
                               const DipoleSet& dipoles,
                               const PulsePair& pulses,
                               const EnergyLevelScheme& scheme,
                               double lineshape_fwhm, double sigma4) {
  return spread_to_spectra(
      synthesize_signals(chi, grid, dipoles, pulses, scheme), scheme,
      lineshape_fwhm, sigma4);
}

SignalSet add_noise(const SignalSet& signals, double relative_sigma,
                    std::uint64_t seed) {
  if (!(relative_sigma >= 0)) {
    throw ValidationError("relative noise level must be >= 0");
  }
  if (relative_sigma == 0.0) return signals;
  const double sigma = relative_sigma * signals.max_abs();
  SignalSet out = signals;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double component_sigma = sigma / std::sqrt(2.0);
  for (int flat = 0; flat < SignalSet::size(); ++flat) {
    for (Complex& v : out.at(flat).series) {
      v += Complex{component_sigma * unit(rng), component_sigma * unit(rng)};
    }
  }
  return out;
}

}  // namespace tgqpt
