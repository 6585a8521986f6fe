#include "tgqpt/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tgqpt {

const std::array<PulseTriad, 8>& PulseTriad::all() {
  static const std::array<PulseTriad, 8> triads = {{
      {Exciton::O, Exciton::O, Exciton::O},  // OOO
      {Exciton::O, Exciton::O, Exciton::I},  // OOI
      {Exciton::I, Exciton::I, Exciton::I},  // III
      {Exciton::I, Exciton::I, Exciton::O},  // IIO
      {Exciton::O, Exciton::I, Exciton::O},  // OIO
      {Exciton::O, Exciton::I, Exciton::I},  // OII
      {Exciton::I, Exciton::O, Exciton::I},  // IOI
      {Exciton::I, Exciton::O, Exciton::O},  // IOO
  }};
  return triads;
}

std::string PulseTriad::name() const {
  return {to_char(p), to_char(q), to_char(r)};
}

PulseTriad PulseTriad::from_name(std::string_view s) {
  if (s.size() != 3) {
    throw ValidationError("triad name must be three labels, e.g. \"OOI\"");
  }
  return {exciton_from_char(s[0]), exciton_from_char(s[1]),
          exciton_from_char(s[2])};
}

int PulseTriad::canonical_index() const {
  const auto& triads = all();
  for (int i = 0; i < 8; ++i) {
    if (triads[i] == *this) return i;
  }
  throw ValidationError("unreachable: unknown triad");
}

double emission_frequency(const EnergyLevelScheme& scheme, Exciton r,
                          DetectionSlot slot) {
  if (r == Exciton::O) {
    switch (slot) {
      case DetectionSlot::FinalIO: return scheme.w_Ig();
      case DetectionSlot::Population: return scheme.w_Og();
      case DetectionSlot::FinalOI: return scheme.w_OO_I();
    }
  } else {
    switch (slot) {
      case DetectionSlot::FinalIO: return scheme.w_II_O();
      case DetectionSlot::Population: return scheme.w_Ig();
      case DetectionSlot::FinalOI: return scheme.w_Og();
    }
  }
  throw ValidationError("unreachable: unknown detection slot");
}

std::string emission_name(Exciton r, DetectionSlot slot) {
  if (r == Exciton::O) {
    switch (slot) {
      case DetectionSlot::FinalIO: return "w_Ig";
      case DetectionSlot::Population: return "w_Og";
      case DetectionSlot::FinalOI: return "w_OO_I";
    }
  } else {
    switch (slot) {
      case DetectionSlot::FinalIO: return "w_II_O";
      case DetectionSlot::Population: return "w_Ig";
      case DetectionSlot::FinalOI: return "w_Og";
    }
  }
  throw ValidationError("unreachable: unknown detection slot");
}

TGSpectrum::TGSpectrum(PulseTriad triad, std::vector<double> frequency_axis,
                       WaitingTimeGrid waiting_times, Eigen::MatrixXcd values)
    : triad_(triad),
      freq_(std::move(frequency_axis)),
      grid_(std::move(waiting_times)),
      values_(std::move(values)),
      spacing_(0.0) {
  if (freq_.size() < 2) {
    throw ValidationError("frequency axis needs at least two samples");
  }
  spacing_ = freq_[1] - freq_[0];
  if (!(spacing_ > 0)) {
    throw ValidationError("frequency axis must be strictly increasing");
  }
  if (spacing_ > 20.0 + 1e-9) {
    throw ValidationError(
        "frequency spacing above 20 cm^-1; integration windows would be "
        "undersampled");
  }
  for (std::size_t i = 1; i < freq_.size(); ++i) {
    const double step = freq_[i] - freq_[i - 1];
    if (std::abs(step - spacing_) > 1e-6 * spacing_) {
      throw ValidationError("frequency axis must be uniform");
    }
  }
  if (values_.rows() != static_cast<Eigen::Index>(grid_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(freq_.size())) {
    throw ValidationError("spectrum value matrix must be n_T x n_freq");
  }
  if (!values_.allFinite()) {
    throw ValidationError("spectrum values must be finite");
  }
}

IntegratedSignal integrate_window(const TGSpectrum& spec, double omega4,
                                  double sigma4) {
  if (!(sigma4 > 0)) throw ValidationError("sigma4 must be positive");
  const auto& freq = spec.frequency_axis();
  const double lo = omega4 - sigma4;
  const double hi = omega4 + sigma4;
  if (lo < freq.front() - 1e-9 || hi > freq.back() + 1e-9) {
    std::ostringstream msg;
    msg << "integration window [" << lo << ", " << hi
        << "] cm^-1 falls outside the acquired axis [" << freq.front() << ", "
        << freq.back() << "] of spectrum " << spec.triad().name();
    throw ValidationError(msg.str());
  }
  const double h = spec.spacing();
  auto snap = [&](double w) {
    const auto idx = static_cast<Eigen::Index>(std::lround((w - freq.front()) / h));
    return std::clamp<Eigen::Index>(idx, 0,
                                    static_cast<Eigen::Index>(freq.size()) - 1);
  };
  const Eigen::Index i0 = snap(lo);
  const Eigen::Index i1 = snap(hi);
  if (i1 <= i0) throw ValidationError("integration window narrower than one bin");

  IntegratedSignal out;
  out.triad = spec.triad();
  out.omega4 = omega4;
  out.series.resize(spec.waiting_times().size());
  const auto& v = spec.values();
  for (Eigen::Index t = 0; t < v.rows(); ++t) {
    Complex sum = 0.5 * (v(t, i0) + v(t, i1));
    for (Eigen::Index k = i0 + 1; k < i1; ++k) sum += v(t, k);
    out.series[static_cast<std::size_t>(t)] = sum * h;
  }
  return out;
}

SignalSet::SignalSet(WaitingTimeGrid grid,
                     std::array<IntegratedSignal, 24> signals)
    : grid_(std::move(grid)), signals_(std::move(signals)) {
  for (const auto& s : signals_) {
    if (s.series.size() != grid_.size()) {
      throw ValidationError("signal series length must match the grid");
    }
  }
}

SignalSet SignalSet::integrate(const SpectrumSet& spectra,
                               const EnergyLevelScheme& scheme, double sigma4) {
  std::array<IntegratedSignal, 24> signals;
  for (int ti = 0; ti < 8; ++ti) {
    const TGSpectrum& spec = spectra[ti];
    if (spec.triad().canonical_index() != ti) {
      throw ValidationError("spectrum set must be in canonical triad order");
    }
    if (spec.waiting_times() != spectra[0].waiting_times()) {
      throw ValidationError("all spectra must share one waiting-time grid");
    }
    for (DetectionSlot slot : kDetectionSlots) {
      const double w4 = emission_frequency(scheme, spec.triad().r, slot);
      signals[ti * 3 + static_cast<int>(slot)] =
          integrate_window(spec, w4, sigma4);
    }
  }
  return SignalSet(spectra[0].waiting_times(), std::move(signals));
}

const IntegratedSignal& SignalSet::at(const PulseTriad& triad,
                                      DetectionSlot slot) const {
  return signals_[triad.canonical_index() * 3 + static_cast<int>(slot)];
}

const IntegratedSignal& SignalSet::at(int flat_index) const {
  return signals_.at(flat_index);
}

IntegratedSignal& SignalSet::at(int flat_index) {
  return signals_.at(flat_index);
}

double SignalSet::max_abs() const {
  double m = 0.0;
  for (const auto& s : signals_) {
    for (const Complex& v : s.series) m = std::max(m, std::abs(v));
  }
  return m;
}

namespace {

// Frequency of the largest |value| in the T = 0 row. An exactly tied
// global maximum means the peak is ambiguous.
double peak_at_t0(const TGSpectrum& spec) {
  if (spec.waiting_times()[0] != 0.0) {
    throw ValidationError("spectrum " + spec.triad().name() +
                          " does not contain T = 0");
  }
  const auto& v = spec.values();
  double best = -1.0;
  Eigen::Index best_idx = 0;
  bool tied = false;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double mag = std::norm(v(0, k));
    if (mag > best) {
      best = mag;
      best_idx = k;
      tied = false;
    } else if (mag == best) {
      tied = true;
    }
  }
  if (best == 0.0) {
    throw ValidationError("spectrum " + spec.triad().name() +
                          " is zero at T = 0; no peak to assign");
  }
  if (tied) {
    throw ValidationError("spectrum " + spec.triad().name() +
                          " has two equal global maxima at T = 0");
  }
  return spec.frequency_axis()[static_cast<std::size_t>(best_idx)];
}

}  // namespace

LevelAssignment assign_levels(const SpectrumSet& spectra, double sigma4) {
  auto spectrum = [&](const char* name) -> const TGSpectrum& {
    return spectra[PulseTriad::from_name(name).canonical_index()];
  };
  const double w_Og = peak_at_t0(spectrum("OOO"));
  const double w_Ig = peak_at_t0(spectrum("III"));
  const double w_OO_I = peak_at_t0(spectrum("IOO"));
  const double w_II_O = peak_at_t0(spectrum("OII"));
  EnergyLevelScheme scheme(w_Ig, w_Og, w_OO_I, w_II_O, 2.0 * sigma4);

  LevelAssignment out{scheme, {}};
  const std::array<std::pair<const char*, double>, 4> checks = {{
      {"OOI", w_Ig},
      {"IIO", w_Og},
      {"IOI", w_Og},
      {"OIO", w_Ig},
  }};
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& [name, reference] = checks[i];
    const double peak = peak_at_t0(spectrum(name));
    const double deviation = std::abs(peak - reference);
    out.cross_checks[i] = {name, peak, reference, deviation};
    if (deviation > sigma4) {
      std::ostringstream msg;
      msg << "level assignment cross-check failed for spectrum " << name
          << ": T = 0 peak at " << peak << " cm^-1 deviates by " << deviation
          << " from the assigned " << reference << " (tolerance " << sigma4
          << ")";
      throw ValidationError(msg.str());
    }
  }
  return out;
}

std::array<ContributionRow, 8> contribution_table(const SignalSet& signals) {
  std::array<ContributionRow, 8> table;
  for (int ti = 0; ti < 8; ++ti) {
    const PulseTriad triad = PulseTriad::all()[ti];
    ContributionRow& row = table[ti];
    row.triad = triad;
    const std::string qp =
        std::string{to_char(triad.q)} + std::string{to_char(triad.p)};
    row.reports_on = {
        "chi_IO" + qp,
        "chi_OO" + qp + ",chi_II" + qp,
        "chi_OI" + qp,
    };
    std::array<double, 3> power{};
    for (DetectionSlot slot : kDetectionSlots) {
      const auto& series = signals.at(triad, slot).series;
      double p = 0.0;
      for (const Complex& v : series) p += std::norm(v);
      power[static_cast<int>(slot)] = p;
    }
    const double total = power[0] + power[1] + power[2];
    if (total == 0.0) {
      row.defined = false;
      row.fraction = {0.0, 0.0, 0.0};
    } else {
      for (int s = 0; s < 3; ++s) row.fraction[s] = power[s] / total;
    }
  }
  return table;
}

}  // namespace tgqpt
