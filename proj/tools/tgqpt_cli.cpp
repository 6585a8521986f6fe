// Batch front end for the transient-grating process-tomography pipeline:
// synthesize datasets, reduce spectra to windowed signals, invert for the
// process matrix, scan coefficient sensitivity, fit kinetics and emit
// plot-ready tables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "tgqpt/forward.hpp"
#include "tgqpt/inversion.hpp"
#include "tgqpt/io.hpp"
#include "tgqpt/kinetics.hpp"
#include "tgqpt/sensitivity.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace tgqpt;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct RunConfig {
  DatasetManifest manifest;
  std::optional<std::vector<ProcessVector>> explicit_trajectory;
};

double field_double(const ordered_json& j, const std::string& key,
                    double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ValidationError("config field '" + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

Complex field_complex(const ordered_json& j, const std::string& key,
                      Complex fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ValidationError("config field '" + key + "' must be [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

RunConfig load_run_config(const std::optional<fs::path>& config_file) {
  RunConfig config;
  if (!config_file) return config;

  std::ifstream in(*config_file);
  if (!in) throw IoError("cannot read config " + config_file->string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed JSON in " + config_file->string() + ": " +
                  e.what());
  }

  DatasetManifest& m = config.manifest;
  if (j.contains("scheme")) {
    const auto& s = j.at("scheme");
    m.scheme = EnergyLevelScheme(
        field_double(s, "w_Ig", m.scheme.w_Ig()),
        field_double(s, "w_Og", m.scheme.w_Og()),
        field_double(s, "w_OO_I", m.scheme.w_OO_I()),
        field_double(s, "w_II_O", m.scheme.w_II_O()));
  }
  if (j.contains("dipoles")) {
    const auto& d = j.at("dipoles");
    m.dipoles.mu_Ig = field_double(d, "mu_Ig", m.dipoles.mu_Ig);
    m.dipoles.mu_Og = field_double(d, "mu_Og", m.dipoles.mu_Og);
    m.dipoles.mu_II_I = field_double(d, "mu_II_I", m.dipoles.mu_II_I);
    m.dipoles.mu_II_O = field_double(d, "mu_II_O", m.dipoles.mu_II_O);
    m.dipoles.mu_OO_O = field_double(d, "mu_OO_O", m.dipoles.mu_OO_O);
    m.dipoles.mu_OO_I = field_double(d, "mu_OO_I", m.dipoles.mu_OO_I);
    m.dipoles.mu_IO_I = field_double(d, "mu_IO_I", m.dipoles.mu_IO_I);
    m.dipoles.mu_IO_O = field_double(d, "mu_IO_O", m.dipoles.mu_IO_O);
    m.dipoles.f_OO = field_complex(d, "f_OO", m.dipoles.f_OO);
    m.dipoles.f_II = field_complex(d, "f_II", m.dipoles.f_II);
    m.dipoles.f_OI = field_complex(d, "f_OI", m.dipoles.f_OI);
    m.dipoles.f_IO = field_complex(d, "f_IO", m.dipoles.f_IO);
    m.dipoles.validate();
  }
  if (j.contains("pulses")) {
    const auto& p = j.at("pulses");
    auto load_pulse = [&](const char* name, PulseSpectrum& pulse) {
      if (!p.contains(name)) return;
      const auto& pj = p.at(name);
      pulse.center = field_double(pj, "center", pulse.center);
      pulse.fwhm = field_double(pj, "fwhm", pulse.fwhm);
      pulse.peak_amplitude =
          field_double(pj, "peak_amplitude", pulse.peak_amplitude);
    };
    load_pulse("O", m.pulses[0]);
    load_pulse("I", m.pulses[1]);
  }
  if (j.contains("kinetics")) {
    const auto& k = j.at("kinetics");
    m.kinetics.tau_OO = field_double(k, "tau_OO", m.kinetics.tau_OO);
    m.kinetics.beta_OO = field_double(k, "beta_OO", m.kinetics.beta_OO);
    m.kinetics.omega_bar_OI =
        field_double(k, "omega_bar_OI", m.kinetics.omega_bar_OI);
    m.kinetics.tau_OI = field_double(k, "tau_OI", m.kinetics.tau_OI);
    m.kinetics.beta_OI = field_double(k, "beta_OI", m.kinetics.beta_OI);
    m.kinetics.chi_IIII_const =
        field_double(k, "chi_IIII", m.kinetics.chi_IIII_const);
    m.kinetics.nonsecular_amplitude = field_double(
        k, "nonsecular_amplitude", m.kinetics.nonsecular_amplitude);
    m.kinetics.validate();
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.is_array()) {
      m.grid = WaitingTimeGrid(g.get<std::vector<double>>());
    } else {
      m.grid = WaitingTimeGrid::uniform(field_double(g, "t_max", 510.0),
                                        static_cast<int>(field_double(g, "n", 33)));
    }
  }
  m.lineshape_fwhm = field_double(j, "lineshape_fwhm", m.lineshape_fwhm);
  m.sigma4 = field_double(j, "sigma4", m.sigma4);
  m.noise = field_double(j, "noise", m.noise);
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("chi_trajectory")) {
    const auto& rows = j.at("chi_trajectory");
    if (!rows.is_array() || rows.size() != m.grid.size()) {
      throw ValidationError(
          "config field 'chi_trajectory' must hold one 16-vector per grid "
          "point");
    }
    std::vector<ProcessVector> traj;
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != 16) {
        throw ValidationError(
            "config field 'chi_trajectory' rows must hold 16 numbers");
      }
      ProcessVector x;
      for (int k = 0; k < 16; ++k) x[k] = row[k].get<double>();
      traj.push_back(x);
    }
    config.explicit_trajectory = std::move(traj);
  }
  return config;
}

int cmd_simulate(const std::optional<fs::path>& config_file,
                 const fs::path& out_dir, std::optional<std::uint64_t> seed,
                 std::optional<double> noise) {
  RunConfig config = load_run_config(config_file);
  DatasetManifest& m = config.manifest;
  if (seed) m.seed = *seed;
  if (noise) m.noise = *noise;
  if (m.noise < 0) throw ValidationError("noise level must be >= 0");

  std::vector<ProcessMatrix> chi;
  if (config.explicit_trajectory) {
    for (const auto& x : *config.explicit_trajectory) {
      chi.push_back(ProcessMatrix::from_vector(x));
    }
  } else {
    chi = model_chi(m.kinetics, m.grid);
  }

  SignalSet signals =
      synthesize_signals(chi, m.grid, m.dipoles, m.pulses, m.scheme);
  if (m.noise > 0) signals = add_noise(signals, m.noise, m.seed);
  const SpectrumSet spectra =
      spread_to_spectra(signals, m.scheme, m.lineshape_fwhm, m.sigma4);

  write_spectrum_set(out_dir, spectra);
  write_manifest(out_dir / "manifest.json", m);
  ChiTrajectory truth;
  truth.grid = m.grid;
  for (const auto& c : chi) truth.x.push_back(c.to_vector());
  write_chi_truth_json(out_dir / "chi_true.json", truth);
  std::cout << "wrote 8 spectra + manifest.json + chi_true.json to "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_reduce(const fs::path& in_dir, const fs::path& out_dir, double sigma4,
               const std::optional<fs::path>& norm_file) {
  if (!(sigma4 > 0)) throw ValidationError("sigma4 must be positive");
  const SpectrumSet spectra = read_spectrum_set(in_dir);
  const LevelAssignment assignment = assign_levels(spectra, sigma4);

  fs::path manifest_path =
      norm_file ? *norm_file : in_dir / "manifest.json";
  DipoleSet dipoles;
  PulsePair pulses = default_pulses(assignment.scheme);
  pulses[0].peak_amplitude = 1.0;
  pulses[1].peak_amplitude = 1.0;
  if (fs::exists(manifest_path)) {
    const DatasetManifest m = read_manifest(manifest_path);
    dipoles = m.dipoles;
    pulses = m.pulses;
  } else {
    std::cerr << "warning: no manifest at " << manifest_path.string()
              << "; normalizing with unit pulses and dipoles. Coefficients "
                 "and signals will carry per-triad scale errors.\n";
  }

  const SignalSet raw =
      SignalSet::integrate(spectra, assignment.scheme, sigma4);
  const SignalSet normalized = normalize_signals(raw, pulses, dipoles);
  write_signals_csv(out_dir / "signals.csv", normalized);
  write_scheme_json(out_dir / "scheme.json", assignment);
  write_contribution_csv(out_dir / "contributions.csv",
                         contribution_table(normalized));
  std::cout << "assigned levels: w_Ig=" << assignment.scheme.w_Ig()
            << " w_Og=" << assignment.scheme.w_Og()
            << " w_OO_I=" << assignment.scheme.w_OO_I()
            << " w_II_O=" << assignment.scheme.w_II_O() << " cm^-1\n";
  std::cout << "wrote signals.csv + scheme.json + contributions.csv to "
            << out_dir.string() << "\n";
  return 0;
}

int cmd_invert(const fs::path& signals_file, const std::string& coeffs_arg,
               bool trace_constraint, const fs::path& out_dir, int jobs) {
  const SignalSet normalized = read_signals_csv(signals_file);

  CoefficientSet coefficients;
  if (coeffs_arg == "auto") {
    const ExtractionResult ext = extract_coefficients(normalized);
    for (const std::string& w : ext.warnings) {
      std::cerr << "warning: " << w << "\n";
    }
    coefficients = ext.coefficients;
  } else {
    coefficients = read_coefficients_json(coeffs_arg);
  }

  const InversionSystem system = build_system(coefficients);
  const double kappa = condition_number(system.M);
  SolveOptions options;
  options.trace_constraint = trace_constraint;
  const std::vector<SolveResult> results =
      solve_trajectory(system, normalized, options, jobs);

  write_inversion_json(out_dir / "chi.json", normalized.grid(), results, kappa,
                       trace_constraint, coefficients);
  ChiTrajectory trajectory;
  trajectory.grid = normalized.grid();
  for (const auto& r : results) trajectory.x.push_back(r.x);
  write_chi_csv(out_dir / "chi.csv", trajectory);
  write_coefficients_json(out_dir / "coefficients.json", coefficients);
  fs::create_directories(out_dir);
  std::error_code same_file;
  if (!fs::equivalent(signals_file, out_dir / "signals.csv", same_file)) {
    fs::copy_file(signals_file, out_dir / "signals.csv",
                  fs::copy_options::overwrite_existing);
  }

  int failures = 0;
  for (const auto& r : results) failures += r.converged ? 0 : 1;
  std::cout << "condition number kappa(M) = " << format_g17(kappa) << "\n";
  std::cout << "inverted " << results.size() << " waiting times ("
            << failures << " non-converged) to " << out_dir.string() << "\n";
  if (failures > 0) {
    std::cerr << "error: " << failures
              << " waiting times did not converge; diagnostics in chi.json\n";
    return kExitSolver;
  }
  return 0;
}

std::string round2(double v) {
  if (std::isnan(v)) return "failed";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  return buffer;
}

void write_scan_csv(const fs::path& file, const ScanResult& result,
                    bool error1, bool rounded) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << "coefficient";
  for (double f : result.factors) out << "," << format_g17(f);
  out << "\n";
  for (std::size_t ci = 0; ci < result.coefficients.size(); ++ci) {
    out << result.coefficients[ci];
    for (std::size_t fi = 0; fi < result.factors.size(); ++fi) {
      const ScanCell& cell = result.cells[ci][fi];
      const double v = error1 ? cell.error1 : cell.error2;
      if (!cell.ok) {
        out << ",failed";
      } else {
        out << "," << (rounded ? round2(v) : format_g17(v));
      }
    }
    out << "\n";
  }
}

int cmd_scan(const fs::path& baseline_dir, const std::string& factors_arg,
             const std::string& coefficients_arg, const fs::path& out_dir,
             int jobs) {
  const SignalSet normalized = read_signals_csv(baseline_dir / "signals.csv");
  const CoefficientSet coefficients =
      read_coefficients_json(baseline_dir / "coefficients.json");

  ScanConfig config;
  if (!factors_arg.empty()) {
    config.factors.clear();
    std::istringstream stream(factors_arg);
    std::string tok;
    while (std::getline(stream, tok, ',')) {
      try {
        config.factors.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ValidationError("bad scan factor '" + tok + "'");
      }
    }
    if (config.factors.empty()) {
      throw ValidationError("empty factor list");
    }
  }
  if (!coefficients_arg.empty()) {
    config.coefficients.clear();
    for (char c : coefficients_arg) {
      if (c < 'A' || c > 'H') {
        throw ValidationError(std::string("unknown coefficient '") + c +
                              "' (use letters A-H)");
      }
      config.coefficients.push_back(c);
    }
  }

  const ScanResult result = scan(coefficients, normalized, config, jobs);
  fs::create_directories(out_dir);
  write_scan_csv(out_dir / "error1.csv", result, true, true);
  write_scan_csv(out_dir / "error2.csv", result, false, true);
  write_scan_csv(out_dir / "error1_full.csv", result, true, false);
  write_scan_csv(out_dir / "error2_full.csv", result, false, false);
  int failed = 0;
  for (const auto& row : result.cells) {
    for (const auto& cell : row) failed += cell.ok ? 0 : 1;
  }
  std::cout << "scanned " << result.coefficients.size() << " x "
            << result.factors.size() << " cells (" << failed
            << " failed) to " << out_dir.string() << "\n";
  return 0;
}

struct FitRow {
  std::string process;
  std::string description;
  std::optional<FitResult> fit;
  std::optional<double> bound;  // nonsecular max-magnitude row
  std::string error;
};

std::string format_fit_params(const FitResult& fit) {
  std::ostringstream out;
  out.precision(4);
  switch (fit.model) {
    case FitModel::StretchedDecay:
    case FitModel::ComplementRise:
      out << "tau = " << fit.tau << " +- " << fit.ci95(0)
          << " fs, beta = " << fit.beta << " +- " << fit.ci95(1);
      break;
    case FitModel::DampedOscillation:
      out << "2pi/omega_bar = " << 2.0 * M_PI / fit.omega_bar
          << " fs, tau = " << fit.tau << " +- " << fit.ci95(1)
          << " fs, beta = " << fit.beta << " +- " << fit.ci95(2);
      break;
    case FitModel::Constant:
      out << "value = " << fit.constant;
      break;
  }
  return out.str();
}

int cmd_fit(const fs::path& chi_file, std::optional<fs::path> out_dir_arg) {
  const ChiTrajectory trajectory = read_chi_json(chi_file);
  const fs::path out_dir =
      out_dir_arg ? *out_dir_arg : chi_file.parent_path();
  const std::size_t n = trajectory.x.size();

  auto series_of = [&](int index) {
    std::vector<double> s(n);
    for (std::size_t t = 0; t < n; ++t) s[t] = trajectory.x[t][index];
    return s;
  };

  std::vector<FitRow> rows;
  auto fit_pop = [&](const char* name, int index, FitModel form,
                     const char* description) {
    FitRow row{name, description, {}, {}, {}};
    try {
      row.fit = fit_population(series_of(index), trajectory.grid, form);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  };
  fit_pop("chi_OOOO", 0, FitModel::StretchedDecay, "population decay");
  fit_pop("chi_IIOO", 1, FitModel::ComplementRise, "population transfer");
  fit_pop("chi_IIII", 5, FitModel::StretchedDecay, "population decay");
  fit_pop("chi_OOII", 4, FitModel::StretchedDecay, "population transfer");

  {
    FitRow row{"chi_OIOI", "decoherence", {}, {}, {}};
    try {
      std::vector<Complex> coherence(n);
      for (std::size_t t = 0; t < n; ++t) {
        coherence[t] = {trajectory.x[t][10], trajectory.x[t][14]};
      }
      row.fit = fit_coherence(coherence, trajectory.grid);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  {
    FitRow row{"nonsecular", "nonsecular terms", {}, 0.0, {}};
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      for (const auto& [re, im] :
           {std::pair{2, 3}, {6, 7}, {8, 12}, {9, 13}, {11, 15}}) {
        worst = std::max(worst, std::hypot(trajectory.x[t][re],
                                           trajectory.x[t][im]));
      }
    }
    row.bound = worst;
    rows.push_back(std::move(row));
  }

  // JSON report.
  ordered_json j;
  j["format"] = "tgqpt-fit-report";
  j["source"] = chi_file.string();
  ordered_json jrows = ordered_json::array();
  for (const FitRow& row : rows) {
    ordered_json r;
    r["process"] = row.process;
    r["description"] = row.description;
    if (row.fit) {
      r["model"] = fit_model_name(row.fit->model);
      r["residual_rms"] = row.fit->residual_rms;
      ordered_json params;
      for (std::size_t pi = 0; pi < row.fit->param_names.size(); ++pi) {
        double value = 0.0;
        const std::string& name = row.fit->param_names[pi];
        if (name == "tau") value = row.fit->tau;
        else if (name == "beta") value = row.fit->beta;
        else if (name == "omega_bar") value = row.fit->omega_bar;
        else value = row.fit->constant;
        params[name] = {{"value", value}, {"ci95", row.fit->ci95(pi)}};
      }
      r["parameters"] = std::move(params);
    } else if (row.bound) {
      r["max_abs"] = *row.bound;
    } else {
      r["error"] = row.error;
    }
    jrows.push_back(std::move(r));
  }
  j["rows"] = std::move(jrows);
  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "fit_report.json");
    if (!out) throw IoError("cannot write fit_report.json");
    out << j.dump(2) << "\n";
  }

  // Text report.
  std::ostringstream text;
  text << "process      model                description          result\n";
  for (const FitRow& row : rows) {
    char line[256];
    if (row.fit) {
      std::snprintf(line, sizeof(line), "%-12s %-20s %-20s %s",
                    row.process.c_str(),
                    fit_model_name(row.fit->model).c_str(),
                    row.description.c_str(),
                    format_fit_params(*row.fit).c_str());
    } else if (row.bound) {
      std::snprintf(line, sizeof(line), "%-12s %-20s %-20s max |chi| = %.4f",
                    row.process.c_str(), "bound", row.description.c_str(),
                    *row.bound);
    } else {
      std::snprintf(line, sizeof(line), "%-12s %-20s %-20s fit failed: %s",
                    row.process.c_str(), "-", row.description.c_str(),
                    row.error.c_str());
    }
    text << line << "\n";
  }
  {
    std::ofstream out(out_dir / "fit_report.txt");
    if (!out) throw IoError("cannot write fit_report.txt");
    out << text.str();
  }
  std::cout << text.str();

  for (const FitRow& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "error: fit of " << row.process
                << " failed: " << row.error << "\n";
      return kExitSolver;
    }
  }
  return 0;
}

int cmd_report(const fs::path& in_dir, const std::string& format,
               std::optional<fs::path> out_file) {
  const ChiTrajectory trajectory = read_chi_json(in_dir / "chi.json");
  if (trajectory.x.empty()) {
    throw ValidationError("inversion output holds no waiting times");
  }
  std::ostringstream body;
  const auto matrices = trajectory.matrices();
  static const std::array<std::pair<const char*, std::array<Exciton, 4>>, 10>
      entries = {{
          {"chi_OOOO", {Exciton::O, Exciton::O, Exciton::O, Exciton::O}},
          {"chi_IIOO", {Exciton::I, Exciton::I, Exciton::O, Exciton::O}},
          {"chi_OIOO", {Exciton::O, Exciton::I, Exciton::O, Exciton::O}},
          {"chi_OOII", {Exciton::O, Exciton::O, Exciton::I, Exciton::I}},
          {"chi_IIII", {Exciton::I, Exciton::I, Exciton::I, Exciton::I}},
          {"chi_OIII", {Exciton::O, Exciton::I, Exciton::I, Exciton::I}},
          {"chi_OOOI", {Exciton::O, Exciton::O, Exciton::O, Exciton::I}},
          {"chi_IIOI", {Exciton::I, Exciton::I, Exciton::O, Exciton::I}},
          {"chi_OIOI", {Exciton::O, Exciton::I, Exciton::O, Exciton::I}},
          {"chi_IOOI", {Exciton::I, Exciton::O, Exciton::O, Exciton::I}},
      }};
  if (format == "csv") {
    body << "entry,T_fs,re,im\n";
    for (const auto& [name, idx] : entries) {
      for (std::size_t t = 0; t < matrices.size(); ++t) {
        const Complex v = matrices[t](idx[0], idx[1], idx[2], idx[3]);
        body << name << "," << format_g17(trajectory.grid[t]) << ","
             << format_g17(v.real()) << "," << format_g17(v.imag()) << "\n";
      }
    }
  } else if (format == "json") {
    ordered_json j;
    j["format"] = "tgqpt-report";
    ordered_json series;
    for (const auto& [name, idx] : entries) {
      ordered_json points = ordered_json::array();
      for (std::size_t t = 0; t < matrices.size(); ++t) {
        const Complex v = matrices[t](idx[0], idx[1], idx[2], idx[3]);
        points.push_back({trajectory.grid[t], v.real(), v.imag()});
      }
      series[name] = std::move(points);
    }
    j["series"] = std::move(series);
    body << j.dump(2) << "\n";
  } else if (format == "text") {
    for (const auto& [name, idx] : entries) {
      body << name << "\n";
      for (std::size_t t = 0; t < matrices.size(); ++t) {
        const Complex v = matrices[t](idx[0], idx[1], idx[2], idx[3]);
        char line[128];
        std::snprintf(line, sizeof(line), "  T = %7.2f fs   %+12.6f %+12.6f i",
                      trajectory.grid[t], v.real(), v.imag());
        body << line << "\n";
      }
    }
  } else {
    throw ValidationError("unknown report format '" + format + "'");
  }
  if (out_file) {
    std::ofstream out(*out_file);
    if (!out) throw IoError("cannot write " + out_file->string());
    out << body.str();
  } else {
    std::cout << body.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Process tomography for two-band transient-grating spectroscopy: "
      "simulate, reduce, invert, scan, fit, report"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Synthesize a dataset: 8 spectrum CSVs + manifest + truth");
  std::string sim_config, sim_out = ".";
  std::uint64_t sim_seed = 0;
  double sim_noise = -1.0;
  simulate->add_option("--config", sim_config, "run-config JSON");
  simulate->add_option("--out", sim_out, "output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "noise seed");
  auto* noise_opt =
      simulate->add_option("--noise", sim_noise, "relative noise level");

  // reduce
  auto* reduce = app.add_subcommand(
      "reduce", "Assign levels and integrate emission windows");
  std::string red_in, red_out, red_norm;
  double red_sigma4 = kDefaultSigma4;
  reduce->add_option("--in", red_in, "dataset directory")->required();
  reduce->add_option("--out", red_out, "output directory")->required();
  reduce->add_option("--sigma4", red_sigma4, "window half-width (cm^-1)");
  reduce->add_option("--norm", red_norm,
                     "manifest with normalization constants");

  // invert
  auto* invert = app.add_subcommand(
      "invert", "Constrained inversion of the signal table");
  std::string inv_signals, inv_coeffs = "auto", inv_trace = "on", inv_out;
  int inv_jobs = default_jobs();
  invert->add_option("--signals", inv_signals, "signals.csv")->required();
  invert->add_option("--coeffs", inv_coeffs, "auto or coefficients JSON");
  invert->add_option("--trace-constraint", inv_trace, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  invert->add_option("--out", inv_out, "output directory")->required();
  invert->add_option("--jobs", inv_jobs, "parallel solves");

  // scan
  auto* scan_cmd = app.add_subcommand(
      "scan", "Coefficient sensitivity scan around a baseline inversion");
  std::string scan_baseline, scan_factors, scan_letters, scan_out;
  int scan_jobs = default_jobs();
  scan_cmd->add_option("--baseline", scan_baseline,
                       "invert output directory")->required();
  scan_cmd->add_option("--factors", scan_factors, "comma-separated factors");
  scan_cmd->add_option("--coefficients", scan_letters,
                       "subset of letters A-H");
  scan_cmd->add_option("--out", scan_out, "output directory");
  scan_cmd->add_option("--jobs", scan_jobs, "parallel cells");

  // fit
  auto* fit_cmd =
      app.add_subcommand("fit", "Kinetics fits of a chi trajectory");
  std::string fit_chi, fit_out;
  fit_cmd->add_option("--chi", fit_chi, "chi trajectory JSON")->required();
  fit_cmd->add_option("--out", fit_out, "output directory");

  // report
  auto* report = app.add_subcommand(
      "report", "Format an inversion output for plotting");
  std::string rep_in, rep_format = "text", rep_out;
  report->add_option("--in", rep_in, "invert output directory")->required();
  report->add_option("--format", rep_format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  report->add_option("--out", rep_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(
          sim_config.empty() ? std::nullopt
                             : std::optional<fs::path>(sim_config),
          sim_out,
          seed_opt->count() ? std::optional<std::uint64_t>(sim_seed)
                            : std::nullopt,
          noise_opt->count() ? std::optional<double>(sim_noise)
                             : std::nullopt);
    }
    if (reduce->parsed()) {
      return cmd_reduce(red_in, red_out, red_sigma4,
                        red_norm.empty() ? std::nullopt
                                         : std::optional<fs::path>(red_norm));
    }
    if (invert->parsed()) {
      return cmd_invert(inv_signals, inv_coeffs, inv_trace == "on", inv_out,
                        inv_jobs);
    }
    if (scan_cmd->parsed()) {
      return cmd_scan(scan_baseline, scan_factors, scan_letters,
                      scan_out.empty() ? fs::path(scan_baseline)
                                       : fs::path(scan_out),
                      scan_jobs);
    }
    if (fit_cmd->parsed()) {
      return cmd_fit(fit_chi, fit_out.empty()
                                  ? std::nullopt
                                  : std::optional<fs::path>(fit_out));
    }
    if (report->parsed()) {
      return cmd_report(rep_in, rep_format,
                        rep_out.empty() ? std::nullopt
                                        : std::optional<fs::path>(rep_out));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
