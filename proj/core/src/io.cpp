#include "tgqpt/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tgqpt {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string line_error(const std::filesystem::path& file, int line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << file.string() << ":" << line << ": " << what;
  return msg.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// strtod-based so that subnormal values parse instead of raising the
// out-of-range error std::stod reports on underflow.
double parse_double(const std::string& s, const std::filesystem::path& file,
                    int line) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || end != begin + s.size() || !std::isfinite(v)) {
    throw IoError(line_error(file, line, "not a number: '" + s + "'"));
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  return in;
}

int header_int(const std::string& line, const std::string& key,
               const std::filesystem::path& file, int line_no) {
  const std::string prefix = "# " + key + "=";
  if (line.rfind(prefix, 0) != 0) {
    throw IoError(line_error(file, line_no, "expected header '" + prefix + "<value>'"));
  }
  return static_cast<int>(parse_double(line.substr(prefix.size()), file, line_no));
}

ordered_json complex_json(const Complex& z) {
  return ordered_json::array({z.real(), z.imag()});
}

Complex complex_from(const ordered_json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2) {
    throw IoError("field " + key + " must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ordered_json load_json(const std::filesystem::path& file) {
  auto in = open_in(file);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed JSON in " + file.string() + ": " + e.what());
  }
  return j;
}

template <typename T>
T require(const ordered_json& j, const std::string& key,
          const std::filesystem::path& file) {
  if (!j.contains(key)) {
    throw IoError("missing field '" + key + "' in " + file.string());
  }
  try {
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw IoError("field '" + key + "' has the wrong type in " + file.string());
  }
}

}  // namespace

std::string format_g17(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

void write_spectrum_csv(const std::filesystem::path& file,
                        const TGSpectrum& spectrum) {
  auto out = open_out(file);
  out << "# triad=" << spectrum.triad().name() << "\n";
  out << "# n_freq=" << spectrum.frequency_axis().size() << "\n";
  out << "# n_T=" << spectrum.waiting_times().size() << "\n";
  const auto& freq = spectrum.frequency_axis();
  for (std::size_t i = 0; i < freq.size(); ++i) {
    out << (i ? "," : "") << format_g17(freq[i]);
  }
  out << "\n";
  const auto& v = spectrum.values();
  for (Eigen::Index t = 0; t < v.rows(); ++t) {
    out << format_g17(spectrum.waiting_times()[t]);
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      out << "," << format_g17(v(t, k).real()) << ","
          << format_g17(v(t, k).imag());
    }
    out << "\n";
  }
}

TGSpectrum read_spectrum_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  int line_no = 0;

  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw IoError(line_error(file, line_no + 1, "unexpected end of file"));
    }
    ++line_no;
  };

  next_line();
  if (line.rfind("# triad=", 0) != 0 || line.size() != 11) {
    throw IoError(line_error(file, line_no, "expected header '# triad=XYZ'"));
  }
  const PulseTriad triad = PulseTriad::from_name(line.substr(8));
  next_line();
  const int n_freq = header_int(line, "n_freq", file, line_no);
  next_line();
  const int n_t = header_int(line, "n_T", file, line_no);
  if (n_freq < 2 || n_t < 1) {
    throw IoError(line_error(file, line_no, "invalid spectrum dimensions"));
  }

  next_line();
  const auto freq_fields = split_csv(line);
  if (static_cast<int>(freq_fields.size()) != n_freq) {
    throw IoError(line_error(file, line_no, "frequency row has wrong length"));
  }
  std::vector<double> freq(n_freq);
  for (int i = 0; i < n_freq; ++i) {
    freq[i] = parse_double(freq_fields[i], file, line_no);
  }

  std::vector<double> times(n_t);
  Eigen::MatrixXcd values(n_t, n_freq);
  for (int t = 0; t < n_t; ++t) {
    next_line();
    const auto fields = split_csv(line);
    if (static_cast<int>(fields.size()) != 1 + 2 * n_freq) {
      throw IoError(line_error(file, line_no, "body row has wrong length"));
    }
    times[t] = parse_double(fields[0], file, line_no);
    for (int k = 0; k < n_freq; ++k) {
      values(t, k) = {parse_double(fields[1 + 2 * k], file, line_no),
                      parse_double(fields[2 + 2 * k], file, line_no)};
    }
  }
  try {
    return TGSpectrum(triad, std::move(freq), WaitingTimeGrid(std::move(times)),
                      std::move(values));
  } catch (const ValidationError& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

SpectrumSet read_spectrum_set(const std::filesystem::path& dir) {
  std::vector<TGSpectrum> loaded;
  loaded.reserve(8);
  for (const PulseTriad& triad : PulseTriad::all()) {
    const auto file = dir / (triad.name() + ".csv");
    if (!std::filesystem::exists(file)) {
      throw IoError("missing spectrum file " + file.string());
    }
    loaded.push_back(read_spectrum_csv(file));
    if (!(loaded.back().triad() == triad)) {
      throw IoError("spectrum file " + file.string() +
                    " is labeled with the wrong triad");
    }
  }
  return {loaded[0], loaded[1], loaded[2], loaded[3],
          loaded[4], loaded[5], loaded[6], loaded[7]};
}

void write_spectrum_set(const std::filesystem::path& dir,
                        const SpectrumSet& spectra) {
  for (const TGSpectrum& s : spectra) {
    write_spectrum_csv(dir / (s.triad().name() + ".csv"), s);
  }
}

void write_signals_csv(const std::filesystem::path& file,
                       const SignalSet& signals) {
  auto out = open_out(file);
  out << "triad,slot,omega4_cm1,T_fs,re,im\n";
  for (const PulseTriad& triad : PulseTriad::all()) {
    for (DetectionSlot slot : kDetectionSlots) {
      const IntegratedSignal& sig = signals.at(triad, slot);
      for (std::size_t t = 0; t < sig.series.size(); ++t) {
        out << triad.name() << "," << static_cast<int>(slot) << ","
            << format_g17(sig.omega4) << ","
            << format_g17(signals.grid()[t]) << ","
            << format_g17(sig.series[t].real()) << ","
            << format_g17(sig.series[t].imag()) << "\n";
      }
    }
  }
}

SignalSet read_signals_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != "triad,slot,omega4_cm1,T_fs,re,im") {
    throw IoError(line_error(file, 1, "bad signals header"));
  }
  struct Row {
    double t;
    Complex v;
  };
  std::array<double, 24> omega4{};
  std::array<std::vector<Row>, 24> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 6) {
      throw IoError(line_error(file, line_no, "signals row has wrong length"));
    }
    const PulseTriad triad = PulseTriad::from_name(fields[0]);
    const int slot = static_cast<int>(parse_double(fields[1], file, line_no));
    if (slot < 0 || slot > 2) {
      throw IoError(line_error(file, line_no, "slot must be 0, 1 or 2"));
    }
    const int flat = triad.canonical_index() * 3 + slot;
    omega4[flat] = parse_double(fields[2], file, line_no);
    rows[flat].push_back({parse_double(fields[3], file, line_no),
                          {parse_double(fields[4], file, line_no),
                           parse_double(fields[5], file, line_no)}});
  }
  std::vector<std::string> missing;
  for (int flat = 0; flat < 24; ++flat) {
    if (rows[flat].empty()) {
      const PulseTriad triad = PulseTriad::all()[flat / 3];
      missing.push_back(triad.name() + ":" +
                        emission_name(triad.r, static_cast<DetectionSlot>(flat % 3)));
    }
  }
  if (!missing.empty()) {
    std::string joined;
    for (const auto& m : missing) joined += (joined.empty() ? "" : ", ") + m;
    throw IoError("signals file " + file.string() +
                  " is missing series: " + joined);
  }
  std::vector<double> grid_points;
  for (const Row& r : rows[0]) grid_points.push_back(r.t);
  std::array<IntegratedSignal, 24> signals;
  for (int flat = 0; flat < 24; ++flat) {
    if (rows[flat].size() != grid_points.size()) {
      throw IoError("signals file " + file.string() +
                    " has unequal series lengths");
    }
    IntegratedSignal sig;
    sig.triad = PulseTriad::all()[flat / 3];
    sig.omega4 = omega4[flat];
    for (std::size_t t = 0; t < rows[flat].size(); ++t) {
      if (rows[flat][t].t != grid_points[t]) {
        throw IoError("signals file " + file.string() +
                      " has inconsistent waiting times across series");
      }
      sig.series.push_back(rows[flat][t].v);
    }
    signals[flat] = std::move(sig);
  }
  try {
    return SignalSet(WaitingTimeGrid(std::move(grid_points)),
                     std::move(signals));
  } catch (const ValidationError& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

namespace {

ordered_json scheme_to_json(const EnergyLevelScheme& s) {
  return {{"w_Ig", s.w_Ig()},
          {"w_Og", s.w_Og()},
          {"w_OO_I", s.w_OO_I()},
          {"w_II_O", s.w_II_O()}};
}

EnergyLevelScheme scheme_from_json(const ordered_json& j,
                                   const std::filesystem::path& file) {
  return {require<double>(j, "w_Ig", file), require<double>(j, "w_Og", file),
          require<double>(j, "w_OO_I", file),
          require<double>(j, "w_II_O", file)};
}

ordered_json pulse_to_json(const PulseSpectrum& p) {
  return {{"center", p.center},
          {"fwhm", p.fwhm},
          {"peak_amplitude", p.peak_amplitude}};
}

PulseSpectrum pulse_from_json(const ordered_json& j, Exciton label,
                              const std::filesystem::path& file) {
  return {label, require<double>(j, "center", file),
          require<double>(j, "fwhm", file),
          require<double>(j, "peak_amplitude", file)};
}

}  // namespace

void write_manifest(const std::filesystem::path& file,
                    const DatasetManifest& m) {
  ordered_json j;
  j["format"] = "tgqpt-dataset-manifest";
  j["version"] = 1;
  j["scheme"] = scheme_to_json(m.scheme);
  j["dipoles"] = {
      {"mu_Ig", m.dipoles.mu_Ig},     {"mu_Og", m.dipoles.mu_Og},
      {"mu_II_I", m.dipoles.mu_II_I}, {"mu_II_O", m.dipoles.mu_II_O},
      {"mu_OO_O", m.dipoles.mu_OO_O}, {"mu_OO_I", m.dipoles.mu_OO_I},
      {"mu_IO_I", m.dipoles.mu_IO_I}, {"mu_IO_O", m.dipoles.mu_IO_O},
      {"f_OO", complex_json(m.dipoles.f_OO)},
      {"f_II", complex_json(m.dipoles.f_II)},
      {"f_OI", complex_json(m.dipoles.f_OI)},
      {"f_IO", complex_json(m.dipoles.f_IO)},
  };
  j["pulses"] = {{"O", pulse_to_json(m.pulses[0])},
                 {"I", pulse_to_json(m.pulses[1])}};
  j["kinetics"] = {
      {"tau_OO", m.kinetics.tau_OO},
      {"beta_OO", m.kinetics.beta_OO},
      {"omega_bar_OI", m.kinetics.omega_bar_OI},
      {"tau_OI", m.kinetics.tau_OI},
      {"beta_OI", m.kinetics.beta_OI},
      {"chi_IIII", m.kinetics.chi_IIII_const},
      {"nonsecular_amplitude", m.kinetics.nonsecular_amplitude},
  };
  j["grid"] = m.grid.points();
  j["lineshape_fwhm"] = m.lineshape_fwhm;
  j["sigma4"] = m.sigma4;
  j["noise"] = m.noise;
  j["seed"] = m.seed;
  auto out = open_out(file);
  out << j.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::filesystem::path& file) {
  const ordered_json j = load_json(file);
  if (require<std::string>(j, "format", file) != "tgqpt-dataset-manifest") {
    throw IoError(file.string() + " is not a dataset manifest");
  }
  DatasetManifest m;
  m.scheme = scheme_from_json(j.at("scheme"), file);
  const auto& d = j.at("dipoles");
  m.dipoles.mu_Ig = require<double>(d, "mu_Ig", file);
  m.dipoles.mu_Og = require<double>(d, "mu_Og", file);
  m.dipoles.mu_II_I = require<double>(d, "mu_II_I", file);
  m.dipoles.mu_II_O = require<double>(d, "mu_II_O", file);
  m.dipoles.mu_OO_O = require<double>(d, "mu_OO_O", file);
  m.dipoles.mu_OO_I = require<double>(d, "mu_OO_I", file);
  m.dipoles.mu_IO_I = require<double>(d, "mu_IO_I", file);
  m.dipoles.mu_IO_O = require<double>(d, "mu_IO_O", file);
  m.dipoles.f_OO = complex_from(d.at("f_OO"), "f_OO");
  m.dipoles.f_II = complex_from(d.at("f_II"), "f_II");
  m.dipoles.f_OI = complex_from(d.at("f_OI"), "f_OI");
  m.dipoles.f_IO = complex_from(d.at("f_IO"), "f_IO");
  m.pulses = {pulse_from_json(j.at("pulses").at("O"), Exciton::O, file),
              pulse_from_json(j.at("pulses").at("I"), Exciton::I, file)};
  const auto& k = j.at("kinetics");
  m.kinetics.tau_OO = require<double>(k, "tau_OO", file);
  m.kinetics.beta_OO = require<double>(k, "beta_OO", file);
  m.kinetics.omega_bar_OI = require<double>(k, "omega_bar_OI", file);
  m.kinetics.tau_OI = require<double>(k, "tau_OI", file);
  m.kinetics.beta_OI = require<double>(k, "beta_OI", file);
  m.kinetics.chi_IIII_const = require<double>(k, "chi_IIII", file);
  m.kinetics.nonsecular_amplitude =
      require<double>(k, "nonsecular_amplitude", file);
  m.grid = WaitingTimeGrid(require<std::vector<double>>(j, "grid", file));
  m.lineshape_fwhm = require<double>(j, "lineshape_fwhm", file);
  m.sigma4 = require<double>(j, "sigma4", file);
  m.noise = require<double>(j, "noise", file);
  m.seed = require<std::uint64_t>(j, "seed", file);
  return m;
}

std::vector<ProcessMatrix> ChiTrajectory::matrices() const {
  std::vector<ProcessMatrix> out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(ProcessMatrix::from_vector(v));
  return out;
}

namespace {

ordered_json trajectory_to_json(const WaitingTimeGrid& grid,
                                const std::vector<ProcessVector>& x) {
  ordered_json j;
  j["format"] = "tgqpt-chi-trajectory";
  j["T_fs"] = grid.points();
  j["parameter_names"] = process_vector_names();
  ordered_json rows = ordered_json::array();
  for (const auto& v : x) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < 16; ++k) row.push_back(v[k]);
    rows.push_back(std::move(row));
  }
  j["x"] = std::move(rows);
  return j;
}

}  // namespace

void write_chi_truth_json(const std::filesystem::path& file,
                          const ChiTrajectory& trajectory) {
  ordered_json j = trajectory_to_json(trajectory.grid, trajectory.x);
  j["kind"] = "ground_truth";
  auto out = open_out(file);
  out << j.dump(2) << "\n";
}

void write_inversion_json(const std::filesystem::path& file,
                          const WaitingTimeGrid& grid,
                          const std::vector<SolveResult>& results,
                          double kappa, bool trace_constraint,
                          const CoefficientSet& coefficients) {
  std::vector<ProcessVector> x;
  x.reserve(results.size());
  for (const auto& r : results) x.push_back(r.x);
  ordered_json j = trajectory_to_json(grid, x);
  j["kind"] = "inverted";
  j["condition_number"] = kappa;
  j["trace_constraint"] = trace_constraint;
  j["coefficient_convention"] =
      "A-H are the T=0 values of the normalized signals; F and H retain the "
      "negative sign of their excited-state-absorption pathway";
  j["coefficients"] = {
      {"A", complex_json(coefficients.a)}, {"B", complex_json(coefficients.b)},
      {"C", complex_json(coefficients.c)}, {"D", complex_json(coefficients.d)},
      {"E", complex_json(coefficients.e)}, {"F", complex_json(coefficients.f)},
      {"G", complex_json(coefficients.g)}, {"H", complex_json(coefficients.h)},
  };
  ordered_json diag = ordered_json::array();
  for (const auto& r : results) {
    diag.push_back({
        {"objective", r.objective},
        {"primal_residual", r.primal_residual},
        {"dual_residual", r.dual_residual},
        {"iterations", r.iterations},
        {"converged", r.converged},
        {"choi_eigenvalues",
         {r.choi_eigenvalues[0], r.choi_eigenvalues[1], r.choi_eigenvalues[2],
          r.choi_eigenvalues[3]}},
        {"min_leakage_eigenvalue", r.min_leakage_eigenvalue},
    });
  }
  j["diagnostics"] = std::move(diag);
  auto out = open_out(file);
  out << j.dump(2) << "\n";
}

ChiTrajectory read_chi_json(const std::filesystem::path& file) {
  const ordered_json j = load_json(file);
  if (require<std::string>(j, "format", file) != "tgqpt-chi-trajectory") {
    throw IoError(file.string() + " is not a chi trajectory file");
  }
  ChiTrajectory out;
  out.grid =
      WaitingTimeGrid(require<std::vector<double>>(j, "T_fs", file));
  const auto& rows = j.at("x");
  if (!rows.is_array() || rows.size() != out.grid.size()) {
    throw IoError("trajectory length does not match T_fs in " + file.string());
  }
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != 16) {
      throw IoError("each x row must hold 16 parameters in " + file.string());
    }
    ProcessVector v;
    for (int k = 0; k < 16; ++k) v[k] = row[k].get<double>();
    out.x.push_back(v);
  }
  return out;
}

void write_chi_csv(const std::filesystem::path& file,
                   const ChiTrajectory& trajectory) {
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
  auto out = open_out(file);
  out << "T_fs,entry,re,im\n";
  const auto matrices = trajectory.matrices();
  for (std::size_t t = 0; t < matrices.size(); ++t) {
    for (const auto& [name, idx] : entries) {
      const Complex v = matrices[t](idx[0], idx[1], idx[2], idx[3]);
      out << format_g17(trajectory.grid[t]) << "," << name << ","
          << format_g17(v.real()) << "," << format_g17(v.imag()) << "\n";
    }
  }
}

void write_scheme_json(const std::filesystem::path& file,
                       const LevelAssignment& assignment) {
  ordered_json j;
  j["format"] = "tgqpt-level-scheme";
  j["scheme"] = scheme_to_json(assignment.scheme);
  ordered_json checks = ordered_json::array();
  for (const auto& c : assignment.cross_checks) {
    checks.push_back({{"spectrum", c.spectrum},
                      {"peak", c.peak},
                      {"reference", c.reference},
                      {"deviation", c.deviation}});
  }
  j["cross_checks"] = std::move(checks);
  auto out = open_out(file);
  out << j.dump(2) << "\n";
}

void write_contribution_csv(const std::filesystem::path& file,
                            const std::array<ContributionRow, 8>& table) {
  auto out = open_out(file);
  out << "triad,final_IO,population,final_OI,reports_final_IO,"
         "reports_population,reports_final_OI,defined\n";
  for (const auto& row : table) {
    out << row.triad.name();
    for (int s = 0; s < 3; ++s) out << "," << format_g17(row.fraction[s]);
    for (int s = 0; s < 3; ++s) out << "," << row.reports_on[s];
    out << "," << (row.defined ? "yes" : "undefined") << "\n";
  }
}

void write_coefficients_json(const std::filesystem::path& file,
                             const CoefficientSet& c) {
  ordered_json j;
  j["format"] = "tgqpt-coefficients";
  j["A"] = complex_json(c.a);
  j["B"] = complex_json(c.b);
  j["C"] = complex_json(c.c);
  j["D"] = complex_json(c.d);
  j["E"] = complex_json(c.e);
  j["F"] = complex_json(c.f);
  j["G"] = complex_json(c.g);
  j["H"] = complex_json(c.h);
  auto out = open_out(file);
  out << j.dump(2) << "\n";
}

CoefficientSet read_coefficients_json(const std::filesystem::path& file) {
  const ordered_json j = load_json(file);
  if (require<std::string>(j, "format", file) != "tgqpt-coefficients") {
    throw IoError(file.string() + " is not a coefficients file");
  }
  CoefficientSet c;
  c.a = complex_from(j.at("A"), "A");
  c.b = complex_from(j.at("B"), "B");
  c.c = complex_from(j.at("C"), "C");
  c.d = complex_from(j.at("D"), "D");
  c.e = complex_from(j.at("E"), "E");
  c.f = complex_from(j.at("F"), "F");
  c.g = complex_from(j.at("G"), "G");
  c.h = complex_from(j.at("H"), "H");
  return c;
}

}  // namespace tgqpt
