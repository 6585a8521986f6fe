#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support/synthetic.hpp"
#include "tgqpt/io.hpp"

using namespace tgqpt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tgqpt_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("spectrum CSV round trip is exact") {
  TempDir dir;
  const auto data = synthetic::published_model_dataset();
  const auto spectra = spread_to_spectra(
      synthesize_signals(data.chi, data.grid, data.dipoles, data.pulses,
                         data.scheme),
      data.scheme, 100.0);
  const fs::path file = dir.path / "OOO.csv";
  write_spectrum_csv(file, spectra[0]);
  const TGSpectrum back = read_spectrum_csv(file);
  CHECK(back.triad() == spectra[0].triad());
  CHECK(back.frequency_axis() == spectra[0].frequency_axis());
  CHECK(back.waiting_times() == spectra[0].waiting_times());
  CHECK((back.values() - spectra[0].values()).cwiseAbs().maxCoeff() == 0.0);

  write_spectrum_set(dir.path, spectra);
  const SpectrumSet set = read_spectrum_set(dir.path);
  for (int i = 0; i < 8; ++i) {
    CHECK((set[i].values() - spectra[i].values()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("truncated spectrum files name the failing line") {
  TempDir dir;
  const fs::path file = dir.path / "bad.csv";
  {
    std::ofstream out(file);
    out << "# triad=OOO\n# n_freq=4\n# n_T=2\n16000,16010,16020,16030\n";
    out << "0,1,0,1,0,1,0,1,0\n";  // second body row missing
  }
  CHECK_THROWS_WITH_AS(read_spectrum_csv(file), doctest::Contains(":6"),
                       IoError);
  {
    std::ofstream out(file);
    out << "# triad=OOO\n# n_freq=4\n# n_T=1\n16000,16010,16020,16030\n";
    out << "0,1,0,oops,0,1,0,1,0\n";
  }
  CHECK_THROWS_WITH_AS(read_spectrum_csv(file), doctest::Contains("oops"),
                       IoError);
}

TEST_CASE("signals CSV round trip is exact") {
  TempDir dir;
  const auto data = synthetic::published_model_dataset(0.01, 3);
  const fs::path file = dir.path / "signals.csv";
  write_signals_csv(file, data.normalized);
  const SignalSet back = read_signals_csv(file);
  CHECK(back.grid() == data.normalized.grid());
  for (int flat = 0; flat < SignalSet::size(); ++flat) {
    CHECK(back.at(flat).series == data.normalized.at(flat).series);
    CHECK(back.at(flat).omega4 == data.normalized.at(flat).omega4);
  }
}

TEST_CASE("missing signal series are listed by triad and window") {
  TempDir dir;
  const auto data = synthetic::published_model_dataset();
  const fs::path file = dir.path / "signals.csv";
  write_signals_csv(file, data.normalized);
  // Drop every IOI row.
  std::ifstream in(file);
  std::string line, kept;
  while (std::getline(in, line)) {
    if (line.rfind("IOI", 0) != 0) kept += line + "\n";
  }
  std::ofstream(file) << kept;
  CHECK_THROWS_WITH_AS(read_signals_csv(file), doctest::Contains("IOI"),
                       IoError);
}

TEST_CASE("manifest round trip") {
  TempDir dir;
  DatasetManifest manifest;
  manifest.kinetics.nonsecular_amplitude = 0.05;
  manifest.dipoles.f_OI = Complex{0.9, 0.1};
  manifest.noise = 0.02;
  manifest.seed = 424242;
  const fs::path file = dir.path / "manifest.json";
  write_manifest(file, manifest);
  const DatasetManifest back = read_manifest(file);
  CHECK(back.scheme.w_Ig() == manifest.scheme.w_Ig());
  CHECK(back.dipoles.mu_OO_I == manifest.dipoles.mu_OO_I);
  CHECK(back.dipoles.f_OI == manifest.dipoles.f_OI);
  CHECK(back.kinetics.nonsecular_amplitude ==
        manifest.kinetics.nonsecular_amplitude);
  CHECK(back.grid == manifest.grid);
  CHECK(back.noise == manifest.noise);
  CHECK(back.seed == manifest.seed);
  CHECK(back.pulses[1].center == manifest.pulses[1].center);
}

TEST_CASE("chi trajectory JSON round trip") {
  TempDir dir;
  const auto grid = WaitingTimeGrid::published();
  ChiTrajectory truth;
  truth.grid = grid;
  for (const auto& chi : model_chi(KineticsModel::published_defaults(), grid)) {
    truth.x.push_back(chi.to_vector());
  }
  const fs::path file = dir.path / "chi_true.json";
  write_chi_truth_json(file, truth);
  const ChiTrajectory back = read_chi_json(file);
  REQUIRE(back.x.size() == truth.x.size());
  CHECK(back.grid == truth.grid);
  for (std::size_t t = 0; t < truth.x.size(); ++t) {
    CHECK(back.x[t] == truth.x[t]);
  }
}

TEST_CASE("inversion JSON captures diagnostics and reads back as a trajectory") {
  TempDir dir;
  const auto data = synthetic::published_model_dataset();
  const auto ext = extract_coefficients(data.normalized);
  const auto system = build_system(ext.coefficients);
  const auto results = solve_trajectory(system, data.normalized, {}, 2);
  const fs::path file = dir.path / "chi.json";
  write_inversion_json(file, data.grid, results, condition_number(system.M),
                       true, ext.coefficients);
  const ChiTrajectory back = read_chi_json(file);
  REQUIRE(back.x.size() == results.size());
  for (std::size_t t = 0; t < results.size(); ++t) {
    CHECK(back.x[t] == results[t].x);
  }

  const fs::path flat = dir.path / "chi.csv";
  write_chi_csv(flat, back);
  std::ifstream in(flat);
  std::string header;
  std::getline(in, header);
  CHECK(header == "T_fs,entry,re,im");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == back.x.size() * 10);
}

TEST_CASE("coefficients JSON round trip") {
  TempDir dir;
  const auto data = synthetic::published_model_dataset();
  const auto c = extract_coefficients(data.normalized).coefficients;
  const fs::path file = dir.path / "coefficients.json";
  write_coefficients_json(file, c);
  const CoefficientSet back = read_coefficients_json(file);
  CHECK(back.a == c.a);
  CHECK(back.f == c.f);
  CHECK(back.h == c.h);
}

}  // TEST_SUITE
