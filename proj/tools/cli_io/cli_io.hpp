#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spherefield/spectrum.hpp"

namespace spherefield::cli {

// Filesystem failures (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

inline constexpr int kSchemaVersion = 1;

const std::vector<std::string>& known_commands();

struct ExperimentManifest {
  int schema_version = kSchemaVersion;
  std::string command = "simulate";

  // spectrum
  double alpha = 3.0;
  double beta = 1.0;
  double c0 = 1.0;
  double c1 = 1.0;
  std::string g_profile = "const:1";  // or a path to a two-column CSV l,G(l)

  // run knobs
  double r = 0.3;
  double eps_hi = 1.0;
  double eps_lo = 0.1;
  int eps_count = 12;
  std::int64_t n_samples = 20000;
  int mesh_space = 8;
  int mesh_time = 8;
  std::vector<std::uint64_t> seeds{1};
  double tol = 1e-3;
  int ell_max = 0;  // 0: choose by tol
  std::vector<double> times{0.0};
  int sphere_points = 200;
  std::string backend = "kl";
  int n_configs = 200;
  int max_points = 6;
  double max_lag = 0.2;
  double theta_min = 0.05;
  double theta_max = 0.3;
  double t_lag = 0.0;
  double ladder_base = 1.5;
  int n_levels = 8;
  int n_probe = 20000;
  std::string output_dir = "out";

  friend bool operator==(const ExperimentManifest&, const ExperimentManifest&) = default;
};

nlohmann::json to_json(const ExperimentManifest& m);
ExperimentManifest manifest_from_json(const nlohmann::json& j);

// Flat "key = value" text, one key per line, '#' comments. Lists are
// comma-separated.
std::string to_key_value(const ExperimentManifest& m);
ExperimentManifest manifest_from_key_value(const std::string& text);

// Reads a manifest: JSON when the file ends in .json, key=value otherwise.
ExperimentManifest load_manifest(const std::filesystem::path& path);

// Empty iff the manifest can be run.
std::vector<std::string> validate(const ExperimentManifest& m);

// Builds the SpectrumParams (loading a tabulated profile if named).
SpectrumParams spectrum_of(const ExperimentManifest& m);
GProfile load_g_profile(const std::string& source);

// FNV-1a 64 of the canonical JSON (sorted keys, compact), output_dir excluded.
std::string manifest_hash(const ExperimentManifest& m);

// The manifest restricted to a single seed; per-seed output files carry
// this manifest's hash, so an n-seed run writes the same files as n
// single-seed runs.
ExperimentManifest single_seed(const ExperimentManifest& m, std::uint64_t seed);

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> files;
};

// Validates, executes the manifest's command and writes CSV + JSON sidecars
// into output_dir. Errors propagate as exceptions; see exit_code_for.
RunResult run(const ExperimentManifest& m);

// Maps an exception to the documented exit code and a machine-readable
// report ({"error": kind, "message": ..., "violations": [...]}).
int exit_code_for(const std::exception& e);
nlohmann::json error_report(const std::exception& e);

// Validation failure carrying the violation list.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace spherefield::cli
