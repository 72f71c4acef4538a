#pragma once

// Simulation configuration, run orchestration and on-disk artifacts.

#include "muskat/diagnostics.hpp"
#include "muskat/models.hpp"
#include "muskat/realline.hpp"
#include "muskat/timestep.hpp"

#include "json.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace muskat {

enum class Backend { spectral, realline };
enum class Method { rk4, rk45, duhamel };

std::string to_string(Backend b);
std::string to_string(Method m);

struct InitialData {
  /// cos_amplitude | boundary_family | caso1 | custom_samples | fourier
  std::string family = "cos_amplitude";
  double amplitude = 0.5;               ///< cos_amplitude, boundary_family (a), caso1
  double exponent = 6.0;                ///< caso1: amplitude e^{-x^exponent}
  std::string path;                     ///< custom_samples: snapshot file
  double constant = 0.0;                ///< fourier: c + Σ a_k cos kx + Σ b_k sin kx
  std::vector<std::pair<int, double>> cos_modes;
  std::vector<std::pair<int, double>> sin_modes;
};

struct ControllerConfig {
  Method method = Method::rk45;
  StepController step;
};

struct SimConfig {
  ModelSpec model;
  Backend backend = Backend::spectral;
  std::size_t resolution = 4096;
  double half_width = 10.0;
  InitialData initial_data;
  ControllerConfig controller;
  double t_end = 1.0;
  std::size_t sample_every = 1;
  std::size_t snapshot_every = 1; ///< in samples; 0 keeps only the first and last
  std::vector<std::string> checks;
  double check_tol = 1e-3;
  double balance_tol = 1e-6;
  double agreement_tol = 1e-3;
  bool dealias = true;
  bool allow_touching = false;
  bool symmetrized = false;
  bool profiles = false; ///< write f, f_x, Λf, f_xx at every sample (spectral only)
  double decay_tol = 1e-6;
  QuadratureSettings quadrature;

  /// Collects every violated constraint into one ConfigError.
  void validate() const;
};

/// Unknown keys and type mismatches are errors.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& c);
SimConfig load_config(const std::filesystem::path& path);
/// Applies "dotted.key=value" overrides; the value is parsed as JSON, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Samples the initial data on the configured grid.
std::vector<double> initial_state(const SimConfig& c);

struct Snapshot {
  Backend backend = Backend::spectral;
  std::string label = "f";
  double t = 0.0;
  double half_width = 0.0;     ///< realline only
  std::vector<double> nodes;   ///< realline only
  std::vector<double> values;
};

void emit_snapshot(const Snapshot& s, const std::filesystem::path& path);
/// Throws ParseError (with line number) on malformed input and InputError on a
/// backend mismatch when expected is given.
Snapshot load_snapshot(const std::filesystem::path& path, std::optional<Backend> expected = std::nullopt);

void write_records_csv(const std::vector<DiagnosticsRecord>& rows, const std::filesystem::path& path);
std::vector<DiagnosticsRecord> read_records_csv(const std::filesystem::path& path);
void write_checks_csv(const std::vector<BoundCheck>& rows, const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

enum class Termination { completed, halted_boundary, halted_dt_underflow };
std::string to_string(Termination t);

struct Artifact {
  std::string path; ///< relative to the output directory
  std::string sha256;
};

struct CheckSummary {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  bool refused = false;
  std::string reason;
};

struct RunManifest {
  nlohmann::json config;
  std::string code_version;
  std::string start_time;
  std::string end_time;
  Termination termination = Termination::completed;
  std::string message;
  double final_t = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::vector<Artifact> artifacts;
  std::vector<CheckSummary> checks;

  nlohmann::json to_json() const;
};

struct RunResult {
  RunManifest manifest;
  std::vector<DiagnosticsRecord> records;
  std::vector<std::vector<double>> samples; ///< state at each record
};

/// Runs the simulation and writes config.json, diagnostics.csv, checks/,
/// snapshots/ and manifest.json into out_dir. Halts are reported in the
/// manifest, not thrown.
RunResult run(const SimConfig& config, const std::filesystem::path& out_dir);

/// Re-evaluates the configured checks from a run directory's stored files.
std::vector<CheckSummary> recheck(const std::filesystem::path& run_dir);

struct ComparisonRow {
  double t = 0.0;
  double linf_confined = 0.0;
  double linf_deep = 0.0;
  double linf_gap = 0.0;      ///< linf_confined - linf_deep
  double max_pointwise = 0.0; ///< max_x |f^{π/2} - f^∞|
  bool ordered = true;        ///< linf_confined >= linf_deep (t > 0)
};

struct Comparison {
  RunResult confined;
  RunResult deep;
  std::vector<ComparisonRow> rows;
};

/// Runs the pair into out_dir/confined and out_dir/deep and writes comparison.csv.
/// Refuses configs whose grids or sample times differ.
Comparison compare_depths(const SimConfig& confined, const SimConfig& deep, const std::filesystem::path& out_dir);
/// The confined_muskat/deep_muskat pair derived from one base config.
Comparison compare_depths(const SimConfig& base, const std::filesystem::path& out_dir);

struct SweepEntry {
  double a = 0.0;
  RunResult result;
  double max_linf = 0.0;
  bool admissible = true; ///< sampled ‖f‖∞ never exceeded l
};

/// One confined-model run per a from a cos x + l - a with touching allowed,
/// into out_dir/a_<a>; writes sweep.json.
std::vector<SweepEntry> boundary_sweep(const SimConfig& base, const std::vector<double>& a_values,
                                       const std::filesystem::path& out_dir);

} // namespace muskat
