#pragma once

#include "irsfd/baselines.hpp"
#include "irsfd/channel_gen.hpp"
#include "irsfd/config_file.hpp"
#include "irsfd/ewmmse.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsfd {

inline constexpr int kResultsSchemaVersion = 1;

enum class SweepKind { rho, snr };

struct ExperimentSpec {
  SystemConfig sys;  ///< power budgets are overwritten from the SNR of each point
  GeometryConfig geo;
  CsiErrorPolicy csi;
  SolverOptions solver;
  double noise_power = 1.0;  ///< sigma_0^2 = sigma_j^2, linear

  SweepKind sweep = SweepKind::rho;
  double snr_db = 30.0;                 ///< fixed SNR of a rho sweep
  std::vector<double> rho_list;         ///< rho sweep points
  double rho = 0.4;                     ///< fixed rho of an SNR sweep
  std::vector<double> snr_db_list;      ///< SNR sweep points

  std::vector<SchemeId> schemes;
  bool analytical = true;  ///< add the lower-bound series of FD-IRS-RB
  int n_scenarios = 50;
  int n_error_draws = 200;
  std::uint64_t master_seed = 1;
  int threads = 1;
  bool write_traces = true;
  std::string out_dir = "out";
};

/// "desk" (small arrays, minutes) or "paper" (full-size arrays). Throws
/// ConfigError for any other name.
ExperimentSpec preset(const std::string& name);

/// Applies one key/value. Throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
void apply_settings(ExperimentSpec& spec, const KeyValues& kv);

/// Every setting in a fixed order, formatted so that applying the list to
/// any spec reproduces this one.
KeyValues spec_to_key_values(const ExperimentSpec& spec);

/// Every violated invariant; empty means valid.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

/// Git blob id (SHA-1 of "blob <len>\0<content>") of the canonical
/// key = value text, leaving out settings that cannot change results
/// (threads, out_dir, write_traces).
std::string config_hash(const ExperimentSpec& spec);

/// One sweep point of one series.
struct SeriesPoint {
  double x = 0.0;  ///< rho or SNR in dB
  double snr_db = 0.0;
  double rho = 0.0;
  double mean = 0.0;
  double std_error = 0.0;  ///< across scenarios
  int n = 0;
  double mean_r_ul = 0.0;
  double mean_r_dl = 0.0;
  std::vector<double> per_scenario;
};

struct Series {
  std::string label;
  bool analytical = false;
  std::vector<SeriesPoint> points;
};

struct SolverDiagnostics {
  int runs = 0;
  int converged_runs = 0;
  int monotonicity_violations = 0;  ///< sweeps whose bound dropped by more than 1e-6 relative
  double worst_relative_drop = 0.0;
  double max_power_excess = 0.0;     ///< relative to the budget
  double max_complementarity = 0.0;  ///< |lambda (power - budget)| / budget
};

struct SweepResult {
  SweepKind sweep = SweepKind::rho;
  std::vector<Series> series;
  SolverDiagnostics diag;
};

/// Runs every (point, scenario) pair on `spec.threads` workers. Results
/// depend only on the spec and seed, never on the worker count. Per-iteration
/// solver records go to `traces` when it is non-null, one entry per series
/// and point in series-major order.
struct TraceLine {
  int scenario = 0;
  int slot = 0;  ///< 0 for FD; 0 = UL slot, 1 = DL slot for HD
  IterationRecord record;
};
using TraceTable = std::vector<std::vector<std::vector<TraceLine>>>;  // [scheme][point][line]

SweepResult run_experiment(const ExperimentSpec& spec, TraceTable* traces = nullptr,
                           std::ostream* log = nullptr);

std::string sweep_name(SweepKind k);

/// Fixed, versioned CSV: one row per (series, point).
std::string results_csv(const SweepResult& result);

/// Results plus spec echo and config hash.
std::string results_json(const SweepResult& result, const ExperimentSpec& spec);

/// Parses the series back from results_json output. Throws ConfigError on
/// malformed input.
SweepResult parse_results_json(const std::string& text);

/// Writes results.csv, results.json, sweep.svg and (if enabled)
/// trace/<scheme>_p<point>.jsonl into out_dir. Throws IoError.
void write_outputs(const SweepResult& result, const ExperimentSpec& spec,
                   const TraceTable* traces, const std::filesystem::path& out_dir,
                   std::ostream* log = nullptr);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace irsfd
