#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcawalk/lattice.hpp"
#include "qcawalk/walks.hpp"

namespace qcaw {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kRecordSchemaVersion = 1;
inline constexpr const char* kWorkersEnv = "QCAWALK_WORKERS";

/// Where a run's NoiseModel comes from.
struct NoiseSpec {
  NoiseModel model;
  bool calibrate = false;  // fit (K, delta) to the reference gate table
};

struct RunSpec {
  std::string id;
  Lattice::Kind lattice = Lattice::Kind::cycle;
  std::vector<int> sizes;  // sweep axis: N of the cycle / side of the torus
  Variant variant = Variant::walk;
  std::optional<int> steps;  // default 50 for cycles, 20 for tori
  std::optional<InitKind> init;
  std::optional<std::pair<int, int>> init_site;  // (i, j); cycles use j = 0
  InitializerMode init_mode = InitializerMode::exact;
  std::optional<std::pair<int, int>> marked;
  double theta = std::numbers::pi / 4;
  std::vector<Backend> backends;
  std::optional<NoiseSpec> noise;  // overrides the experiment-level noise
  bool bitstrings = false;         // score raw register bitstrings too
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t shots = 10000;
  std::string output_dir;
  bool write_csv = true;
  NoiseSpec noise;
  std::vector<RunSpec> runs;
  nlohmann::json source;  // parsed document, for hashing and echo
};

/// Parses and validates a config. Throws ConfigError with a "line L: field F:"
/// prefix on schema violations; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical (sorted-key, compact) config dump, as hex.
std::string config_hash(const ExperimentConfig& config);

/// One concrete walk of a sweep.
struct RunPoint {
  std::string id;  // "<run>/<lattice>/<backend>"
  std::size_t run_index = 0;
  int size = 0;
  WalkConfig walk;
  bool bitstrings = false;
};

/// Expands runs x sizes x backends, resolving defaults and seeds.
std::vector<RunPoint> expand_points(const ExperimentConfig& config);

struct ExperimentOutput {
  nlohmann::json results;  // deterministic under (config, seed)
  nlohmann::json timings;  // wall-clock only
};

/// Worker count from QCAWALK_WORKERS (default 1).
int workers_from_env();

ExperimentOutput run_experiment(const ExperimentConfig& config, int workers = 1);

/// Writes results.json and timings.json atomically (tmp file + rename).
void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& out);

/// Serialized calibration result, as printed by the CLI.
nlohmann::json calibration_json(const CalibrationResult& result);
nlohmann::json noise_json(const NoiseModel& noise);

struct ReportFiles {
  std::vector<std::filesystem::path> series;
  std::filesystem::path sweep;
  std::filesystem::path summary;
};

/// Reads <dir>/results.json and writes series/<run>.csv (step, metric, value),
/// sweep.csv and summary.txt.
ReportFiles emit_report(const std::filesystem::path& dir);

}  // namespace qcaw
