#pragma once

#include "rsp/io.hpp"
#include "rsp/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rsp {

/// A resume attempt found checkpoint files that do not match the requested
/// configuration (or are unreadable). Mapped to exit code 2 by the CLI.
class CheckpointError : public IoError {
 public:
  using IoError::IoError;
};

/// Grid definition for the phase-transition experiment. A cell is one
/// (subspace_dim, corruption_size) pair; every cell runs `trials` trials and
/// each trial evaluates every requested method on the same instance.
struct SweepConfig {
  std::vector<Index> dims = {1};           // subspace_dim grid (true rank = k * dim)
  std::vector<double> corruptions = {0.4};
  Index p = 50;
  Index m = 200;
  Index n_per_class = 100;
  Index k = 2;
  int trials = 20;
  std::uint64_t base_seed = 0;
  std::vector<std::string> methods = {"rsp", "sim", "pca"};
  double lambda = 1.0 / 128.0;  // paper's SynMat default 2^-7
  Index rank_override = 0;      // 0 = use the true rank
  int max_iters = 1000;
  double tol = 1e-6;
  bool normalize = false;  // column-normalize inputs before solving
  int threads = 0;         // 0 = logical cores
  bool record_timing = true;  // false zeroes wall_ms for byte-comparable outputs
};

struct TrialRecord {
  int cell = 0;
  Index subspace_dim = 0;
  double corruption_size = 0.0;
  Index p = 0;
  int trial = 0;
  std::uint64_t seed = 0;  // per-trial master seed (instance/sensing/kmeans derive from it)
  std::string method;
  double snr_db = 0.0;
  double score = 0.0;
  double accuracy = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

struct CellAggregate {
  int cell = 0;
  Index subspace_dim = 0;
  double corruption_size = 0.0;
  Index p = 0;
  std::string method;
  int trials = 0;
  double mean_snr_db = 0.0;
  double mean_score = 0.0;
  double mean_accuracy = 0.0;
  double mean_wall_ms = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;      // canonical order: cell-major, then trial, then method
  std::vector<CellAggregate> aggregates; // cell-major, methods in config order
};

/// Column order of trials.csv / aggregate.csv, exposed for consumers.
std::string trial_csv_header();
std::string aggregate_csv_header();
std::string format_trial_row(const TrialRecord& r);

/// Runs every (cell, trial) unit, writing trials.csv, aggregate.csv,
/// aggregate.json and manifest.json under out_dir. Trials execute on
/// `threads` workers but records land in canonical order regardless, so a
/// finished sweep is byte-identical for any thread count (given
/// record_timing = false). With `resume`, previously completed units are
/// loaded from the checkpoint instead of re-run; a checkpoint whose config
/// does not match throws CheckpointError.
SweepResult run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir,
                      bool resume = false, std::ostream* progress = nullptr);

/// Single (cell, trial) unit, exposed for tests: one record per method.
std::vector<TrialRecord> run_sweep_unit(const SweepConfig& cfg, int cell, int trial);

/// JSON image of the config as stored in the manifest (threads excluded:
/// worker count may change between resumed runs without affecting results).
nlohmann::json sweep_config_json(const SweepConfig& cfg);

}  // namespace rsp
