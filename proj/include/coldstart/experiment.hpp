#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coldstart/acquisition.hpp"
#include "coldstart/learners.hpp"
#include "coldstart/protocol.hpp"
#include "coldstart/report.hpp"
#include "coldstart/types.hpp"

namespace coldstart {

struct DatasetConfig {
  std::string name = "blobs";  // mnist | agnews | embeddings | blobs | margin
  std::string images_path;     // mnist
  std::string labels_path;     // mnist
  std::string path;            // agnews csv or embedding file
  std::uint32_t hash_dim = 32768;  // agnews featurizer buckets
  // synthetic generators
  int n = 1000;
  int classes = 10;
  int dim = 16;
  double spread = 0.35;
  double radius = 10.0;
  double margin = 1.0;
  std::uint64_t seed = 7;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  LearnerSpec learner;
  std::vector<StrategyKind> strategies = {StrategyKind::Random};
  TrackConfig track;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int cutoff = 300;    // reporting prefix n; 0 = full length
  int max_steps = 0;   // episode truncation; 0 = full pool
  bool timing = true;  // wall-clock elapsed_seconds vs zeros
  std::string out_dir = "out";
};

// Flat "key = value" text; '#' comments and blank lines ignored. Unknown keys
// are an error so typos cannot silently fall back to defaults.
std::map<std::string, std::string> parse_config_text(const std::string& text);
ExperimentConfig config_from_pairs(
    const std::map<std::string, std::string>& pairs);
ExperimentConfig load_config(const std::string& path);

// Canonical flat rendering (sorted keys, out_dir excluded), used both for
// hashing and for the resolved copy written next to the outputs.
std::string render_config(const ExperimentConfig& config);

// 16-hex-digit FNV-1a of the canonical rendering; names the run directory so
// identical configs land in the same place and different ones never collide.
std::string config_hash(const ExperimentConfig& config);

Pool load_dataset(const DatasetConfig& dataset);

struct GridResult {
  StrategyKind strategy = StrategyKind::Random;
  std::vector<Trajectory> trajectories;  // one per seed, config order
  AggregateCurve curve;
  RunSummary summary;
};

struct RunOutcome {
  std::vector<GridResult> results;  // one per strategy, config order
  std::string table;                // cost-performance rows across strategies
  std::string out_dir;  // directory written (<out>/<hash>), empty if !write
};

// Runs the strategy x seed grid and writes per-seed trajectory CSVs, per-
// strategy aggregate CSVs and summary JSONs, the cost-performance table, the
// resolved config, and a manifest into <out>/<hash>/. parallel > 1 distributes
// episodes over worker threads; results do not depend on the worker count.
RunOutcome run_experiment(const ExperimentConfig& config, int parallel = 1,
                          bool write = true);

struct AblationOutcome {
  std::vector<int> batch_sizes;
  std::vector<RunOutcome> runs;  // parallel to batch_sizes
  std::string table;             // combined cost-performance rows
};

// Batch-size sweep holding everything else fixed. Every K must be > 1 (use an
// online-mode config for K=1); each leg reuses the base reset policy.
AblationOutcome run_ablation(const ExperimentConfig& base,
                             const std::vector<int>& batch_sizes,
                             int parallel = 1, bool write = true);

}  // namespace coldstart
