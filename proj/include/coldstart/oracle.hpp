#pragma once

#include <cstdint>
#include <vector>

#include "coldstart/types.hpp"

namespace coldstart {

// Expected number of mapping errors for an oracle that knows the true
// partition but must discover the C cluster->label assignments by guessing:
// C - H_C, where H_C is the C-th harmonic number. Each unresolved cluster
// costs one error per wrong guess, the true name is revealed after a miss,
// and names are never reused.
double harmonic_number(int c);
double expected_mapping_errors(int classes);

struct MappingSimulation {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation across trials
  double stderr_mean = 0.0;
  std::uint64_t trials = 0;
};

// Monte Carlo version of the same process: clusters visited in random order;
// per cluster, guess uniformly among unused names until the true one appears
// (errors = wrong guesses), consuming the true name afterwards.
MappingSimulation simulate_mapping_with_feedback(int classes,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed);

struct IntRange {
  int low = 0;
  int high = 0;
};

struct OracleBand {
  int classes = 0;
  double mapping_mean = 0.0;  // C - H_C
  IntRange boundary;          // residual: cluster-boundary confusions
  IntRange noise;             // residual: label noise / outliers
  IntRange band;              // composed floor band
};

// Composes the floor band from the mapping expectation plus residual ranges.
// The lower edge keeps just the guaranteed mapping cost; the upper edge adds
// the smaller residual cap, since boundary and noise errors overlap heavily on
// well-clustered pools rather than accumulate. C=1 maps perfectly: [0,0].
OracleBand oracle_band(int classes, IntRange boundary, IntRange noise);

struct KMeansResult {
  std::vector<std::vector<float>> centroids;
  std::vector<int> assignment;  // cluster index per pool position
  double inertia = 0.0;
  std::vector<double> inertia_history;  // objective after each Lloyd step
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding, iteration cap, and empty-cluster
// re-seeding from the point farthest from its current centroid.
KMeansResult kmeans(const std::vector<Instance>& instances, int k,
                    int max_iterations, std::uint64_t seed);

struct ClusterOracleResult {
  KMeansResult clustering;
  std::vector<std::int32_t> medoid_ids;     // instance id per cluster
  std::vector<std::int32_t> medoid_labels;  // true label of each medoid
  std::vector<double> cluster_purity;       // majority fraction per cluster
  double purity = 0.0;                      // pool-weighted purity
  std::int64_t errors = 0;  // pool labels disagreeing with the medoid label
};

// Cluster-first oracle: k-means partition, one medoid queried per cluster,
// every member scored against its cluster's medoid label.
ClusterOracleResult cluster_first_oracle(const Pool& pool, int k,
                                         int max_iterations,
                                         std::uint64_t seed);

struct OracleReport {
  int classes = 0;
  double mapping_mean = 0.0;
  MappingSimulation simulation;
  OracleBand band;
  bool clustered = false;
  ClusterOracleResult cluster;  // populated when a pool is supplied
};

// Full oracle-floor analysis: analytic mapping cost, Monte Carlo check, the
// composed band, and (optionally) the cluster-first oracle on a pool.
OracleReport oracle_report(int classes, std::uint64_t trials,
                           std::uint64_t seed, IntRange boundary,
                           IntRange noise, const Pool* pool = nullptr);

std::string oracle_report_json(const OracleReport& report);

}  // namespace coldstart
