#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coldstart/types.hpp"

namespace coldstart {

struct AggregateCurve {
  std::vector<double> mean_error;  // index t-1 holds E_t averaged over seeds
  std::vector<double> stderr_error;
  int seeds = 0;
  int cutoff = 0;
};

// Mean +- standard error of cumulative error across same-length prefixes of
// the given trajectories. `cutoff` trims to the first n steps; 0 keeps the
// shortest common length.
AggregateCurve aggregate_across_seeds(const std::vector<Trajectory>& runs,
                                      int cutoff = 0);

// Shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double value);

// step,instance_id,predicted,truth,correct,cumulative_error,elapsed_seconds
std::string trajectory_csv(const Trajectory& trajectory);
void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path);

// step,mean_error,stderr,n_seeds
std::string aggregate_csv(const AggregateCurve& curve);
void write_aggregate_csv(const AggregateCurve& curve, const std::string& path);

struct RunSummary {
  std::string learner;
  std::string strategy;
  std::string track;  // SO / SB / PO / PB
  std::vector<std::uint64_t> seed_list;
  int n = 0;  // reporting cutoff
  double mean_final_error = 0.0;
  double stderr_final_error = 0.0;
  double mean_wallclock_seconds = 0.0;
};

std::string summary_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::string& path);

// Cost-performance table: one row per configuration, sorted by track code
// then mean final error.
std::string cost_performance_table(std::vector<RunSummary> rows);

}  // namespace coldstart
