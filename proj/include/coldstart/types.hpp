#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coldstart {

class Rng;

// Class-probability distribution of length C.
using ProbVector = std::vector<double>;

struct Instance {
  std::int32_t id = 0;
  std::vector<float> features;
  std::int32_t label = 0;  // hidden from the learner until revealed
};

struct Pool {
  std::vector<Instance> instances;
  std::int32_t class_count = 0;
  std::int32_t feature_dim = 0;
  std::string source;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  // Throws std::invalid_argument when an invariant is broken: duplicate ids,
  // ragged feature rows, or labels outside [0, class_count).
  void validate() const;
};

enum class ScheduleMode { Online, Batch };

struct Schedule {
  ScheduleMode mode = ScheduleMode::Online;
  int k = 1;

  static Schedule online() { return {ScheduleMode::Online, 1}; }
  static Schedule batch(int k) { return {ScheduleMode::Batch, k}; }
};

enum class InitMode { Scratch, PretrainedFeatures };
enum class ResetPolicy { CarryForward, ResetEachBatch };

struct TrackConfig {
  InitMode initialization = InitMode::Scratch;
  Schedule schedule = Schedule::online();
  ResetPolicy reset_policy = ResetPolicy::CarryForward;

  // Online requires K == 1, Batch requires K > 1, and ResetEachBatch is only
  // meaningful on a batch schedule.
  void validate() const;

  // "SO", "SB", "PO" or "PB".
  std::string code() const;
};

struct StepRecord {
  std::int32_t step = 0;  // 1-based
  std::int32_t instance_id = 0;
  std::int32_t predicted = 0;
  std::int32_t truth = 0;
  bool correct = false;
  std::int32_t cumulative_error = 0;
  double elapsed_seconds = 0.0;  // cumulative wall clock; 0 when timing is off
};

struct Trajectory {
  std::vector<StepRecord> records;
  std::uint64_t seed = 0;
  TrackConfig track;
  std::string strategy;
  std::string learner;

  int length() const { return static_cast<int>(records.size()); }
  int final_error() const {
    return records.empty() ? 0 : records.back().cumulative_error;
  }
};

bool is_valid_prob(const ProbVector& p, double tol = 1e-6);

ProbVector uniform_prob(int classes);

// Numerically stable in-place softmax over logits.
void softmax_inplace(std::vector<double>& logits);

// Argmax with exact-score ties broken uniformly through tie_rng. The rng is
// consumed only when two or more entries tie for the maximum.
int argmax_with_ties(const ProbVector& p, Rng& tie_rng);

}  // namespace coldstart
