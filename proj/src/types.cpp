#include "coldstart/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "coldstart/rng.hpp"

namespace coldstart {

void Pool::validate() const {
  if (class_count <= 0) {
    throw std::invalid_argument("pool: class_count must be positive");
  }
  if (feature_dim <= 0) {
    throw std::invalid_argument("pool: feature_dim must be positive");
  }
  std::unordered_set<std::int32_t> seen;
  seen.reserve(instances.size());
  for (const Instance& inst : instances) {
    if (!seen.insert(inst.id).second) {
      throw std::invalid_argument("pool: duplicate instance id " +
                                  std::to_string(inst.id));
    }
    if (static_cast<std::int32_t>(inst.features.size()) != feature_dim) {
      throw std::invalid_argument(
          "pool: instance " + std::to_string(inst.id) + " has " +
          std::to_string(inst.features.size()) + " features, expected " +
          std::to_string(feature_dim));
    }
    if (inst.label < 0 || inst.label >= class_count) {
      throw std::invalid_argument(
          "pool: instance " + std::to_string(inst.id) + " label " +
          std::to_string(inst.label) + " outside [0, " +
          std::to_string(class_count) + ")");
    }
  }
}

void TrackConfig::validate() const {
  if (schedule.k < 1) {
    throw std::invalid_argument("track: batch size must be >= 1");
  }
  if (schedule.mode == ScheduleMode::Online && schedule.k != 1) {
    throw std::invalid_argument("track: online schedule requires k == 1");
  }
  if (schedule.mode == ScheduleMode::Batch && schedule.k <= 1) {
    throw std::invalid_argument("track: batch schedule requires k > 1");
  }
  if (reset_policy == ResetPolicy::ResetEachBatch &&
      schedule.mode != ScheduleMode::Batch) {
    throw std::invalid_argument(
        "track: reset-each-batch requires a batch schedule");
  }
}

std::string TrackConfig::code() const {
  std::string s;
  s += initialization == InitMode::Scratch ? 'S' : 'P';
  s += schedule.mode == ScheduleMode::Online ? 'O' : 'B';
  return s;
}

bool is_valid_prob(const ProbVector& p, double tol) {
  if (p.empty()) return false;
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

ProbVector uniform_prob(int classes) {
  if (classes <= 0) {
    throw std::invalid_argument("uniform_prob: classes must be positive");
  }
  return ProbVector(static_cast<std::size_t>(classes), 1.0 / classes);
}

void softmax_inplace(std::vector<double>& logits) {
  if (logits.empty()) return;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

int argmax_with_ties(const ProbVector& p, Rng& tie_rng) {
  if (p.empty()) {
    throw std::invalid_argument("argmax_with_ties: empty vector");
  }
  double best = p[0];
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > best) best = p[i];
  }
  // Exact equality defines a tie; near-misses keep the deterministic winner.
  std::vector<int> tied;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == best) tied.push_back(static_cast<int>(i));
  }
  if (tied.size() == 1) return tied[0];
  return tied[tie_rng.uniform_index(tied.size())];
}

}  // namespace coldstart
