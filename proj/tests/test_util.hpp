#pragma once

#include <utility>
#include <vector>

#include "coldstart/learners.hpp"
#include "coldstart/types.hpp"

namespace coldstart::test {

// Replays a fixed probability table: instance features must be {index}.
// Lets acquisition tests pin the exact scores each candidate produces.
class FakeLearner final : public Learner {
 public:
  FakeLearner(std::vector<ProbVector> probs, int classes)
      : Learner(1, classes, Rng(0)), probs_(std::move(probs)) {}

  ProbVector predict_proba(std::span<const float> x) const override {
    return probs_.at(static_cast<std::size_t>(x[0]));
  }
  void observe(std::span<const float>, int) override {}
  void restore_initial() override {}
  std::string name() const override { return "fake"; }

 private:
  std::vector<ProbVector> probs_;
};

// Counts protocol-driven updates; predictions are always uniform.
class ProbeLearner final : public Learner {
 public:
  ProbeLearner(int feature_dim, int classes)
      : Learner(feature_dim, classes, Rng(0)) {}

  ProbVector predict_proba(std::span<const float>) const override {
    return uniform_prob(classes_);
  }
  void observe(std::span<const float>, int) override { ++observed; }
  void fit_batch(const std::vector<LabeledExample>& history, int epochs,
                 bool reset) override {
    fit_sizes.push_back(history.size());
    fit_epochs.push_back(epochs);
    fit_resets.push_back(reset);
  }
  void restore_initial() override { ++restores; }
  std::string name() const override { return "probe"; }

  int observed = 0;
  int restores = 0;
  std::vector<std::size_t> fit_sizes;
  std::vector<int> fit_epochs;
  std::vector<bool> fit_resets;
};

// Pool of single-feature instances {0..n-1} with labels cycling over classes.
inline Pool index_pool(int n, int classes) {
  Pool pool;
  pool.class_count = classes;
  pool.feature_dim = 1;
  pool.source = "index";
  pool.instances.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    pool.instances[i].id = i;
    pool.instances[i].label = i % classes;
    pool.instances[i].features = {static_cast<float>(i)};
  }
  return pool;
}

}  // namespace coldstart::test
