#include "coldstart/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

namespace coldstart {

Trajectory run_episode(const Pool& pool, const LearnerSpec& spec,
                       StrategyKind strategy, const TrackConfig& track,
                       std::uint64_t seed, const EpisodeOptions& opts) {
  pool.validate();
  std::unique_ptr<Learner> learner =
      make_learner(spec, pool.feature_dim, pool.class_count,
                   Rng::derive(seed, Stream::Learner));
  return run_episode(pool, *learner, strategy, track, seed,
                     spec.epochs_per_batch, opts);
}

Trajectory run_episode(const Pool& pool, Learner& learner,
                       StrategyKind strategy, const TrackConfig& track,
                       std::uint64_t seed, int epochs_per_batch,
                       const EpisodeOptions& opts) {
  pool.validate();
  track.validate();
  if (pool.empty()) {
    throw std::invalid_argument("run_episode: pool is empty");
  }
  if (opts.max_steps < 0) {
    throw std::invalid_argument("run_episode: max_steps must be >= 0");
  }
  if (learner.feature_dim() != pool.feature_dim ||
      learner.classes() != pool.class_count) {
    throw std::invalid_argument(
        "run_episode: learner dimensions do not match the pool");
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool.instances[i].id != static_cast<std::int32_t>(i)) {
      throw std::invalid_argument(
          "run_episode: pool ids must equal their positions");
    }
  }

  Rng acquisition_rng = Rng::derive(seed, Stream::Acquisition);
  Rng prediction_rng = Rng::derive(seed, Stream::Prediction);

  const int n = static_cast<int>(pool.size());
  const int total =
      opts.max_steps > 0 ? std::min(opts.max_steps, n) : n;
  const bool online = track.schedule.mode == ScheduleMode::Online;
  const int k = track.schedule.k;
  const bool reset_each = track.reset_policy == ResetPolicy::ResetEachBatch;

  std::vector<std::int32_t> candidates(static_cast<std::size_t>(n));
  std::iota(candidates.begin(), candidates.end(), 0);

  std::vector<LabeledExample> history;
  history.reserve(static_cast<std::size_t>(total));

  Trajectory trajectory;
  trajectory.seed = seed;
  trajectory.track = track;
  trajectory.strategy = strategy_name(strategy);
  trajectory.learner = learner.name();
  trajectory.records.reserve(static_cast<std::size_t>(total));

  int errors = 0;
  double elapsed = 0.0;
  const auto start = std::chrono::steady_clock::now();

  for (int t = 1; t <= total; ++t) {
    const std::int32_t id = select_instance(strategy, pool, candidates,
                                            learner, acquisition_rng);
    candidates.erase(
        std::lower_bound(candidates.begin(), candidates.end(), id));

    const Instance& inst = pool.instances[static_cast<std::size_t>(id)];
    const ProbVector p = learner.predict_proba(inst.features);
    if (!is_valid_prob(p)) {
      throw std::runtime_error("run_episode: learner emitted an invalid "
                               "probability vector at step " +
                               std::to_string(t));
    }
    const int predicted = argmax_with_ties(p, prediction_rng);
    const bool correct = predicted == inst.label;
    if (!correct) ++errors;

    history.push_back(
        {std::span<const float>(inst.features), inst.label});
    if (online) {
      learner.observe_with_prediction(inst.features, inst.label, predicted);
    } else if (t % k == 0 || t == total) {
      // Boundary fit over everything revealed so far; the pool-exhaustion
      // (or truncation) flush handles the final partial batch.
      learner.fit_batch(history, epochs_per_batch, reset_each);
    }

    if (opts.timing) {
      elapsed = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    }
    trajectory.records.push_back({t, id, predicted, inst.label, correct,
                                  errors, elapsed});
  }
  return trajectory;
}

int cumulative_error(const Trajectory& trajectory, int t) {
  if (t < 1 || t > trajectory.length()) {
    throw std::out_of_range("cumulative_error: step " + std::to_string(t) +
                            " outside 1.." +
                            std::to_string(trajectory.length()));
  }
  return trajectory.records[static_cast<std::size_t>(t) - 1].cumulative_error;
}

double random_baseline_expectation(int n, int classes) {
  if (n < 0) {
    throw std::invalid_argument("random_baseline_expectation: n must be >= 0");
  }
  if (classes < 2) {
    throw std::invalid_argument(
        "random_baseline_expectation: needs at least two classes");
  }
  return static_cast<double>(n) * (1.0 - 1.0 / classes);
}

double perceptron_mistake_bound(double radius, double margin) {
  if (radius <= 0.0 || margin <= 0.0) {
    throw std::invalid_argument(
        "perceptron_mistake_bound: radius and margin must be positive");
  }
  return (radius / margin) * (radius / margin);
}

}  // namespace coldstart
