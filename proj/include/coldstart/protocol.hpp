#pragma once

#include <cstdint>

#include "coldstart/acquisition.hpp"
#include "coldstart/learners.hpp"
#include "coldstart/types.hpp"

namespace coldstart {

struct EpisodeOptions {
  // 0 runs the pool to exhaustion; otherwise the episode stops after this
  // many steps (early-phase studies on large pools).
  int max_steps = 0;
  // When false, elapsed_seconds is recorded as 0 and outputs are bit-stable
  // across reruns.
  bool timing = true;
};

// Drives the select -> predict -> reveal -> update loop over the whole pool.
// The learner is built fresh from `spec`; `seed` fixes the acquisition,
// prediction and learner streams independently, so two runs with identical
// arguments produce identical trajectories.
Trajectory run_episode(const Pool& pool, const LearnerSpec& spec,
                       StrategyKind strategy, const TrackConfig& track,
                       std::uint64_t seed, const EpisodeOptions& opts = {});

// Same loop over a caller-supplied learner, which must be freshly
// initialized; `seed` still fixes the acquisition and prediction streams.
Trajectory run_episode(const Pool& pool, Learner& learner,
                       StrategyKind strategy, const TrackConfig& track,
                       std::uint64_t seed, int epochs_per_batch = 1,
                       const EpisodeOptions& opts = {});

// E_t: wrong predictions among the first t steps (1 <= t <= length).
int cumulative_error(const Trajectory& trajectory, int t);

// Expected errors of a uniform guesser over C balanced classes: N * (1 - 1/C).
double random_baseline_expectation(int n, int classes);

// Classic worst-case mistake cap R^2 / gamma^2 for margin-separable data.
double perceptron_mistake_bound(double radius, double margin);

}  // namespace coldstart
