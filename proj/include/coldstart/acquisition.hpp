#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "coldstart/learners.hpp"
#include "coldstart/rng.hpp"
#include "coldstart/types.hpp"

namespace coldstart {

enum class StrategyKind { Random, Confidence, LeastConfidence, Margin, Entropy };

StrategyKind parse_strategy(std::string_view name);
std::string strategy_name(StrategyKind kind);

// Max class probability; selected by pool argmax (easy-first).
double score_confidence(const ProbVector& p);

// Max class probability; selected by pool argmin.
double score_least_confidence(const ProbVector& p);

// Gap between the two largest probabilities; selected by pool argmin.
// Requires C >= 2.
double score_margin(const ProbVector& p);

// Shannon entropy in nats with 0*log 0 = 0; selected by pool argmax.
double score_entropy(const ProbVector& p);

// Picks one instance id from `candidates` (ascending pool ids, all unlabeled).
// Random draws uniformly; the scored strategies evaluate the learner on every
// candidate and apply their argmax/argmin, breaking exact score ties uniformly
// through acquisition_rng. The rng is consumed only for Random draws and for
// actual ties.
std::int32_t select_instance(StrategyKind strategy, const Pool& pool,
                             const std::vector<std::int32_t>& candidates,
                             const Learner& learner, Rng& acquisition_rng);

}  // namespace coldstart
