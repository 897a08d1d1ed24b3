#include "coldstart/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace coldstart {

StrategyKind parse_strategy(std::string_view name) {
  if (name == "random") return StrategyKind::Random;
  if (name == "confidence") return StrategyKind::Confidence;
  if (name == "least_confidence") return StrategyKind::LeastConfidence;
  if (name == "margin") return StrategyKind::Margin;
  if (name == "entropy") return StrategyKind::Entropy;
  throw std::invalid_argument("unknown acquisition strategy '" +
                              std::string(name) + "'");
}

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Random: return "random";
    case StrategyKind::Confidence: return "confidence";
    case StrategyKind::LeastConfidence: return "least_confidence";
    case StrategyKind::Margin: return "margin";
    case StrategyKind::Entropy: return "entropy";
  }
  throw std::invalid_argument("unknown strategy kind");
}

double score_confidence(const ProbVector& p) {
  double mx = p.at(0);
  for (double v : p) {
    if (v > mx) mx = v;
  }
  return mx;
}

double score_least_confidence(const ProbVector& p) {
  return score_confidence(p);
}

double score_margin(const ProbVector& p) {
  if (p.size() < 2) {
    throw std::invalid_argument("score_margin: needs at least two classes");
  }
  double top1 = -1.0, top2 = -1.0;
  for (double v : p) {
    if (v > top1) {
      top2 = top1;
      top1 = v;
    } else if (v > top2) {
      top2 = v;
    }
  }
  return top1 - top2;
}

double score_entropy(const ProbVector& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::int32_t select_instance(StrategyKind strategy, const Pool& pool,
                             const std::vector<std::int32_t>& candidates,
                             const Learner& learner, Rng& acquisition_rng) {
  if (candidates.empty()) {
    throw std::invalid_argument("select_instance: no unlabeled candidates");
  }
  if (strategy == StrategyKind::Random) {
    return candidates[acquisition_rng.uniform_index(candidates.size())];
  }

  // Scored strategies: maximize `higher_wins ? score : -score` over the pool.
  const bool higher_wins = strategy == StrategyKind::Confidence ||
                           strategy == StrategyKind::Entropy;
  double best = 0.0;
  std::vector<std::int32_t> tied;
  for (std::int32_t id : candidates) {
    const Instance& inst = pool.instances.at(static_cast<std::size_t>(id));
    const ProbVector p = learner.predict_proba(inst.features);
    double s;
    switch (strategy) {
      case StrategyKind::Confidence: s = score_confidence(p); break;
      case StrategyKind::LeastConfidence: s = score_least_confidence(p); break;
      case StrategyKind::Margin: s = score_margin(p); break;
      default: s = score_entropy(p); break;
    }
    if (!higher_wins) s = -s;
    if (tied.empty() || s > best) {
      best = s;
      tied.assign(1, id);
    } else if (s == best) {
      tied.push_back(id);
    }
  }
  if (tied.size() == 1) return tied[0];
  return tied[acquisition_rng.uniform_index(tied.size())];
}

}  // namespace coldstart
