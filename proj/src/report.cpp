#include "coldstart/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace coldstart {
namespace {

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

bool same_config(const Trajectory& a, const Trajectory& b) {
  return a.learner == b.learner && a.strategy == b.strategy &&
         a.track.initialization == b.track.initialization &&
         a.track.schedule.mode == b.track.schedule.mode &&
         a.track.schedule.k == b.track.schedule.k &&
         a.track.reset_policy == b.track.reset_policy;
}

}  // namespace

AggregateCurve aggregate_across_seeds(const std::vector<Trajectory>& runs,
                                      int cutoff) {
  if (runs.empty()) {
    throw std::invalid_argument("aggregate: no trajectories");
  }
  int min_len = runs[0].length();
  for (const Trajectory& t : runs) {
    if (!same_config(runs[0], t)) {
      throw std::invalid_argument(
          "aggregate: trajectories differ in more than the seed");
    }
    min_len = std::min(min_len, t.length());
  }
  if (cutoff < 0 || cutoff > min_len) {
    throw std::invalid_argument("aggregate: cutoff " + std::to_string(cutoff) +
                                " exceeds shortest trajectory (" +
                                std::to_string(min_len) + ")");
  }
  const int n = cutoff == 0 ? min_len : cutoff;
  const double seeds = static_cast<double>(runs.size());

  AggregateCurve curve;
  curve.seeds = static_cast<int>(runs.size());
  curve.cutoff = n;
  curve.mean_error.resize(static_cast<std::size_t>(n));
  curve.stderr_error.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    double sum = 0.0;
    for (const Trajectory& r : runs) {
      sum += r.records[static_cast<std::size_t>(t)].cumulative_error;
    }
    const double mean = sum / seeds;
    curve.mean_error[static_cast<std::size_t>(t)] = mean;
    double sq = 0.0;
    for (const Trajectory& r : runs) {
      const double d =
          r.records[static_cast<std::size_t>(t)].cumulative_error - mean;
      sq += d * d;
    }
    // Sample standard deviation over seeds divided by sqrt(seeds); zero for a
    // single seed.
    curve.stderr_error[static_cast<std::size_t>(t)] =
        runs.size() > 1 ? std::sqrt(sq / (seeds - 1.0)) / std::sqrt(seeds)
                        : 0.0;
  }
  return curve;
}

std::string format_double(double value) {
  char buf[64];
  const std::to_chars_result r =
      std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out =
      "step,instance_id,predicted,truth,correct,cumulative_error,"
      "elapsed_seconds\n";
  for (const StepRecord& rec : trajectory.records) {
    out += std::to_string(rec.step);
    out += ',';
    out += std::to_string(rec.instance_id);
    out += ',';
    out += std::to_string(rec.predicted);
    out += ',';
    out += std::to_string(rec.truth);
    out += ',';
    out += rec.correct ? '1' : '0';
    out += ',';
    out += std::to_string(rec.cumulative_error);
    out += ',';
    out += format_double(rec.elapsed_seconds);
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const Trajectory& trajectory,
                          const std::string& path) {
  write_text_file(trajectory_csv(trajectory), path);
}

std::string aggregate_csv(const AggregateCurve& curve) {
  std::string out = "step,mean_error,stderr,n_seeds\n";
  for (int t = 0; t < curve.cutoff; ++t) {
    out += std::to_string(t + 1);
    out += ',';
    out += format_double(curve.mean_error[static_cast<std::size_t>(t)]);
    out += ',';
    out += format_double(curve.stderr_error[static_cast<std::size_t>(t)]);
    out += ',';
    out += std::to_string(curve.seeds);
    out += '\n';
  }
  return out;
}

void write_aggregate_csv(const AggregateCurve& curve, const std::string& path) {
  write_text_file(aggregate_csv(curve), path);
}

std::string summary_json(const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["learner"] = summary.learner;
  j["strategy"] = summary.strategy;
  j["track"] = summary.track;
  j["seed_list"] = summary.seed_list;
  j["n"] = summary.n;
  j["mean_final_error"] = summary.mean_final_error;
  j["stderr_final_error"] = summary.stderr_final_error;
  j["mean_wallclock_seconds"] = summary.mean_wallclock_seconds;
  return j.dump(2) + "\n";
}

void write_summary_json(const RunSummary& summary, const std::string& path) {
  write_text_file(summary_json(summary), path);
}

std::string cost_performance_table(std::vector<RunSummary> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RunSummary& a, const RunSummary& b) {
                     return std::tie(a.track, a.mean_final_error, a.learner,
                                     a.strategy) <
                            std::tie(b.track, b.mean_final_error, b.learner,
                                     b.strategy);
                   });
  std::string out =
      "learner,strategy,track,mean_final_error,mean_wallclock_seconds\n";
  for (const RunSummary& r : rows) {
    out += r.learner;
    out += ',';
    out += r.strategy;
    out += ',';
    out += r.track;
    out += ',';
    out += format_double(r.mean_final_error);
    out += ',';
    out += format_double(r.mean_wallclock_seconds);
    out += '\n';
  }
  return out;
}

}  // namespace coldstart
