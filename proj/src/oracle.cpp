#include "coldstart/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "coldstart/rng.hpp"
#include "json.hpp"

namespace coldstart {
namespace {

double dist_sq(const std::vector<float>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = static_cast<double>(a[j]) - b[j];
    s += d * d;
  }
  return s;
}

double dist_sq_ff(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    s += d * d;
  }
  return s;
}

}  // namespace

double harmonic_number(int c) {
  if (c < 0) throw std::invalid_argument("harmonic_number: negative order");
  double h = 0.0;
  for (int j = 1; j <= c; ++j) h += 1.0 / j;
  return h;
}

double expected_mapping_errors(int classes) {
  if (classes < 1) {
    throw std::invalid_argument(
        "expected_mapping_errors: classes must be >= 1");
  }
  return static_cast<double>(classes) - harmonic_number(classes);
}

MappingSimulation simulate_mapping_with_feedback(int classes,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed) {
  if (classes < 1) {
    throw std::invalid_argument("mapping simulation: classes must be >= 1");
  }
  if (trials < 1) {
    throw std::invalid_argument("mapping simulation: trials must be >= 1");
  }
  Rng rng = Rng::derive(seed, Stream::Trials);

  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<int> order(static_cast<std::size_t>(classes));
  std::vector<int> unused;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    unused.assign(order.begin(), order.end());
    std::sort(unused.begin(), unused.end());

    int errors = 0;
    for (int cluster : order) {
      // One uniform guess among unused names; feedback then reveals and
      // consumes the true name whether or not the guess was right.
      const int guess = unused[rng.uniform_index(unused.size())];
      if (guess != cluster) ++errors;
      unused.erase(std::lower_bound(unused.begin(), unused.end(), cluster));
    }
    sum += errors;
    sum_sq += static_cast<double>(errors) * errors;
  }

  MappingSimulation sim;
  sim.trials = trials;
  sim.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        (sum_sq - sum * sim.mean) / static_cast<double>(trials - 1);
    sim.stddev = var > 0.0 ? std::sqrt(var) : 0.0;
    sim.stderr_mean = sim.stddev / std::sqrt(static_cast<double>(trials));
  }
  return sim;
}

OracleBand oracle_band(int classes, IntRange boundary, IntRange noise) {
  if (classes < 1) {
    throw std::invalid_argument("oracle_band: classes must be >= 1");
  }
  if (boundary.low > boundary.high || noise.low > noise.high ||
      boundary.low < 0 || noise.low < 0) {
    throw std::invalid_argument("oracle_band: invalid residual range");
  }
  OracleBand band;
  band.classes = classes;
  band.mapping_mean = expected_mapping_errors(classes);
  band.boundary = boundary;
  band.noise = noise;
  if (classes == 1) {
    band.band = {0, 0};  // a single class maps perfectly
    return band;
  }
  // Lower edge: only the guaranteed mapping cost. Upper edge: the mapping
  // ceiling plus the smaller residual cap - boundary and noise mistakes
  // overlap with each other and with mapping steps, so the caps are not
  // additive.
  band.band.low = static_cast<int>(std::floor(band.mapping_mean));
  band.band.high = static_cast<int>(std::ceil(band.mapping_mean)) +
                   std::min(boundary.high, noise.high);
  return band;
}

KMeansResult kmeans(const std::vector<Instance>& instances, int k,
                    int max_iterations, std::uint64_t seed) {
  const std::size_t n = instances.size();
  if (n == 0) throw std::invalid_argument("kmeans: no instances");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kmeans: k must be in [1, n]");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("kmeans: max_iterations must be >= 1");
  }
  const std::size_t dim = instances[0].features.size();
  Rng rng = Rng::derive(seed, Stream::Data);

  // k-means++ seeding: first center uniform, then D^2-weighted draws.
  std::vector<std::vector<double>> centers(
      static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
  std::vector<double> best_d2(n, std::numeric_limits<double>::max());
  {
    const std::size_t first = rng.uniform_index(n);
    for (std::size_t j = 0; j < dim; ++j) {
      centers[0][j] = instances[first].features[j];
    }
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 = dist_sq(instances[i].features, centers[c - 1]);
        if (d2 < best_d2[i]) best_d2[i] = d2;
        total += best_d2[i];
      }
      std::size_t pick;
      if (total > 0.0) {
        double target = rng.uniform_real() * total;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          target -= best_d2[i];
          if (target <= 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.uniform_index(n);  // all points coincide with a center
      }
      for (std::size_t j = 0; j < dim; ++j) {
        centers[c][j] = instances[pick].features[j];
      }
    }
  }

  KMeansResult result;
  result.assignment.assign(n, -1);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  std::vector<std::vector<double>> sums(
      static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = dist_sq(instances[i].features, centers[0]);
      for (int c = 1; c < k; ++c) {
        const double d = dist_sq(instances[i].features, centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        result.assignment[i] = best;
        changed = true;
      }
      inertia += best_d;
    }
    result.inertia = inertia;
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed && iter > 0) break;

    for (int c = 0; c < k; ++c) {
      counts[c] = 0;
      std::fill(sums[c].begin(), sums[c].end(), 0.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int c = result.assignment[i];
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) {
        sums[c][j] += instances[i].features[j];
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < dim; ++j) {
          centers[c][j] = sums[c][j] / static_cast<double>(counts[c]);
        }
      } else {
        // Re-seed an empty cluster from the point farthest from its current
        // centroid, then keep iterating.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d =
              dist_sq(instances[i].features, centers[result.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        for (std::size_t j = 0; j < dim; ++j) {
          centers[c][j] = instances[far].features[j];
        }
      }
    }
  }

  result.centroids.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    result.centroids[c].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      result.centroids[c][j] = static_cast<float>(centers[c][j]);
    }
  }
  return result;
}

ClusterOracleResult cluster_first_oracle(const Pool& pool, int k,
                                         int max_iterations,
                                         std::uint64_t seed) {
  pool.validate();
  ClusterOracleResult result;
  result.clustering = kmeans(pool.instances, k, max_iterations, seed);

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    members[result.clustering.assignment[i]].push_back(i);
  }
  for (int c = 0; c < k; ++c) {
    if (members[c].empty()) {
      throw std::runtime_error(
          "cluster_first_oracle: cluster " + std::to_string(c) +
          " is empty after convergence; the pool has fewer distinct points "
          "than clusters");
    }
  }

  result.medoid_ids.resize(static_cast<std::size_t>(k));
  result.medoid_labels.resize(static_cast<std::size_t>(k));
  result.cluster_purity.resize(static_cast<std::size_t>(k));
  std::int64_t pure_total = 0;

  for (int c = 0; c < k; ++c) {
    const std::vector<std::size_t>& m = members[c];
    // Medoid: member minimizing summed Euclidean distance to the others.
    std::size_t medoid = m[0];
    double best_sum = std::numeric_limits<double>::max();
    for (std::size_t a : m) {
      double s = 0.0;
      for (std::size_t b : m) {
        if (a != b) {
          s += std::sqrt(dist_sq_ff(pool.instances[a].features,
                                    pool.instances[b].features));
        }
      }
      if (s < best_sum) {
        best_sum = s;
        medoid = a;
      }
    }
    result.medoid_ids[c] = pool.instances[medoid].id;
    result.medoid_labels[c] = pool.instances[medoid].label;

    std::vector<std::int64_t> counts(
        static_cast<std::size_t>(pool.class_count), 0);
    for (std::size_t i : m) ++counts[pool.instances[i].label];
    const std::int64_t majority =
        *std::max_element(counts.begin(), counts.end());
    pure_total += majority;
    result.cluster_purity[c] =
        static_cast<double>(majority) / static_cast<double>(m.size());
    for (std::size_t i : m) {
      if (pool.instances[i].label != result.medoid_labels[c]) {
        ++result.errors;
      }
    }
  }
  result.purity =
      static_cast<double>(pure_total) / static_cast<double>(pool.size());
  return result;
}

OracleReport oracle_report(int classes, std::uint64_t trials,
                           std::uint64_t seed, IntRange boundary,
                           IntRange noise, const Pool* pool) {
  OracleReport report;
  report.classes = classes;
  report.mapping_mean = expected_mapping_errors(classes);
  report.simulation = simulate_mapping_with_feedback(classes, trials, seed);
  report.band = oracle_band(classes, boundary, noise);
  if (pool != nullptr) {
    report.clustered = true;
    report.cluster = cluster_first_oracle(*pool, classes, 100, seed);
  }
  return report;
}

std::string oracle_report_json(const OracleReport& report) {
  nlohmann::ordered_json j;
  j["classes"] = report.classes;
  j["e_map"] = report.mapping_mean;
  j["monte_carlo"] = {{"mean", report.simulation.mean},
                      {"stderr", report.simulation.stderr_mean},
                      {"trials", report.simulation.trials}};
  j["boundary_range"] = {report.band.boundary.low, report.band.boundary.high};
  j["noise_range"] = {report.band.noise.low, report.band.noise.high};
  j["band"] = {report.band.band.low, report.band.band.high};
  // The composition rule is a calibrated policy choice, not a derived law.
  j["band_rule"] = "floor(e_map) .. ceil(e_map) + min(boundary_high, noise_high)";
  if (report.clustered) {
    nlohmann::ordered_json c;
    c["clusters"] = report.cluster.medoid_ids.size();
    c["iterations"] = report.cluster.clustering.iterations;
    c["inertia"] = report.cluster.clustering.inertia;
    c["medoid_ids"] = report.cluster.medoid_ids;
    c["medoid_labels"] = report.cluster.medoid_labels;
    c["cluster_purity"] = report.cluster.cluster_purity;
    c["purity"] = report.cluster.purity;
    c["errors"] = report.cluster.errors;
    j["cluster_oracle"] = c;
  }
  return j.dump(2);
}

}  // namespace coldstart
