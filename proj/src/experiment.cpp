#include "coldstart/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include "coldstart/ingest.hpp"
#include "json.hpp"

namespace coldstart {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string_view part =
        trim(s.substr(start, comma == std::string_view::npos
                                 ? std::string_view::npos
                                 : comma - start));
    if (!part.empty()) parts.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const std::string_view v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: " + key + " expects an integer, got '"
                                + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const std::string_view v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: " + key +
                                " expects a non-negative integer, got '" +
                                value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const std::string_view v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: " + key + " expects a number, got '" +
                                value + "'");
  }
  return out;
}

struct EpisodeJob {
  std::size_t strategy_index = 0;
  std::size_t seed_index = 0;
};

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> pairs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view line =
        trim(std::string_view(text).substr(pos, eol == std::string::npos
                                                    ? std::string::npos
                                                    : eol - pos));
    ++line_no;
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    if (!pairs.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": duplicate key '" + key + "'");
    }
  }
  return pairs;
}

ExperimentConfig config_from_pairs(
    const std::map<std::string, std::string>& pairs) {
  ExperimentConfig cfg;
  bool track_k_given = false;
  for (const auto& [key, value] : pairs) {
    if (key == "dataset.name") {
      cfg.dataset.name = value;
    } else if (key == "dataset.images") {
      cfg.dataset.images_path = value;
    } else if (key == "dataset.labels") {
      cfg.dataset.labels_path = value;
    } else if (key == "dataset.path") {
      cfg.dataset.path = value;
    } else if (key == "dataset.hash_dim") {
      cfg.dataset.hash_dim = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "dataset.n") {
      cfg.dataset.n = static_cast<int>(parse_int(key, value));
    } else if (key == "dataset.classes") {
      cfg.dataset.classes = static_cast<int>(parse_int(key, value));
    } else if (key == "dataset.dim") {
      cfg.dataset.dim = static_cast<int>(parse_int(key, value));
    } else if (key == "dataset.spread") {
      cfg.dataset.spread = parse_real(key, value);
    } else if (key == "dataset.radius") {
      cfg.dataset.radius = parse_real(key, value);
    } else if (key == "dataset.margin") {
      cfg.dataset.margin = parse_real(key, value);
    } else if (key == "dataset.seed") {
      cfg.dataset.seed = parse_u64(key, value);
    } else if (key == "learner.name") {
      cfg.learner.name = value;
    } else if (key == "learner.lr") {
      cfg.learner.learning_rate = parse_real(key, value);
      if (cfg.learner.learning_rate < 0.0) {
        throw std::invalid_argument("config: learner.lr must be >= 0");
      }
    } else if (key == "learner.k") {
      cfg.learner.knn_k = static_cast<int>(parse_int(key, value));
    } else if (key == "learner.epsilon") {
      cfg.learner.knn_epsilon = parse_real(key, value);
    } else if (key == "learner.hidden") {
      cfg.learner.hidden = static_cast<int>(parse_int(key, value));
    } else if (key == "learner.epochs_per_batch") {
      cfg.learner.epochs_per_batch = static_cast<int>(parse_int(key, value));
    } else if (key == "strategy") {
      cfg.strategies.clear();
      for (const std::string& name : split_list(value)) {
        cfg.strategies.push_back(parse_strategy(name));
      }
      if (cfg.strategies.empty()) {
        throw std::invalid_argument("config: strategy list is empty");
      }
      std::set<StrategyKind> unique(cfg.strategies.begin(),
                                    cfg.strategies.end());
      if (unique.size() != cfg.strategies.size()) {
        throw std::invalid_argument("config: strategy list has duplicates");
      }
    } else if (key == "track.init") {
      if (value == "scratch") {
        cfg.track.initialization = InitMode::Scratch;
      } else if (value == "pretrained") {
        cfg.track.initialization = InitMode::PretrainedFeatures;
      } else {
        throw std::invalid_argument(
            "config: track.init must be scratch or pretrained, got '" + value +
            "'");
      }
    } else if (key == "track.mode") {
      if (value == "online") {
        cfg.track.schedule.mode = ScheduleMode::Online;
      } else if (value == "batch") {
        cfg.track.schedule.mode = ScheduleMode::Batch;
      } else {
        throw std::invalid_argument(
            "config: track.mode must be online or batch, got '" + value + "'");
      }
    } else if (key == "track.k") {
      cfg.track.schedule.k = static_cast<int>(parse_int(key, value));
      track_k_given = true;
    } else if (key == "track.reset") {
      if (value == "carry") {
        cfg.track.reset_policy = ResetPolicy::CarryForward;
      } else if (value == "reset") {
        cfg.track.reset_policy = ResetPolicy::ResetEachBatch;
      } else {
        throw std::invalid_argument(
            "config: track.reset must be carry or reset, got '" + value + "'");
      }
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& s : split_list(value)) {
        cfg.seeds.push_back(parse_u64(key, s));
      }
      if (cfg.seeds.empty()) {
        throw std::invalid_argument("config: seeds list is empty");
      }
      std::set<std::uint64_t> unique(cfg.seeds.begin(), cfg.seeds.end());
      if (unique.size() != cfg.seeds.size()) {
        throw std::invalid_argument("config: seeds must be distinct");
      }
    } else if (key == "cutoff") {
      cfg.cutoff = static_cast<int>(parse_int(key, value));
      if (cfg.cutoff < 0) {
        throw std::invalid_argument("config: cutoff must be >= 0");
      }
    } else if (key == "max_steps") {
      cfg.max_steps = static_cast<int>(parse_int(key, value));
      if (cfg.max_steps < 0) {
        throw std::invalid_argument("config: max_steps must be >= 0");
      }
    } else if (key == "timing") {
      if (value == "wall") {
        cfg.timing = true;
      } else if (value == "off") {
        cfg.timing = false;
      } else {
        throw std::invalid_argument(
            "config: timing must be wall or off, got '" + value + "'");
      }
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  // The paper-default batch size applies when batch mode is chosen without an
  // explicit K.
  if (cfg.track.schedule.mode == ScheduleMode::Batch && !track_k_given) {
    cfg.track.schedule.k = 50;
  }
  cfg.track.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_pairs(parse_config_text(text));
}

std::string render_config(const ExperimentConfig& config) {
  std::string strategies;
  for (std::size_t i = 0; i < config.strategies.size(); ++i) {
    if (i) strategies += ',';
    strategies += strategy_name(config.strategies[i]);
  }
  std::string seeds;
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(config.seeds[i]);
  }

  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("cutoff", std::to_string(config.cutoff));
  kv("dataset.classes", std::to_string(config.dataset.classes));
  kv("dataset.dim", std::to_string(config.dataset.dim));
  kv("dataset.hash_dim", std::to_string(config.dataset.hash_dim));
  kv("dataset.images", config.dataset.images_path);
  kv("dataset.labels", config.dataset.labels_path);
  kv("dataset.margin", format_double(config.dataset.margin));
  kv("dataset.n", std::to_string(config.dataset.n));
  kv("dataset.name", config.dataset.name);
  kv("dataset.path", config.dataset.path);
  kv("dataset.radius", format_double(config.dataset.radius));
  kv("dataset.seed", std::to_string(config.dataset.seed));
  kv("dataset.spread", format_double(config.dataset.spread));
  kv("learner.epochs_per_batch",
     std::to_string(config.learner.epochs_per_batch));
  kv("learner.epsilon", format_double(config.learner.knn_epsilon));
  kv("learner.hidden", std::to_string(config.learner.hidden));
  kv("learner.k", std::to_string(config.learner.knn_k));
  kv("learner.lr", format_double(config.learner.learning_rate));
  kv("learner.name", config.learner.name);
  kv("max_steps", std::to_string(config.max_steps));
  kv("seeds", seeds);
  kv("strategy", strategies);
  kv("timing", config.timing ? "wall" : "off");
  kv("track.init", config.track.initialization == InitMode::Scratch
                       ? "scratch"
                       : "pretrained");
  kv("track.k", std::to_string(config.track.schedule.k));
  kv("track.mode", config.track.schedule.mode == ScheduleMode::Online
                       ? "online"
                       : "batch");
  kv("track.reset", config.track.reset_policy == ResetPolicy::CarryForward
                        ? "carry"
                        : "reset");
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::uint64_t h = fnv1a64(render_config(config));
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 0; i < 16; ++i) {
    s[15 - i] = hex[(h >> (4 * i)) & 0xf];
  }
  return s;
}

Pool load_dataset(const DatasetConfig& dataset) {
  if (dataset.name == "mnist") {
    if (dataset.images_path.empty() || dataset.labels_path.empty()) {
      throw std::invalid_argument(
          "config: mnist needs dataset.images and dataset.labels");
    }
    return load_mnist_idx(dataset.images_path, dataset.labels_path);
  }
  if (dataset.name == "agnews") {
    if (dataset.path.empty()) {
      throw std::invalid_argument("config: agnews needs dataset.path");
    }
    return load_agnews_pool(dataset.path, dataset.hash_dim);
  }
  if (dataset.name == "embeddings") {
    if (dataset.path.empty()) {
      throw std::invalid_argument("config: embeddings needs dataset.path");
    }
    return load_embeddings(dataset.path);
  }
  if (dataset.name == "blobs") {
    return make_blobs(dataset.n, dataset.classes, dataset.dim, dataset.spread,
                      dataset.seed);
  }
  if (dataset.name == "margin") {
    return generate_margin_dataset(dataset.n, dataset.dim, dataset.radius,
                                   dataset.margin, dataset.seed)
        .pool;
  }
  throw std::invalid_argument("config: unknown dataset '" + dataset.name +
                              "'");
}

RunOutcome run_experiment(const ExperimentConfig& config, int parallel,
                          bool write) {
  if (parallel < 1) {
    throw std::invalid_argument("run_experiment: parallel must be >= 1");
  }
  config.track.validate();
  if (config.strategies.empty() || config.seeds.empty()) {
    throw std::invalid_argument(
        "run_experiment: needs at least one strategy and one seed");
  }
  const Pool pool = load_dataset(config.dataset);

  std::vector<EpisodeJob> jobs;
  jobs.reserve(config.strategies.size() * config.seeds.size());
  for (std::size_t s = 0; s < config.strategies.size(); ++s) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      jobs.push_back({s, i});
    }
  }

  std::vector<std::vector<Trajectory>> grid(config.strategies.size());
  for (auto& row : grid) row.resize(config.seeds.size());
  std::vector<std::string> failures(jobs.size());

  EpisodeOptions opts;
  opts.max_steps = config.max_steps;
  opts.timing = config.timing;

  auto run_job = [&](const EpisodeJob& job, std::size_t index) {
    try {
      grid[job.strategy_index][job.seed_index] =
          run_episode(pool, config.learner, config.strategies[job.strategy_index],
                      config.track, config.seeds[job.seed_index], opts);
    } catch (const std::exception& e) {
      failures[index] = e.what();
    }
  };

  const int workers =
      std::min<int>(parallel, static_cast<int>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(jobs[i], i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs.size()) break;
          run_job(jobs[i], i);
        }
      });
    }
    for (std::thread& t : threads) t.join();
  }

  std::string first_failure;
  for (const std::string& f : failures) {
    if (!f.empty()) {
      first_failure = f;
      break;
    }
  }

  RunOutcome outcome;
  std::vector<RunSummary> table_rows;
  if (first_failure.empty()) {
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      GridResult result;
      result.strategy = config.strategies[s];
      result.trajectories = std::move(grid[s]);

      int min_len = result.trajectories[0].length();
      for (const Trajectory& t : result.trajectories) {
        min_len = std::min(min_len, t.length());
      }
      // Short pools report at their own length rather than failing the run.
      const int n = config.cutoff == 0 ? min_len
                                       : std::min(config.cutoff, min_len);
      result.curve = aggregate_across_seeds(result.trajectories, n);

      result.summary.learner = result.trajectories[0].learner;
      result.summary.strategy = strategy_name(result.strategy);
      result.summary.track = config.track.code();
      result.summary.seed_list = config.seeds;
      result.summary.n = n;
      result.summary.mean_final_error = result.curve.mean_error.back();
      result.summary.stderr_final_error = result.curve.stderr_error.back();
      double wall = 0.0;
      for (const Trajectory& t : result.trajectories) {
        wall += t.records.back().elapsed_seconds;
      }
      result.summary.mean_wallclock_seconds =
          wall / static_cast<double>(result.trajectories.size());
      table_rows.push_back(result.summary);
      outcome.results.push_back(std::move(result));
    }
    outcome.table = cost_performance_table(table_rows);
  }

  if (write) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::path(config.out_dir) / config_hash(config);
    fs::create_directories(dir);
    outcome.out_dir = dir.string();

    std::ofstream cfg_out(dir / "config.txt", std::ios::binary);
    cfg_out << render_config(config);
    cfg_out.close();

    nlohmann::ordered_json manifest;
    manifest["status"] = first_failure.empty() ? "complete" : "partial";
    manifest["config_hash"] = config_hash(config);
    nlohmann::ordered_json episodes = nlohmann::ordered_json::array();

    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      const std::string sname = strategy_name(config.strategies[s]);
      for (std::size_t i = 0; i < config.seeds.size(); ++i) {
        const std::size_t job = s * config.seeds.size() + i;
        nlohmann::ordered_json e;
        e["strategy"] = sname;
        e["seed"] = config.seeds[i];
        if (!failures[job].empty()) {
          e["status"] = "failed";
          e["error"] = failures[job];
        } else if (!first_failure.empty()) {
          e["status"] = "ok";
        } else {
          const Trajectory& t = outcome.results[s].trajectories[i];
          const std::string name =
              "trajectory_" + sname + "_seed" + std::to_string(config.seeds[i])
              + ".csv";
          write_trajectory_csv(t, (dir / name).string());
          e["status"] = "ok";
          e["steps"] = t.length();
          e["final_error"] = t.final_error();
          e["file"] = name;
        }
        episodes.push_back(e);
      }
      if (first_failure.empty()) {
        write_aggregate_csv(outcome.results[s].curve,
                            (dir / ("aggregate_" + sname + ".csv")).string());
        write_summary_json(outcome.results[s].summary,
                           (dir / ("summary_" + sname + ".json")).string());
      }
    }
    manifest["episodes"] = episodes;
    if (first_failure.empty()) {
      std::ofstream tbl(dir / "cost_performance.csv", std::ios::binary);
      tbl << outcome.table;
    }
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
  }

  if (!first_failure.empty()) {
    throw std::runtime_error("run_experiment: episode failed: " +
                             first_failure);
  }
  return outcome;
}

AblationOutcome run_ablation(const ExperimentConfig& base,
                             const std::vector<int>& batch_sizes,
                             int parallel, bool write) {
  if (batch_sizes.empty()) {
    throw std::invalid_argument("run_ablation: no batch sizes");
  }
  for (int k : batch_sizes) {
    if (k == 1) {
      throw std::invalid_argument(
          "run_ablation: K=1 is the online schedule; use track.mode = online");
    }
    if (k < 1) {
      throw std::invalid_argument("run_ablation: batch sizes must be >= 2");
    }
  }

  AblationOutcome outcome;
  outcome.batch_sizes = batch_sizes;
  std::string table =
      "k,learner,strategy,track,mean_final_error,mean_wallclock_seconds\n";
  for (int k : batch_sizes) {
    ExperimentConfig cfg = base;
    cfg.track.schedule = Schedule::batch(k);
    RunOutcome run = run_experiment(cfg, parallel, write);
    for (const GridResult& r : run.results) {
      table += std::to_string(k);
      table += ',';
      table += r.summary.learner;
      table += ',';
      table += r.summary.strategy;
      table += ',';
      table += r.summary.track;
      table += ',';
      table += format_double(r.summary.mean_final_error);
      table += ',';
      table += format_double(r.summary.mean_wallclock_seconds);
      table += '\n';
    }
    outcome.runs.push_back(std::move(run));
  }
  outcome.table = table;

  if (write) {
    namespace fs = std::filesystem;
    fs::create_directories(base.out_dir);
    ExperimentConfig batch_base = base;
    batch_base.track.schedule =
        Schedule::batch(batch_sizes[0]);  // representative leg for naming
    const std::string name = "ablation_" + config_hash(batch_base) + ".csv";
    std::ofstream out(fs::path(base.out_dir) / name, std::ios::binary);
    out << table;
  }
  return outcome;
}

}  // namespace coldstart
