#include "coldstart/coldstart.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

#include "coldstart/experiment.hpp"
#include "coldstart/ingest.hpp"
#include "coldstart/oracle.hpp"
#include "coldstart/protocol.hpp"
#include "coldstart/report.hpp"

using namespace coldstart;

struct coldstart_pool {
  Pool pool;
};

struct coldstart_trajectory {
  Trajectory trajectory;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

// Maps an exception to a status, using the message to tell I/O failures apart
// from format/validation problems.
coldstart_status classify(const std::exception& e, coldstart_status fallback) {
  set_error(e.what());
  const std::string_view msg(e.what());
  if (msg.find("cannot open") != std::string_view::npos ||
      msg.find("failed reading") != std::string_view::npos ||
      msg.find("failed writing") != std::string_view::npos) {
    return COLDSTART_ERR_IO;
  }
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return fallback;
}

template <typename Fn>
coldstart_status guarded(coldstart_status fallback, Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return COLDSTART_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return COLDSTART_ERR_RUN;
  } catch (const std::exception& e) {
    return classify(e, fallback);
  } catch (...) {
    set_error("unknown error");
    return fallback;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

coldstart_status require(bool ok, const char* message) {
  if (ok) return COLDSTART_OK;
  set_error(message);
  return COLDSTART_ERR_INVALID_ARGUMENT;
}

TrackConfig track_from_params(const coldstart_episode_params& p) {
  if (p.track == nullptr) {
    throw std::invalid_argument("episode params: track is required");
  }
  const std::string code(p.track);
  TrackConfig track;
  if (code == "SO" || code == "SB") {
    track.initialization = InitMode::Scratch;
  } else if (code == "PO" || code == "PB") {
    track.initialization = InitMode::PretrainedFeatures;
  } else {
    throw std::invalid_argument("episode params: track must be SO, SB, PO or "
                                "PB, got '" + code + "'");
  }
  if (code[1] == 'O') {
    track.schedule = Schedule::online();
  } else {
    track.schedule = Schedule::batch(p.batch_size > 0 ? p.batch_size : 50);
  }
  track.reset_policy = p.reset_each_batch != 0 ? ResetPolicy::ResetEachBatch
                                               : ResetPolicy::CarryForward;
  track.validate();
  return track;
}

std::vector<std::uint64_t> parse_u64_csv(const char* csv, const char* what) {
  std::vector<std::uint64_t> values;
  std::string token;
  for (const char* p = csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!token.empty()) {
        values.push_back(std::stoull(token));
        token.clear();
      }
      if (*p == '\0') break;
    } else if (*p != ' ') {
      token.push_back(*p);
    }
  }
  if (values.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return values;
}

}  // namespace

extern "C" {

const char* coldstart_version(void) { return "1.0.0"; }

const char* coldstart_last_error(void) { return g_last_error.c_str(); }

void coldstart_string_free(char* s) { std::free(s); }

coldstart_status coldstart_pool_load_mnist(const char* images_path,
                                           const char* labels_path,
                                           coldstart_pool** out) {
  if (require(images_path && labels_path && out,
              "pool_load_mnist: null argument") != COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_PARSE, [&] {
    auto* p = new coldstart_pool{load_mnist_idx(images_path, labels_path)};
    *out = p;
  });
}

coldstart_status coldstart_pool_load_embeddings(const char* path,
                                                coldstart_pool** out) {
  if (require(path && out, "pool_load_embeddings: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_PARSE, [&] {
    auto* p = new coldstart_pool{load_embeddings(path)};
    *out = p;
  });
}

coldstart_status coldstart_pool_load_agnews(const char* path,
                                            uint32_t hash_dim,
                                            coldstart_pool** out) {
  if (require(path && out, "pool_load_agnews: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_PARSE, [&] {
    auto* p = new coldstart_pool{load_agnews_pool(path, hash_dim)};
    *out = p;
  });
}

coldstart_status coldstart_pool_make_blobs(int64_t n, int32_t classes,
                                           int32_t dim, double spread,
                                           uint64_t seed,
                                           coldstart_pool** out) {
  if (require(out != nullptr, "pool_make_blobs: null output") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_INVALID_ARGUMENT, [&] {
    auto* p = new coldstart_pool{make_blobs(static_cast<int>(n), classes, dim,
                                            spread, seed)};
    *out = p;
  });
}

coldstart_status coldstart_pool_save_embeddings(const coldstart_pool* pool,
                                                const char* path) {
  if (require(pool && path, "pool_save_embeddings: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_IO,
                 [&] { save_embeddings(pool->pool, path); });
}

int64_t coldstart_pool_size(const coldstart_pool* pool) {
  return pool == nullptr ? -1 : static_cast<int64_t>(pool->pool.size());
}

int32_t coldstart_pool_classes(const coldstart_pool* pool) {
  return pool == nullptr ? -1 : pool->pool.class_count;
}

int32_t coldstart_pool_dim(const coldstart_pool* pool) {
  return pool == nullptr ? -1 : pool->pool.feature_dim;
}

void coldstart_pool_free(coldstart_pool* pool) { delete pool; }

coldstart_status coldstart_run_episode(const coldstart_pool* pool,
                                       const coldstart_episode_params* params,
                                       coldstart_trajectory** out) {
  if (require(pool && params && out, "run_episode: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_RUN, [&] {
    if (params->learner == nullptr || params->strategy == nullptr) {
      throw std::invalid_argument(
          "episode params: learner and strategy are required");
    }
    LearnerSpec spec;
    spec.name = params->learner;
    const StrategyKind strategy = parse_strategy(params->strategy);
    const TrackConfig track = track_from_params(*params);
    EpisodeOptions opts;
    opts.max_steps = static_cast<int>(params->max_steps);
    opts.timing = params->timing != 0;
    auto* t = new coldstart_trajectory{run_episode(
        pool->pool, spec, strategy, track, params->seed, opts)};
    *out = t;
  });
}

int64_t coldstart_trajectory_length(const coldstart_trajectory* trajectory) {
  return trajectory == nullptr ? -1 : trajectory->trajectory.length();
}

coldstart_status coldstart_trajectory_step(
    const coldstart_trajectory* trajectory, int64_t index,
    coldstart_step* out) {
  if (require(trajectory && out, "trajectory_step: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  const auto& records = trajectory->trajectory.records;
  if (index < 0 || static_cast<std::size_t>(index) >= records.size()) {
    set_error("trajectory_step: index out of range");
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  const StepRecord& r = records[static_cast<std::size_t>(index)];
  out->step = r.step;
  out->instance_id = r.instance_id;
  out->predicted = r.predicted;
  out->truth = r.truth;
  out->correct = r.correct ? 1 : 0;
  out->cumulative_error = r.cumulative_error;
  out->elapsed_seconds = r.elapsed_seconds;
  g_last_error.clear();
  return COLDSTART_OK;
}

int64_t coldstart_trajectory_final_error(
    const coldstart_trajectory* trajectory) {
  return trajectory == nullptr ? -1 : trajectory->trajectory.final_error();
}

coldstart_status coldstart_trajectory_write_csv(
    const coldstart_trajectory* trajectory, const char* path) {
  if (require(trajectory && path, "trajectory_write_csv: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_IO,
                 [&] { write_trajectory_csv(trajectory->trajectory, path); });
}

void coldstart_trajectory_free(coldstart_trajectory* trajectory) {
  delete trajectory;
}

double coldstart_random_baseline(int64_t n, int32_t classes) {
  try {
    return random_baseline_expectation(static_cast<int>(n), classes);
  } catch (const std::exception& e) {
    set_error(e.what());
    return -1.0;
  }
}

coldstart_status coldstart_perceptron_bound(double radius, double margin,
                                            double* out) {
  if (require(out != nullptr, "perceptron_bound: null output") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_INVALID_ARGUMENT,
                 [&] { *out = perceptron_mistake_bound(radius, margin); });
}

coldstart_status coldstart_oracle_json(int32_t classes, int32_t boundary_low,
                                       int32_t boundary_high,
                                       int32_t noise_low, int32_t noise_high,
                                       uint64_t trials, uint64_t seed,
                                       const coldstart_pool* pool,
                                       char** out_json) {
  if (require(out_json != nullptr, "oracle_json: null output") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_RUN, [&] {
    const OracleReport report = oracle_report(
        classes, trials, seed, {boundary_low, boundary_high},
        {noise_low, noise_high}, pool == nullptr ? nullptr : &pool->pool);
    *out_json = dup_string(oracle_report_json(report));
    if (*out_json == nullptr) throw std::bad_alloc();
  });
}

coldstart_status coldstart_run_config(const char* config_path,
                                      const char* out_dir,
                                      const char* seeds_csv, int32_t cutoff,
                                      int32_t parallel, char** out_run_dir) {
  if (require(config_path && out_run_dir, "run_config: null argument") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_CONFIG, [&] {
    ExperimentConfig config = load_config(config_path);
    if (out_dir != nullptr && out_dir[0] != '\0') config.out_dir = out_dir;
    if (seeds_csv != nullptr && seeds_csv[0] != '\0') {
      config.seeds = parse_u64_csv(seeds_csv, "seeds");
    }
    if (cutoff >= 0) config.cutoff = cutoff;
    const RunOutcome outcome =
        run_experiment(config, parallel > 0 ? parallel : 1, true);
    *out_run_dir = dup_string(outcome.out_dir);
    if (*out_run_dir == nullptr) throw std::bad_alloc();
  });
}

coldstart_status coldstart_run_ablation(const char* config_path,
                                        const char* batch_sizes_csv,
                                        const char* out_dir, int32_t parallel,
                                        char** out_table) {
  if (require(config_path && batch_sizes_csv && out_table,
              "run_ablation: null argument") != COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_CONFIG, [&] {
    ExperimentConfig config = load_config(config_path);
    if (out_dir != nullptr && out_dir[0] != '\0') config.out_dir = out_dir;
    std::vector<int> batch_sizes;
    for (std::uint64_t v : parse_u64_csv(batch_sizes_csv, "batch sizes")) {
      batch_sizes.push_back(static_cast<int>(v));
    }
    const AblationOutcome outcome =
        run_ablation(config, batch_sizes, parallel > 0 ? parallel : 1, true);
    *out_table = dup_string(outcome.table);
    if (*out_table == nullptr) throw std::bad_alloc();
  });
}

coldstart_status coldstart_write_fixtures(const char* dir) {
  if (require(dir != nullptr, "write_fixtures: null directory") !=
      COLDSTART_OK) {
    return COLDSTART_ERR_INVALID_ARGUMENT;
  }
  return guarded(COLDSTART_ERR_IO, [&] {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    // Balanced blob embeddings, the stand-in for a pretrained-feature pool.
    save_embeddings(make_blobs(120, 4, 8, 0.3, 7),
                    (fs::path(dir) / "blobs.glemb").string());

    // Margin-separable binary pool for mistake-bound experiments.
    save_embeddings(generate_margin_dataset(200, 8, 10.0, 1.0, 7).pool,
                    (fs::path(dir) / "margin.glemb").string());

    // Tiny AG News style CSV exercising quoting rules.
    const char* csv =
        "\"1\",\"Markets rally\",\"Stocks rose, led by energy\"\n"
        "\"2\",\"Cup final tonight\",\"The \"\"derby\"\" kicks off at 8\"\n"
        "\"3\",\"Chip demand grows\",\"Foundries expand capacity\"\n"
        "\"4\",\"New telescope\",\"First light images released\"\n";
    std::ofstream agnews(fs::path(dir) / "agnews_sample.csv",
                         std::ios::binary);
    if (!agnews) throw std::runtime_error("cannot open agnews_sample.csv");
    agnews << csv;
    agnews.close();

    // Four 2x2 images in IDX layout (big-endian headers).
    auto be32 = [](std::string& s, std::uint32_t v) {
      s.push_back(static_cast<char>((v >> 24) & 0xff));
      s.push_back(static_cast<char>((v >> 16) & 0xff));
      s.push_back(static_cast<char>((v >> 8) & 0xff));
      s.push_back(static_cast<char>(v & 0xff));
    };
    std::string images;
    be32(images, 2051);
    be32(images, 4);
    be32(images, 2);
    be32(images, 2);
    const unsigned char pixels[4][4] = {{0, 64, 128, 255},
                                        {255, 255, 0, 0},
                                        {10, 20, 30, 40},
                                        {200, 150, 100, 50}};
    for (const auto& img : pixels) {
      for (unsigned char px : img) images.push_back(static_cast<char>(px));
    }
    std::string labels;
    be32(labels, 2049);
    be32(labels, 4);
    for (unsigned char y : {0, 1, 2, 3}) {
      labels.push_back(static_cast<char>(y));
    }
    std::ofstream img_out(fs::path(dir) / "tiny-images-idx3-ubyte",
                          std::ios::binary);
    if (!img_out) throw std::runtime_error("cannot open tiny image fixture");
    img_out.write(images.data(), static_cast<std::streamsize>(images.size()));
    std::ofstream lbl_out(fs::path(dir) / "tiny-labels-idx1-ubyte",
                          std::ios::binary);
    if (!lbl_out) throw std::runtime_error("cannot open tiny label fixture");
    lbl_out.write(labels.data(), static_cast<std::streamsize>(labels.size()));
  });
}

}  // extern "C"
