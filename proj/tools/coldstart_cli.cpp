// Command-line front end; talks to the engine exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "coldstart/coldstart.h"

namespace {

int fail(const char* what) {
  std::fprintf(stderr, "%s: %s\n", what, coldstart_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cold-start benchmark engine"};
  app.require_subcommand(1);

  // run
  std::string run_config, run_out, run_seeds;
  int run_cutoff = -1;
  int run_parallel = 1;
  CLI::App* run = app.add_subcommand("run", "Execute a config-driven grid");
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--out", run_out, "Override the output directory");
  run->add_option("--seeds", run_seeds, "Override seeds (comma-separated)");
  run->add_option("--cutoff", run_cutoff, "Override the reporting cutoff");
  run->add_option("--parallel", run_parallel, "Worker threads for episodes");

  // oracle
  int oracle_classes = 10;
  int boundary_low = 2, boundary_high = 4, noise_low = 4, noise_high = 6;
  std::uint64_t oracle_trials = 100000;
  std::uint64_t oracle_seed = 0;
  std::string oracle_embeddings;
  CLI::App* oracle =
      app.add_subcommand("oracle", "Print the oracle-floor reference as JSON");
  oracle->add_option("--classes", oracle_classes, "Class count");
  oracle->add_option("--boundary-low", boundary_low, "Boundary residual low");
  oracle->add_option("--boundary-high", boundary_high,
                     "Boundary residual high");
  oracle->add_option("--noise-low", noise_low, "Noise residual low");
  oracle->add_option("--noise-high", noise_high, "Noise residual high");
  oracle->add_option("--trials", oracle_trials, "Monte Carlo trials");
  oracle->add_option("--seed", oracle_seed, "Simulation seed");
  oracle->add_option("--embeddings", oracle_embeddings,
                     "Embedding pool to run the cluster-first oracle on");

  // ablation
  std::string abl_config, abl_out;
  std::string abl_k = "10,50,200";
  int abl_parallel = 1;
  CLI::App* ablation =
      app.add_subcommand("ablation", "Sweep the batch size K over one config");
  ablation->add_option("--config", abl_config, "Config file")->required();
  ablation->add_option("--k", abl_k, "Batch sizes (comma-separated)");
  ablation->add_option("--out", abl_out, "Override the output directory");
  ablation->add_option("--parallel", abl_parallel,
                       "Worker threads for episodes");

  // fixtures
  std::string fixtures_out = "fixtures";
  CLI::App* fixtures =
      app.add_subcommand("fixtures", "Write small sample datasets");
  fixtures->add_option("--out", fixtures_out, "Target directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    char* dir = nullptr;
    const coldstart_status st = coldstart_run_config(
        run_config.c_str(), run_out.empty() ? nullptr : run_out.c_str(),
        run_seeds.empty() ? nullptr : run_seeds.c_str(), run_cutoff,
        run_parallel, &dir);
    if (st != COLDSTART_OK) return fail("run failed");
    std::printf("wrote %s\n", dir);
    coldstart_string_free(dir);
    return 0;
  }

  if (oracle->parsed()) {
    coldstart_pool* pool = nullptr;
    if (!oracle_embeddings.empty()) {
      if (coldstart_pool_load_embeddings(oracle_embeddings.c_str(), &pool) !=
          COLDSTART_OK) {
        return fail("oracle pool load failed");
      }
    }
    char* json = nullptr;
    const coldstart_status st = coldstart_oracle_json(
        oracle_classes, boundary_low, boundary_high, noise_low, noise_high,
        oracle_trials, oracle_seed, pool, &json);
    coldstart_pool_free(pool);
    if (st != COLDSTART_OK) return fail("oracle failed");
    std::printf("%s\n", json);
    coldstart_string_free(json);
    return 0;
  }

  if (ablation->parsed()) {
    char* table = nullptr;
    const coldstart_status st = coldstart_run_ablation(
        abl_config.c_str(), abl_k.c_str(),
        abl_out.empty() ? nullptr : abl_out.c_str(), abl_parallel, &table);
    if (st != COLDSTART_OK) return fail("ablation failed");
    std::printf("%s", table);
    coldstart_string_free(table);
    return 0;
  }

  if (fixtures->parsed()) {
    if (coldstart_write_fixtures(fixtures_out.c_str()) != COLDSTART_OK) {
      return fail("fixtures failed");
    }
    std::printf("wrote fixtures to %s\n", fixtures_out.c_str());
    return 0;
  }

  return 1;
}
