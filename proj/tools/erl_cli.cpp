// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <CLI11.hpp>

#include "erl/c_api.h"

namespace {

int report(erl_status s, const std::string& what) {
  std::cerr << "erl: " << what << " failed (" << erl_status_string(s) << "): " << erl_last_error() << "\n";
  return static_cast<int>(s);
}

int run_train(const std::string& config_path, const std::string& algo, std::uint64_t seed, std::uint64_t steps,
              const std::string& out_dir) {
  erl_config* cfg = nullptr;
  erl_status s = config_path.empty() ? erl_config_default(&cfg) : erl_config_load(config_path.c_str(), &cfg);
  if (s != ERL_OK) return report(s, "loading config");
  s = erl_run_experiment(cfg, algo.c_str(), seed, steps, out_dir.c_str());
  erl_config_free(cfg);
  if (s != ERL_OK) return report(s, "training");
  std::cout << "run written to " << out_dir << "\n";
  return 0;
}

int run_compare(const std::vector<std::string>& runs) {
  std::vector<const char*> dirs;
  dirs.reserve(runs.size());
  for (const auto& r : runs) dirs.push_back(r.c_str());
  size_t needed = 0;
  erl_status s = erl_compare_runs(dirs.data(), dirs.size(), nullptr, 0, &needed);
  if (s != ERL_OK && s != ERL_ERROR_BUFFER_TOO_SMALL) return report(s, "compare");
  std::string text(needed, '\0');
  s = erl_compare_runs(dirs.data(), dirs.size(), text.data(), text.size(), &needed);
  if (s != ERL_OK) return report(s, "compare");
  text.resize(needed - 1);
  std::cout << text;
  return 0;
}

int run_show_config(const std::string& config_path) {
  erl_config* cfg = nullptr;
  erl_status s = config_path.empty() ? erl_config_default(&cfg) : erl_config_load(config_path.c_str(), &cfg);
  if (s != ERL_OK) return report(s, "loading config");
  size_t needed = 0;
  erl_config_to_json(cfg, nullptr, 0, &needed);
  std::string text(needed, '\0');
  s = erl_config_to_json(cfg, text.data(), text.size(), &needed);
  erl_config_free(cfg);
  if (s != ERL_OK) return report(s, "rendering config");
  text.resize(needed - 1);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Training churns through same-sized temporaries; keep freed memory in the
  // heap instead of returning it to the OS on every update.
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Evolutionary reinforcement learning: population-guided DDPG"};
  app.set_version_flag("--version", std::string(erl_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string algo = "erl";
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::string out_dir;
  auto* train = app.add_subcommand("train", "Run one algorithm arm and write a run directory");
  train->add_option("--config", config_path, "JSON config file (defaults when omitted)")->check(CLI::ExistingFile);
  train->add_option("--algo", algo, "Algorithm arm")->check(CLI::IsMember({"erl", "ddpg", "ea", "erl-ns"}));
  train->add_option("--seed", seed, "Master random seed");
  train->add_option("--steps", steps, "Cumulative environment-step budget (0 = config value)");
  train->add_option("--out", out_dir, "Output run directory")->required();

  std::vector<std::string> runs;
  auto* compare = app.add_subcommand("compare", "Summarize run directories per algorithm arm");
  compare->add_option("--runs", runs, "Run directories")->required()->expected(1, -1);

  std::string show_path;
  auto* show = app.add_subcommand("config", "Print the effective configuration as JSON");
  show->add_option("--config", show_path, "JSON config file")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*train) return run_train(config_path, algo, seed, steps, out_dir);
  if (*compare) return run_compare(runs);
  if (*show) return run_show_config(show_path);
  return 1;
}
