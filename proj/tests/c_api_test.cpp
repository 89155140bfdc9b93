#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "erl/c_api.h"

namespace {

namespace fs = std::filesystem;

const char* kTinyConfig = R"({
  "k": 3, "actor_hidden": [4], "critic_state_width": 4, "critic_action_width": 4,
  "critic_hidden": [4], "batch_size": 8, "buffer_capacity": 5000, "champion_episodes": 1,
  "step_budget": 800
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("erl_c_api_test_" + name);
  fs::remove_all(p);
  return p;
}

struct ConfigHandle {
  erl_config* p = nullptr;
  ~ConfigHandle() { erl_config_free(p); }
};

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(erl_version(), "1.0.0");
  EXPECT_STREQ(erl_status_string(ERL_OK), "ok");
  EXPECT_NE(std::string(erl_status_string(ERL_ERROR_CONFIG)), "");
  EXPECT_NE(std::string(erl_status_string(static_cast<erl_status>(99))), "");
}

TEST(CApi, NullArgumentsAreReported) {
  EXPECT_EQ(erl_config_default(nullptr), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_NE(std::string(erl_last_error()), "");
  erl_config* cfg = nullptr;
  EXPECT_EQ(erl_config_from_json(nullptr, &cfg), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_EQ(erl_config_load(nullptr, &cfg), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_EQ(erl_config_to_json(nullptr, nullptr, 0, nullptr), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_EQ(erl_trainer_create(nullptr, "erl", 0, nullptr), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_EQ(erl_trainer_run_generation(nullptr, nullptr), ERL_ERROR_NULL_ARGUMENT);
  EXPECT_EQ(erl_compare_runs(nullptr, 1, nullptr, 0, nullptr), ERL_ERROR_NULL_ARGUMENT);
  erl_config_free(nullptr);
  erl_trainer_free(nullptr);
}

TEST(CApi, ConfigErrorsMapToStatusCodes) {
  erl_config* cfg = nullptr;
  EXPECT_EQ(erl_config_from_json(R"({"psi": 1.5})", &cfg), ERL_ERROR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_NE(std::string(erl_last_error()).find("psi"), std::string::npos);
  EXPECT_EQ(erl_config_from_json(R"({"bogus": 1})", &cfg), ERL_ERROR_CONFIG);
  EXPECT_EQ(erl_config_load("/nonexistent/erl.json", &cfg), ERL_ERROR_IO);
}

TEST(CApi, JsonBufferSizingContract) {
  ConfigHandle cfg;
  ASSERT_EQ(erl_config_default(&cfg.p), ERL_OK);
  size_t needed = 0;
  EXPECT_EQ(erl_config_to_json(cfg.p, nullptr, 0, &needed), ERL_ERROR_BUFFER_TOO_SMALL);
  ASSERT_GT(needed, 1u);
  std::string small(needed - 1, '\0');
  EXPECT_EQ(erl_config_to_json(cfg.p, small.data(), small.size(), &needed), ERL_ERROR_BUFFER_TOO_SMALL);
  std::string buf(needed, '\0');
  ASSERT_EQ(erl_config_to_json(cfg.p, buf.data(), buf.size(), &needed), ERL_OK);
  EXPECT_EQ(buf.back(), '\0');
  buf.pop_back();

  ConfigHandle back;
  ASSERT_EQ(erl_config_from_json(buf.c_str(), &back.p), ERL_OK);
  std::string again(needed, '\0');
  ASSERT_EQ(erl_config_to_json(back.p, again.data(), again.size(), &needed), ERL_OK);
  again.pop_back();
  EXPECT_EQ(buf, again);
}

TEST(CApi, SaveAndLoad) {
  ConfigHandle cfg, loaded;
  ASSERT_EQ(erl_config_from_json(kTinyConfig, &cfg.p), ERL_OK);
  const fs::path dir = scratch("save");
  fs::create_directories(dir);
  const std::string path = (dir / "c.json").string();
  ASSERT_EQ(erl_config_save(cfg.p, path.c_str()), ERL_OK);
  ASSERT_EQ(erl_config_load(path.c_str(), &loaded.p), ERL_OK);
}

TEST(CApi, TrainerRunsGenerations) {
  ConfigHandle cfg;
  ASSERT_EQ(erl_config_from_json(kTinyConfig, &cfg.p), ERL_OK);
  erl_trainer* t = nullptr;
  EXPECT_EQ(erl_trainer_create(cfg.p, "nope", 1, &t), ERL_ERROR_INPUT);
  ASSERT_EQ(erl_trainer_create(cfg.p, "erl", 1, &t), ERL_OK);
  erl_generation_report r{};
  ASSERT_EQ(erl_trainer_run_generation(t, &r), ERL_OK);
  EXPECT_EQ(r.generation, 1u);
  EXPECT_EQ(r.cumulative_steps, 800u);  // 3 members + 1 learner episode
  EXPECT_EQ(r.sync_classification, ERL_SYNC_NONE);
  ASSERT_EQ(erl_trainer_run_generation(t, &r), ERL_OK);
  EXPECT_NE(r.sync_classification, ERL_SYNC_NONE);
  uint64_t steps = 0, counts[3] = {0, 0, 0};
  ASSERT_EQ(erl_trainer_cumulative_steps(t, &steps), ERL_OK);
  EXPECT_EQ(steps, 1600u);
  ASSERT_EQ(erl_trainer_sync_counts(t, counts), ERL_OK);
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 1u);
  erl_trainer_free(t);
}

TEST(CApi, RunAndCompare) {
  ConfigHandle cfg;
  ASSERT_EQ(erl_config_from_json(kTinyConfig, &cfg.p), ERL_OK);
  const std::string a = scratch("run_a").string();
  const std::string b = scratch("run_b").string();
  ASSERT_EQ(erl_run_experiment(cfg.p, "erl", 1, 0, a.c_str()), ERL_OK);
  ASSERT_EQ(erl_run_experiment(cfg.p, "ea", 1, 400, b.c_str()), ERL_OK);
  EXPECT_TRUE(fs::exists(fs::path(a) / "curve.csv"));
  EXPECT_EQ(erl_run_experiment(cfg.p, "bogus", 1, 0, a.c_str()), ERL_ERROR_INPUT);

  const char* dirs[] = {a.c_str(), b.c_str()};
  size_t needed = 0;
  EXPECT_EQ(erl_compare_runs(dirs, 2, nullptr, 0, &needed), ERL_ERROR_BUFFER_TOO_SMALL);
  std::string table(needed, '\0');
  ASSERT_EQ(erl_compare_runs(dirs, 2, table.data(), table.size(), &needed), ERL_OK);
  EXPECT_NE(table.find("erl"), std::string::npos);
  EXPECT_NE(table.find("ea"), std::string::npos);

  const char* missing[] = {"/nonexistent/run"};
  EXPECT_EQ(erl_compare_runs(missing, 1, nullptr, 0, &needed), ERL_ERROR_IO);
}

}  // namespace
