#include "erl/c_api.h"

#include <cstring>
#include <new>
#include <string>

#include "erl/config.hpp"
#include "erl/erl.hpp"
#include "erl/errors.hpp"
#include "erl/harness.hpp"

struct erl_config {
  erl::ErlConfig value;
};

struct erl_trainer {
  std::unique_ptr<erl::Trainer> value;
};

namespace {

thread_local std::string g_last_error;

erl_status fail(erl_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <typename Fn>
erl_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const erl::ConfigError& e) {
    return fail(ERL_ERROR_CONFIG, e.what());
  } catch (const erl::InputError& e) {
    return fail(ERL_ERROR_INPUT, e.what());
  } catch (const erl::StateError& e) {
    return fail(ERL_ERROR_STATE, e.what());
  } catch (const erl::NumericError& e) {
    return fail(ERL_ERROR_NUMERIC, e.what());
  } catch (const erl::UsageError& e) {
    return fail(ERL_ERROR_USAGE, e.what());
  } catch (const erl::IoError& e) {
    return fail(ERL_ERROR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ERL_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ERL_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(ERL_ERROR_INTERNAL, "unknown error");
  }
}

erl_status copy_out(const std::string& text, char* buf, size_t capacity, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr || capacity < text.size() + 1) {
    return fail(ERL_ERROR_BUFFER_TOO_SMALL, "output buffer too small");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return ERL_OK;
}

erl_sync_class to_c(const std::optional<erl::Tag>& t) {
  if (!t) return ERL_SYNC_NONE;
  switch (*t) {
    case erl::Tag::elite:
      return ERL_SYNC_ELITE;
    case erl::Tag::selected:
      return ERL_SYNC_SELECTED;
    case erl::Tag::discarded:
      return ERL_SYNC_DISCARDED;
    case erl::Tag::none:
      break;
  }
  return ERL_SYNC_NONE;
}

}  // namespace

extern "C" {

const char* erl_version(void) { return erl::kVersion.data(); }

const char* erl_status_string(erl_status status) {
  switch (status) {
    case ERL_OK:
      return "ok";
    case ERL_ERROR_NULL_ARGUMENT:
      return "null argument";
    case ERL_ERROR_INPUT:
      return "input error";
    case ERL_ERROR_STATE:
      return "state error";
    case ERL_ERROR_NUMERIC:
      return "numeric error";
    case ERL_ERROR_USAGE:
      return "usage error";
    case ERL_ERROR_CONFIG:
      return "config error";
    case ERL_ERROR_IO:
      return "io error";
    case ERL_ERROR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case ERL_ERROR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* erl_last_error(void) { return g_last_error.c_str(); }

erl_status erl_config_default(erl_config** out) {
  if (!out) return fail(ERL_ERROR_NULL_ARGUMENT, "out is null");
  *out = nullptr;
  return guarded([&] {
    *out = new erl_config{};
    return ERL_OK;
  });
}

erl_status erl_config_load(const char* path, erl_config** out) {
  if (!path || !out) return fail(ERL_ERROR_NULL_ARGUMENT, "path or out is null");
  *out = nullptr;
  return guarded([&] {
    *out = new erl_config{erl::load_config(path)};
    return ERL_OK;
  });
}

erl_status erl_config_from_json(const char* json_text, erl_config** out) {
  if (!json_text || !out) return fail(ERL_ERROR_NULL_ARGUMENT, "json_text or out is null");
  *out = nullptr;
  return guarded([&] {
    *out = new erl_config{erl::config_from_json(json_text)};
    return ERL_OK;
  });
}

erl_status erl_config_to_json(const erl_config* cfg, char* buf, size_t capacity, size_t* needed) {
  if (!cfg) return fail(ERL_ERROR_NULL_ARGUMENT, "cfg is null");
  return guarded([&] { return copy_out(erl::config_to_json(cfg->value), buf, capacity, needed); });
}

erl_status erl_config_save(const erl_config* cfg, const char* path) {
  if (!cfg || !path) return fail(ERL_ERROR_NULL_ARGUMENT, "cfg or path is null");
  return guarded([&] {
    erl::save_config(cfg->value, path);
    return ERL_OK;
  });
}

void erl_config_free(erl_config* cfg) { delete cfg; }

erl_status erl_trainer_create(const erl_config* cfg, const char* algo, uint64_t seed, erl_trainer** out) {
  if (!cfg || !algo || !out) return fail(ERL_ERROR_NULL_ARGUMENT, "cfg, algo or out is null");
  *out = nullptr;
  return guarded([&] {
    const erl::ErlConfig arm = erl::configure_arm(cfg->value, erl::parse_algorithm(algo));
    *out = new erl_trainer{std::make_unique<erl::Trainer>(arm, seed)};
    return ERL_OK;
  });
}

erl_status erl_trainer_run_generation(erl_trainer* trainer, erl_generation_report* out) {
  if (!trainer || !out) return fail(ERL_ERROR_NULL_ARGUMENT, "trainer or out is null");
  return guarded([&] {
    const erl::GenerationReport r = trainer->value->run_generation();
    out->generation = r.generation;
    out->cumulative_steps = r.cumulative_steps;
    out->best_fitness = r.best_fitness;
    out->mean_fitness = r.mean_fitness;
    out->champion_score = r.champion_score;
    out->sync_classification = to_c(r.sync_classification);
    out->updates = r.updates;
    return ERL_OK;
  });
}

erl_status erl_trainer_cumulative_steps(const erl_trainer* trainer, uint64_t* out) {
  if (!trainer || !out) return fail(ERL_ERROR_NULL_ARGUMENT, "trainer or out is null");
  *out = trainer->value->cumulative_steps();
  return ERL_OK;
}

erl_status erl_trainer_sync_counts(const erl_trainer* trainer, uint64_t counts[3]) {
  if (!trainer || !counts) return fail(ERL_ERROR_NULL_ARGUMENT, "trainer or counts is null");
  const auto& c = trainer->value->sync_counts().counts;
  for (int i = 0; i < 3; ++i) counts[i] = c[static_cast<std::size_t>(i)];
  return ERL_OK;
}

void erl_trainer_free(erl_trainer* trainer) { delete trainer; }

erl_status erl_run_experiment(const erl_config* cfg, const char* algo, uint64_t seed, uint64_t step_budget,
                              const char* out_dir) {
  if (!cfg || !algo || !out_dir) return fail(ERL_ERROR_NULL_ARGUMENT, "cfg, algo or out_dir is null");
  return guarded([&] {
    erl::RunManifest m;
    m.config = cfg->value;
    if (step_budget > 0) m.config.step_budget = step_budget;
    m.config.seed = seed;
    m.config.validate();
    m.algorithm = erl::parse_algorithm(algo);
    m.seed = seed;
    erl::run_experiment(m, out_dir);
    return ERL_OK;
  });
}

erl_status erl_compare_runs(const char* const* run_dirs, size_t count, char* buf, size_t capacity,
                            size_t* needed) {
  if (!run_dirs && count > 0) return fail(ERL_ERROR_NULL_ARGUMENT, "run_dirs is null");
  return guarded([&] {
    std::vector<std::filesystem::path> dirs;
    for (size_t i = 0; i < count; ++i) {
      if (!run_dirs[i]) return fail(ERL_ERROR_NULL_ARGUMENT, "run_dirs contains a null entry");
      dirs.emplace_back(run_dirs[i]);
    }
    return copy_out(erl::format_comparison(erl::compare_runs(dirs)), buf, capacity, needed);
  });
}

}  // extern "C"
