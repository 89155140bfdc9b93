#include "erl/config.hpp"

#include <string>

#include "erl/errors.hpp"

namespace erl {

namespace {

void check(bool ok, const char* key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void ErlConfig::validate() const {
  check(env == "pendulum" || env == "sparse-pendulum", "env", "unknown environment '" + env + "'");
  check(k == 0 || k >= 2, "k", "population size must be 0 (disabled) or >= 2");
  check(psi > 0.0 && psi < 1.0, "psi", "elite fraction must lie in (0, 1)");
  check(xi >= 1, "xi", "number of evaluation trials must be >= 1");
  check(omega >= 1, "omega", "synchronization period must be >= 1");
  check(probability(mutation.mut_prob), "mutation.mut_prob", "must lie in [0, 1]");
  check(probability(mutation.mut_frac), "mutation.mut_frac", "must lie in [0, 1]");
  check(mutation.mut_strength > 0.0, "mutation.mut_strength", "must be > 0");
  check(probability(mutation.supermut_prob), "mutation.supermut_prob", "must lie in [0, 1]");
  check(probability(mutation.reset_prob), "mutation.reset_prob", "must lie in [0, 1]");
  check(mutation.weight_limit > 0.0, "mutation.weight_limit", "must be > 0");
  check(tournament_size >= 1, "tournament_size", "must be >= 1");
  check(gamma > 0.0 && gamma <= 1.0, "gamma", "discount must lie in (0, 1]");
  check(tau > 0.0 && tau <= 1.0, "tau", "soft-update rate must lie in (0, 1]");
  check(batch_size >= 1, "batch_size", "must be >= 1");
  check(buffer_capacity >= 1, "buffer_capacity", "must be >= 1");
  check(batch_size <= buffer_capacity, "batch_size", "must not exceed buffer_capacity");
  check(actor_lr > 0.0, "actor_lr", "must be > 0");
  check(critic_lr > 0.0, "critic_lr", "must be > 0");
  check(clip_norm > 0.0, "clip_norm", "must be > 0");
  check(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1", "must lie in [0, 1)");
  check(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2", "must lie in [0, 1)");
  check(adam_epsilon > 0.0, "adam_epsilon", "must be > 0");
  check(update_ratio >= 0.0, "update_ratio", "must be >= 0");
  check(ou_theta >= 0.0, "ou.theta", "must be >= 0");
  check(ou_sigma >= 0.0, "ou.sigma", "must be >= 0");
  check(!actor_hidden.empty(), "actor_hidden", "needs at least one hidden layer");
  for (auto h : actor_hidden) check(h >= 1, "actor_hidden", "layer widths must be >= 1");
  for (auto h : critic_hidden) check(h >= 1, "critic_hidden", "layer widths must be >= 1");
  check(critic_state_width >= 1, "critic_state_width", "must be >= 1");
  check(critic_action_width >= 1, "critic_action_width", "must be >= 1");
  check(champion_episodes >= 1, "champion_episodes", "must be >= 1");
  check(step_budget >= 1, "step_budget", "must be >= 1");
  check(workers >= 1, "workers", "must be >= 1");
  check(population_active() || learner_active(), "k",
        "population and gradient learner cannot both be disabled");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "erl") return Algorithm::erl;
  if (name == "ddpg") return Algorithm::ddpg;
  if (name == "ea") return Algorithm::ea;
  if (name == "erl-ns") return Algorithm::erl_ns;
  throw InputError("unknown algorithm '" + std::string(name) + "' (expected erl, ddpg, ea or erl-ns)");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::erl:
      return "erl";
    case Algorithm::ddpg:
      return "ddpg";
    case Algorithm::ea:
      return "ea";
    case Algorithm::erl_ns:
      return "erl-ns";
  }
  return "erl";
}

ErlConfig configure_arm(ErlConfig cfg, Algorithm a) {
  switch (a) {
    case Algorithm::erl:
      break;
    case Algorithm::ddpg:
      cfg.k = 0;
      cfg.sync = false;
      break;
    case Algorithm::ea:
      cfg.update_ratio = 0.0;
      cfg.sync = false;
      break;
    case Algorithm::erl_ns:
      cfg.selection_mode = SelectionMode::random_ns;
      break;
  }
  return cfg;
}

std::string_view to_string(SelectionMode m) {
  return m == SelectionMode::tournament ? "tournament" : "random_ns";
}

std::string_view to_string(MutationMode m) {
  return m == MutationMode::proportional_additive ? "proportional_additive" : "literal_multiplicative";
}

std::string_view to_string(ClipMode m) { return m == ClipMode::norm ? "norm" : "value"; }

std::string_view to_string(UpdateMode m) { return m == UpdateMode::per_step ? "per_step" : "literal"; }

}  // namespace erl
