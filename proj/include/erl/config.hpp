#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "erl/evolution.hpp"
#include "erl/neural.hpp"

namespace erl {

enum class UpdateMode {
  per_step,  // update_ratio critic+actor pairs per environment step collected
  literal,   // a single pair per generation
};

// Every hyperparameter of a run. Defaults follow the published settings
// except buffer_capacity, which is reduced for desk-scale memory use.
struct ErlConfig {
  std::string env = "pendulum";

  // Evolution
  std::size_t k = 10;
  double psi = 0.1;
  std::size_t xi = 1;
  std::size_t omega = 1;
  bool sync = true;
  MutationParams mutation;
  SelectionMode selection_mode = SelectionMode::tournament;
  std::size_t tournament_size = 3;

  // Gradient learner
  double gamma = 0.99;
  double tau = 1e-3;
  std::size_t batch_size = 128;
  std::size_t buffer_capacity = 100000;
  double actor_lr = 5e-5;
  double critic_lr = 5e-4;
  double clip_norm = 10.0;
  ClipMode clip_mode = ClipMode::norm;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double update_ratio = 1.0;
  UpdateMode update_mode = UpdateMode::per_step;
  double ou_mu = 0.0;
  double ou_theta = 0.15;
  double ou_sigma = 0.2;

  // Networks
  std::vector<std::size_t> actor_hidden = {128, 128};
  std::size_t critic_state_width = 200;
  std::size_t critic_action_width = 200;
  std::vector<std::size_t> critic_hidden = {300};
  bool layer_norm = true;

  // Measurement and execution
  std::size_t champion_episodes = 5;
  double solve_threshold = -200.0;
  std::uint64_t step_budget = 300000;
  bool stop_on_solve = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // Throws ConfigError naming the first offending key.
  void validate() const;

  bool learner_active() const { return update_ratio > 0.0; }
  bool population_active() const { return k > 0; }

  bool operator==(const ErlConfig&) const = default;
};

enum class Algorithm { erl, ddpg, ea, erl_ns };

Algorithm parse_algorithm(std::string_view name);  // throws InputError
std::string_view to_string(Algorithm a);

// Specializes a config to one experimental arm:
//   ddpg   -> no population, no sync
//   ea     -> update_ratio 0, no sync
//   erl-ns -> uniform random parents, no elites
ErlConfig configure_arm(ErlConfig cfg, Algorithm a);

std::string_view to_string(SelectionMode m);
std::string_view to_string(MutationMode m);
std::string_view to_string(ClipMode m);
std::string_view to_string(UpdateMode m);

}  // namespace erl
