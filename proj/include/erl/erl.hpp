#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "erl/config.hpp"
#include "erl/ddpg.hpp"
#include "erl/environments.hpp"
#include "erl/evolution.hpp"
#include "erl/replay.hpp"

namespace erl {

struct FitnessRecord {
  std::size_t index = 0;
  double fitness = 0.0;
  std::size_t steps_consumed = 0;
};

struct GenerationReport {
  std::size_t generation = 0;
  std::uint64_t cumulative_steps = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double champion_score = 0.0;
  std::vector<double> fitnesses;  // per population slot, or the learner's episode when k = 0
  std::optional<Tag> sync_classification;
  std::size_t updates = 0;
};

// Maps a policy output in [-1, 1] onto the environment's action box.
std::vector<double> scale_action(const EnvSpec& spec, std::span<const double> normalized);

// Runs `xi` full episodes. Actions are pi(s) (+ OU noise when `noise` is
// given, clipped to [-1, 1]). Each transition is appended to `sink` in
// order. Returns the mean episode-total reward.
FitnessRecord rollout(const Parameters& actor, Environment& env, OUProcess* noise,
                      RandomStream* noise_rng, std::size_t xi, RandomStream& env_rng,
                      std::vector<Transition>* sink);

// rollout() that pushes every transition to `buffer`.
FitnessRecord evaluate(const Parameters& actor, Environment& env, ReplayBuffer& buffer,
                       OUProcess* noise, RandomStream* noise_rng, std::size_t xi,
                       RandomStream& env_rng);

// Mean return over `episodes` noiseless episodes; touches no buffer and no
// training stream.
double champion_eval(const Parameters& actor, Environment& env, std::size_t episodes,
                     RandomStream& rng);

// Overwrites the lowest-ranked member (last entry of `ranking`) with a copy
// of `rl_actor`; returns the overwritten slot.
std::size_t synchronize(Population& pop, const std::vector<std::size_t>& ranking,
                        const Parameters& rl_actor);

struct SyncCounts {
  std::array<std::size_t, 3> counts{};  // elite, selected, discarded

  void record(Tag t);
  std::size_t total() const { return counts[0] + counts[1] + counts[2]; }
  // Percentages in the order elite, selected, discarded; all zero when empty.
  std::array<double, 3> percentages() const;
};

// The hybrid training loop. One instance owns the population, the gradient
// learner, the shared replay buffer and all random streams of a run.
class Trainer {
 public:
  Trainer(ErlConfig cfg, std::uint64_t seed);
  ~Trainer();
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  GenerationReport run_generation();

  // Tag received by the actor synchronized in the previous generation at the
  // selection step that just ran. Throws StateError if there was none.
  Tag classify_synced_actor() const;

  const ErlConfig& config() const { return cfg_; }
  const Population& population() const { return pop_; }
  const DdpgLearner& learner() const { return learner_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const Parameters& champion() const { return champion_; }
  std::uint64_t cumulative_steps() const { return cumulative_steps_; }
  std::size_t generation() const { return generation_; }
  const SyncCounts& sync_counts() const { return sync_counts_; }
  std::optional<std::size_t> last_synced_slot() const { return synced_slot_; }

 private:
  std::vector<FitnessRecord> evaluate_population();
  std::size_t train(std::uint64_t collected);

  ErlConfig cfg_;
  std::unique_ptr<Environment> env_;
  RandomStream init_rng_;
  RandomStream env_rng_;
  RandomStream rl_env_rng_;
  RandomStream select_rng_;
  RandomStream mutate_rng_;
  RandomStream noise_rng_;
  RandomStream replay_rng_;
  RandomStream champion_rng_;
  DdpgLearner learner_;
  ReplayBuffer buffer_;
  OUProcess noise_;
  Population pop_;
  Parameters champion_;
  std::uint64_t cumulative_steps_ = 0;
  std::size_t generation_ = 0;
  std::optional<std::size_t> synced_slot_;
  std::optional<Tag> last_classification_;
  SyncCounts sync_counts_;
};

}  // namespace erl
