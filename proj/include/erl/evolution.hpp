#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "erl/neural.hpp"
#include "erl/random.hpp"

namespace erl {

enum class Tag { none, elite, selected, discarded };

std::string_view to_string(Tag tag);

struct Individual {
  Parameters params;
  std::optional<double> fitness;
  Tag tag = Tag::none;
};

struct Population {
  std::vector<Individual> members;
  std::size_t generation = 0;

  std::size_t size() const { return members.size(); }
};

enum class MutationMode { proportional_additive, literal_multiplicative };

struct MutationParams {
  double mut_prob = 0.9;
  double mut_frac = 0.1;
  double mut_strength = 0.1;
  double supermut_prob = 0.05;
  double reset_prob = 0.05;
  MutationMode mode = MutationMode::proportional_additive;
  // Mutated genes are clamped to +/- this magnitude to keep them finite.
  double weight_limit = 1e6;

  void validate() const;

  bool operator==(const MutationParams&) const = default;
};

enum class SelectionMode { tournament, random_ns };

struct SelectionParams {
  SelectionMode mode = SelectionMode::tournament;
  std::size_t tournament_size = 3;
};

// Indices sorted by descending fitness, ties by lower index. Throws
// StateError if any fitness is unset.
std::vector<std::size_t> rank(const Population& pop);

// max(1, floor(psi * k)), never more than k.
std::size_t elite_count(std::size_t k, double psi);

// n winners; each tournament draws `tournament_size` members uniformly with
// replacement and keeps the fittest (lowest index on ties).
std::vector<std::size_t> tournament_select(const Population& pop, std::size_t n,
                                           std::size_t tournament_size, RandomStream& rng);

// Row-wise uniform crossover: each output neuron (weight row, its bias entry
// and its layer-norm gain/bias) comes from parent_a or parent_b with equal
// probability. Throws InputError on incongruent parents.
Parameters crossover(const Parameters& parent_a, const Parameters& parent_b, RandomStream& rng);

struct MutationStats {
  std::size_t events = 0;
  std::size_t super_mutations = 0;
  std::size_t resets = 0;
  std::size_t normal_mutations = 0;
};

// Number of perturbation events applied to a weight matrix of `entries` genes.
std::size_t mutation_events(std::size_t entries, double mut_frac);

// Perturbs weight matrices in place; biases and layer-norm parameters are
// left untouched.
MutationStats mutate(Parameters& p, const MutationParams& mp, RandomStream& rng);

struct GenerationTransition {
  Population next;
  std::vector<std::size_t> ranking;  // of the input population
  std::vector<Tag> tags;             // per input member
  std::size_t elites = 0;
  std::vector<bool> mutated;         // per output slot
};

// Elites keep their slots unchanged; every other slot receives
// crossover(random elite, tournament winner), mutated with probability
// mut_prob. In random_ns mode there are no elites and both parents are
// drawn uniformly. Parent choice and crossover draw from `select_rng`; the
// mutate-or-not coin and the mutation itself draw from `mutate_rng`.
GenerationTransition next_generation(const Population& pop, double psi, const MutationParams& mp,
                                     const SelectionParams& sp, RandomStream& select_rng,
                                     RandomStream& mutate_rng);

}  // namespace erl
