#include "erl/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "erl/errors.hpp"

namespace erl {

std::string_view to_string(Tag tag) {
  switch (tag) {
    case Tag::elite:
      return "elite";
    case Tag::selected:
      return "selected";
    case Tag::discarded:
      return "discarded";
    case Tag::none:
      break;
  }
  return "none";
}

void MutationParams::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(mut_prob) || !prob(mut_frac) || !prob(supermut_prob) || !prob(reset_prob)) {
    throw InputError("mutation probabilities must lie in [0, 1]");
  }
  if (!(mut_strength > 0.0)) throw InputError("mut_strength must be > 0");
  if (!(weight_limit > 0.0)) throw InputError("weight_limit must be > 0");
}

std::vector<std::size_t> rank(const Population& pop) {
  for (const auto& m : pop.members) {
    if (!m.fitness) throw StateError("rank: population member without fitness");
  }
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *pop.members[a].fitness > *pop.members[b].fitness;
  });
  return order;
}

std::size_t elite_count(std::size_t k, double psi) {
  const auto e = static_cast<std::size_t>(std::floor(psi * static_cast<double>(k)));
  return std::min(k, std::max<std::size_t>(1, e));
}

std::vector<std::size_t> tournament_select(const Population& pop, std::size_t n,
                                           std::size_t tournament_size, RandomStream& rng) {
  if (pop.size() == 0) throw StateError("tournament_select: empty population");
  if (tournament_size == 0) throw InputError("tournament_select: tournament size must be >= 1");
  for (const auto& m : pop.members) {
    if (!m.fitness) throw StateError("tournament_select: population member without fitness");
  }
  std::vector<std::size_t> winners;
  winners.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t best = rng.index(pop.size());
    for (std::size_t t = 1; t < tournament_size; ++t) {
      const std::size_t c = rng.index(pop.size());
      const double fc = *pop.members[c].fitness;
      const double fb = *pop.members[best].fitness;
      if (fc > fb || (fc == fb && c < best)) best = c;
    }
    winners.push_back(best);
  }
  return winners;
}

Parameters crossover(const Parameters& parent_a, const Parameters& parent_b, RandomStream& rng) {
  if (!parent_a.congruent(parent_b)) throw InputError("crossover: parents have different layouts");
  Parameters child = parent_a;
  auto c = child.values();
  const auto b = parent_b.values();
  for (const auto& l : child.layout().layers) {
    for (std::size_t row = 0; row < l.out; ++row) {
      if (rng.uniform() < 0.5) continue;  // keep parent_a's neuron
      std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(l.weight + row * l.in), l.in,
                  c.begin() + static_cast<std::ptrdiff_t>(l.weight + row * l.in));
      c[l.bias + row] = b[l.bias + row];
      if (l.ln_gain) {
        c[*l.ln_gain + row] = b[*l.ln_gain + row];
        c[*l.ln_bias + row] = b[*l.ln_bias + row];
      }
    }
  }
  return child;
}

std::size_t mutation_events(std::size_t entries, double mut_frac) {
  return static_cast<std::size_t>(std::floor(mut_frac * static_cast<double>(entries)));
}

MutationStats mutate(Parameters& p, const MutationParams& mp, RandomStream& rng) {
  MutationStats stats;
  auto v = p.values();
  for (const auto& l : p.layout().layers) {
    const std::size_t events = mutation_events(l.weight_count(), mp.mut_frac);
    for (std::size_t e = 0; e < events; ++e) {
      const std::size_t i = rng.index(l.out);
      const std::size_t j = rng.index(l.in);
      double& gene = v[l.weight + i * l.in + j];

      double scale = 0.0;
      if (rng.uniform() < mp.supermut_prob) {
        scale = 100.0 * mp.mut_strength;
        ++stats.super_mutations;
      } else if (rng.uniform() < mp.reset_prob) {
        gene = rng.normal(0.0, 1.0);
        ++stats.resets;
      } else {
        scale = mp.mut_strength;
        ++stats.normal_mutations;
      }
      if (scale > 0.0) {
        const double noise = rng.normal(0.0, scale);
        gene = mp.mode == MutationMode::proportional_additive ? gene * (1.0 + noise) : gene * noise;
      }
      gene = std::clamp(gene, -mp.weight_limit, mp.weight_limit);
      ++stats.events;
    }
  }
  return stats;
}

GenerationTransition next_generation(const Population& pop, double psi, const MutationParams& mp,
                                     const SelectionParams& sp, RandomStream& select_rng,
                                     RandomStream& mutate_rng) {
  const std::size_t k = pop.size();
  if (k == 0) throw StateError("next_generation: empty population");

  GenerationTransition out;
  out.ranking = rank(pop);
  out.tags.assign(k, Tag::discarded);
  out.mutated.assign(k, false);

  const bool tournament = sp.mode == SelectionMode::tournament;
  out.elites = tournament ? elite_count(k, psi) : 0;
  const std::vector<std::size_t> elites(out.ranking.begin(),
                                        out.ranking.begin() + static_cast<std::ptrdiff_t>(out.elites));
  const std::size_t offspring = k - out.elites;

  std::vector<std::size_t> parents;
  if (tournament) {
    parents = tournament_select(pop, offspring, sp.tournament_size, select_rng);
  } else {
    parents.resize(offspring);
    for (auto& p : parents) p = select_rng.index(k);
  }
  for (auto p : parents) out.tags[p] = Tag::selected;
  for (auto e : elites) out.tags[e] = Tag::elite;

  std::vector<bool> is_elite(k, false);
  for (auto e : elites) is_elite[e] = true;

  out.next.generation = pop.generation + 1;
  out.next.members.resize(k);
  std::size_t next_parent = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    Individual& child = out.next.members[slot];
    if (is_elite[slot]) {
      child.params = pop.members[slot].params;
      continue;
    }
    const std::size_t mate = tournament ? elites[select_rng.index(elites.size())] : select_rng.index(k);
    const std::size_t parent = parents[next_parent++];
    child.params = crossover(pop.members[mate].params, pop.members[parent].params, select_rng);
    if (mutate_rng.uniform() < mp.mut_prob) {
      mutate(child.params, mp, mutate_rng);
      out.mutated[slot] = true;
    }
  }
  return out;
}

}  // namespace erl
