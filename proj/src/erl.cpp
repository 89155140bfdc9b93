#include "erl/erl.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "erl/errors.hpp"

namespace erl {

std::vector<double> scale_action(const EnvSpec& spec, std::span<const double> normalized) {
  std::vector<double> a(normalized.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double lo = spec.action_low[i];
    const double hi = spec.action_high[i];
    a[i] = lo + (normalized[i] + 1.0) * 0.5 * (hi - lo);
  }
  return a;
}

FitnessRecord rollout(const Parameters& actor, Environment& env, OUProcess* noise,
                      RandomStream* noise_rng, std::size_t xi, RandomStream& env_rng,
                      std::vector<Transition>* sink) {
  if (xi == 0) throw InputError("evaluate: xi must be >= 1");
  if (noise && !noise_rng) throw InputError("evaluate: noise process without a random stream");
  const EnvSpec& spec = env.spec();
  if (actor.spec().input_dim != spec.state_dim || actor.spec().output_dim != spec.action_dim) {
    throw InputError("evaluate: actor does not match the environment's dimensions");
  }

  FitnessRecord rec;
  double total = 0.0;
  for (std::size_t trial = 0; trial < xi; ++trial) {
    std::vector<double> state = env.reset(env_rng);
    if (noise) noise->reset();
    double episode_return = 0.0;
    bool done = false;
    while (!done) {
      Vector out = forward_actor(actor, state);
      if (noise) {
        const auto& n = noise->sample(*noise_rng);
        for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += n[static_cast<std::size_t>(i)];
      }
      std::vector<double> action(out.data(), out.data() + out.size());
      for (auto& a : action) a = std::clamp(a, -1.0, 1.0);

      StepResult r = env.step(scale_action(spec, action));
      episode_return += r.reward;
      ++rec.steps_consumed;
      done = r.done;
      if (sink) {
        sink->push_back(Transition{state, std::move(action), r.reward, r.next_state, r.done});
      }
      state = std::move(r.next_state);
    }
    // Per-episode sums keep dense and sparse rewards on the same rounding path.
    total += episode_return;
  }
  rec.fitness = total / static_cast<double>(xi);
  return rec;
}

FitnessRecord evaluate(const Parameters& actor, Environment& env, ReplayBuffer& buffer,
                       OUProcess* noise, RandomStream* noise_rng, std::size_t xi,
                       RandomStream& env_rng) {
  std::vector<Transition> local;
  FitnessRecord rec = rollout(actor, env, noise, noise_rng, xi, env_rng, &local);
  for (const auto& t : local) buffer.push(t);
  return rec;
}

double champion_eval(const Parameters& actor, Environment& env, std::size_t episodes,
                     RandomStream& rng) {
  if (episodes == 0) throw InputError("champion_eval: episodes must be >= 1");
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    total += rollout(actor, env, nullptr, nullptr, 1, rng, nullptr).fitness;
  }
  return total / static_cast<double>(episodes);
}

std::size_t synchronize(Population& pop, const std::vector<std::size_t>& ranking,
                        const Parameters& rl_actor) {
  if (ranking.empty() || ranking.size() != pop.size()) throw StateError("synchronize: population not ranked");
  const std::size_t weakest = ranking.back();
  if (!pop.members[weakest].params.congruent(rl_actor)) {
    throw InputError("synchronize: actor layout differs from the population's");
  }
  pop.members[weakest].params = rl_actor;
  pop.members[weakest].fitness.reset();
  pop.members[weakest].tag = Tag::none;
  return weakest;
}

void SyncCounts::record(Tag t) {
  switch (t) {
    case Tag::elite:
      ++counts[0];
      break;
    case Tag::selected:
      ++counts[1];
      break;
    case Tag::discarded:
      ++counts[2];
      break;
    case Tag::none:
      throw StateError("sync classification: untagged individual");
  }
}

std::array<double, 3> SyncCounts::percentages() const {
  std::array<double, 3> pct{};
  const std::size_t n = total();
  if (n == 0) return pct;
  for (std::size_t i = 0; i < 3; ++i) pct[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(n);
  return pct;
}

namespace {

DdpgLearner make_learner(const ErlConfig& cfg, const EnvSpec& spec, RandomStream& rng) {
  DdpgParams p;
  p.gamma = cfg.gamma;
  p.tau = cfg.tau;
  p.actor_lr = cfg.actor_lr;
  p.critic_lr = cfg.critic_lr;
  p.clip_norm = cfg.clip_norm;
  p.clip_mode = cfg.clip_mode;
  p.beta1 = cfg.adam_beta1;
  p.beta2 = cfg.adam_beta2;
  p.epsilon = cfg.adam_epsilon;
  Parameters actor = init_network(actor_spec(spec.state_dim, spec.action_dim, cfg.actor_hidden, cfg.layer_norm), rng);
  Parameters critic = init_network(critic_spec(spec.state_dim, spec.action_dim, cfg.critic_state_width,
                                               cfg.critic_action_width, cfg.critic_hidden, cfg.layer_norm),
                                   rng);
  return DdpgLearner(std::move(actor), std::move(critic), p);
}

const ErlConfig& validated(const ErlConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Trainer::Trainer(ErlConfig cfg, std::uint64_t seed)
    : cfg_(validated(cfg)),
      env_(make_environment(cfg_.env)),
      init_rng_(RandomStream::derive(seed, "init")),
      env_rng_(RandomStream::derive(seed, "env")),
      rl_env_rng_(RandomStream::derive(seed, "rl-env")),
      select_rng_(RandomStream::derive(seed, "selection")),
      mutate_rng_(RandomStream::derive(seed, "mutation")),
      noise_rng_(RandomStream::derive(seed, "ou-noise")),
      replay_rng_(RandomStream::derive(seed, "replay-sampling")),
      champion_rng_(RandomStream::derive(seed, "champion")),
      learner_(make_learner(cfg_, env_->spec(), init_rng_)),
      buffer_(cfg_.buffer_capacity, env_->spec().state_dim, env_->spec().action_dim),
      noise_(env_->spec().action_dim, cfg_.ou_mu, cfg_.ou_theta, cfg_.ou_sigma) {
  const EnvSpec& spec = env_->spec();
  const NetworkSpec pop_spec = actor_spec(spec.state_dim, spec.action_dim, cfg_.actor_hidden, cfg_.layer_norm);
  pop_.members.resize(cfg_.k);
  for (auto& m : pop_.members) m.params = init_network(pop_spec, init_rng_);
  champion_ = learner_.actor();
}

Trainer::~Trainer() = default;

std::vector<FitnessRecord> Trainer::evaluate_population() {
  const std::size_t k = pop_.size();
  std::vector<std::uint64_t> seeds(k);
  for (auto& s : seeds) s = env_rng_.next_seed();

  std::vector<FitnessRecord> records(k);
  std::vector<std::vector<Transition>> local(k);
  auto work = [&](std::size_t begin, std::size_t stride) {
    auto env = env_->clone();
    for (std::size_t i = begin; i < k; i += stride) {
      RandomStream rng(seeds[i]);
      records[i] = rollout(pop_.members[i].params, *env, nullptr, nullptr, cfg_.xi, rng, &local[i]);
      records[i].index = i;
    }
  };

  const std::size_t workers = std::min(cfg_.workers, k);
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& t : local[i]) buffer_.push(t);
    pop_.members[i].fitness = records[i].fitness;
  }
  return records;
}

std::size_t Trainer::train(std::uint64_t collected) {
  if (!cfg_.learner_active() || buffer_.size() < cfg_.batch_size) return 0;
  const std::size_t updates =
      cfg_.update_mode == UpdateMode::literal
          ? 1
          : static_cast<std::size_t>(std::floor(cfg_.update_ratio * static_cast<double>(collected)));
  for (std::size_t u = 0; u < updates; ++u) {
    const Batch batch = buffer_.sample_batch(cfg_.batch_size, replay_rng_);
    learner_.critic_update(batch);
    learner_.actor_update(batch);
    learner_.update_targets();
  }
  return updates;
}

GenerationReport Trainer::run_generation() {
  ++generation_;
  GenerationReport report;
  report.generation = generation_;
  std::uint64_t collected = 0;
  std::vector<double> fitnesses;

  last_classification_.reset();
  if (cfg_.population_active()) {
    // Collection: every member, noiseless.
    const auto records = evaluate_population();
    for (const auto& r : records) {
      collected += r.steps_consumed;
      fitnesses.push_back(r.fitness);
    }

    // Selection and variation.
    SelectionParams sp{cfg_.selection_mode, cfg_.tournament_size};
    GenerationTransition tr = next_generation(pop_, cfg_.psi, cfg_.mutation, sp, select_rng_, mutate_rng_);
    for (std::size_t i = 0; i < pop_.size(); ++i) pop_.members[i].tag = tr.tags[i];
    if (synced_slot_) {
      last_classification_ = tr.tags[*synced_slot_];
      sync_counts_.record(*last_classification_);
      report.sync_classification = last_classification_;
      synced_slot_.reset();
    }
    champion_ = pop_.members[tr.ranking.front()].params;
    pop_ = std::move(tr.next);

    // Gradient learner: one noisy episode, then the update phase.
    if (cfg_.learner_active()) {
      const FitnessRecord rl = evaluate(learner_.actor(), *env_, buffer_, &noise_, &noise_rng_, 1, rl_env_rng_);
      collected += rl.steps_consumed;
    }
    report.updates = train(collected);

    if (cfg_.sync && cfg_.learner_active() && generation_ % cfg_.omega == 0) {
      synced_slot_ = synchronize(pop_, tr.ranking, learner_.actor());
    }
  } else {
    const FitnessRecord rl = evaluate(learner_.actor(), *env_, buffer_, &noise_, &noise_rng_, 1, rl_env_rng_);
    collected += rl.steps_consumed;
    fitnesses.push_back(rl.fitness);
    report.updates = train(collected);
    champion_ = learner_.actor();
  }

  cumulative_steps_ += collected;
  report.cumulative_steps = cumulative_steps_;
  report.best_fitness = *std::max_element(fitnesses.begin(), fitnesses.end());
  double sum = 0.0;
  for (double f : fitnesses) sum += f;
  report.mean_fitness = sum / static_cast<double>(fitnesses.size());
  report.fitnesses = std::move(fitnesses);
  report.champion_score = champion_eval(champion_, *env_, cfg_.champion_episodes, champion_rng_);
  return report;
}

Tag Trainer::classify_synced_actor() const {
  if (!last_classification_) throw StateError("classify_synced_actor: no synchronization preceded the last selection");
  return *last_classification_;
}

}  // namespace erl
