#pragma once

#include <cstddef>
#include <vector>

#include "erl/neural.hpp"
#include "erl/random.hpp"
#include "erl/replay.hpp"

namespace erl {

// Temporally correlated exploration noise:
//   x <- x + theta * (mu - x) + sigma * N(0, 1)
class OUProcess {
 public:
  OUProcess(std::size_t dim, double mu = 0.0, double theta = 0.15, double sigma = 0.2);

  void reset();
  const std::vector<double>& sample(RandomStream& rng);
  const std::vector<double>& state() const { return state_; }
  void set_state(std::vector<double> s) { state_ = std::move(s); }

  double mu() const { return mu_; }
  double theta() const { return theta_; }
  double sigma() const { return sigma_; }

 private:
  double mu_;
  double theta_;
  double sigma_;
  std::vector<double> state_;
};

struct DdpgParams {
  double gamma = 0.99;
  double tau = 1e-3;
  double actor_lr = 5e-5;
  double critic_lr = 5e-4;
  double clip_norm = 10.0;
  ClipMode clip_mode = ClipMode::norm;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Actor/critic pair with slowly tracking target copies.
class DdpgLearner {
 public:
  DdpgLearner(Parameters actor, Parameters critic, const DdpgParams& params);

  // y_i = r_i + gamma * Q'(s'_i, pi'(s'_i)), or r_i at terminal transitions.
  Vector compute_targets(const Batch& batch) const;

  // Mean-squared TD error and its gradient w.r.t. the critic parameters.
  double critic_loss(const Batch& batch) const;
  FlatVector critic_gradient(const Batch& batch, double* loss = nullptr) const;

  // -(1/T) sum_i Q(s_i, pi(s_i)) and its gradient w.r.t. the actor parameters.
  double actor_objective(const Batch& batch) const;
  FlatVector actor_gradient(const Batch& batch) const;

  // One Adam step on the critic; returns the pre-step loss. Throws
  // NumericError (no update) if the loss or gradient is not finite.
  double critic_update(const Batch& batch);
  // One Adam step on the actor along the sampled policy gradient.
  void actor_update(const Batch& batch);
  void update_targets();

  const Parameters& actor() const { return actor_; }
  const Parameters& critic() const { return critic_; }
  const Parameters& target_actor() const { return target_actor_; }
  const Parameters& target_critic() const { return target_critic_; }
  Parameters& actor() { return actor_; }
  Parameters& critic() { return critic_; }
  const AdamState& actor_optimizer() const { return actor_opt_; }
  const AdamState& critic_optimizer() const { return critic_opt_; }
  const DdpgParams& params() const { return params_; }

 private:
  DdpgParams params_;
  Parameters actor_;
  Parameters critic_;
  Parameters target_actor_;
  Parameters target_critic_;
  AdamState actor_opt_;
  AdamState critic_opt_;
};

}  // namespace erl
