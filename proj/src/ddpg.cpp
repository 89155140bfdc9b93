#include "erl/ddpg.hpp"

#include <cmath>

#include "erl/errors.hpp"

namespace erl {

OUProcess::OUProcess(std::size_t dim, double mu, double theta, double sigma)
    : mu_(mu), theta_(theta), sigma_(sigma), state_(dim, mu) {}

void OUProcess::reset() { std::fill(state_.begin(), state_.end(), mu_); }

const std::vector<double>& OUProcess::sample(RandomStream& rng) {
  for (auto& x : state_) x = x + theta_ * (mu_ - x) + sigma_ * rng.normal();
  return state_;
}

namespace {

AdamState make_optimizer(std::size_t n, double lr, const DdpgParams& p) {
  AdamState s(n, lr, p.clip_norm);
  s.clip_mode = p.clip_mode;
  s.beta1 = p.beta1;
  s.beta2 = p.beta2;
  s.epsilon = p.epsilon;
  return s;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  Matrix m(top.rows() + bottom.rows(), top.cols());
  m << top, bottom;
  return m;
}

}  // namespace

DdpgLearner::DdpgLearner(Parameters actor, Parameters critic, const DdpgParams& params)
    : params_(params),
      actor_(std::move(actor)),
      critic_(std::move(critic)),
      target_actor_(actor_),
      target_critic_(critic_),
      actor_opt_(make_optimizer(actor_.size(), params.actor_lr, params)),
      critic_opt_(make_optimizer(critic_.size(), params.critic_lr, params)) {
  const auto& split = critic_.spec().critic_split;
  if (!split) throw InputError("ddpg: critic must have a state/action split");
  if (split->state_dim != actor_.spec().input_dim || split->action_dim != actor_.spec().output_dim) {
    throw InputError("ddpg: actor and critic dimensions disagree");
  }
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) throw InputError("ddpg: gamma must lie in [0, 1]");
  if (!(params.tau > 0.0 && params.tau <= 1.0)) throw InputError("ddpg: tau must lie in (0, 1]");
}

Vector DdpgLearner::compute_targets(const Batch& batch) const {
  if (batch.size() == 0) throw InputError("compute_targets: empty batch");
  const Matrix next_actions = forward(target_actor_, batch.next_states);
  const Matrix next_q = forward(target_critic_, stack(batch.next_states, next_actions));
  Vector y(batch.rewards.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = batch.done(i) ? batch.rewards(i) : batch.rewards(i) + params_.gamma * next_q(0, i);
  }
  return y;
}

double DdpgLearner::critic_loss(const Batch& batch) const {
  const Vector y = compute_targets(batch);
  const Matrix q = forward(critic_, stack(batch.states, batch.actions));
  return (y - q.row(0).transpose()).squaredNorm() / static_cast<double>(batch.size());
}

FlatVector DdpgLearner::critic_gradient(const Batch& batch, double* loss) const {
  const Vector y = compute_targets(batch);
  Tape tape;
  const Matrix q = forward(critic_, stack(batch.states, batch.actions), &tape);
  const Vector err = q.row(0).transpose() - y;
  const double n = static_cast<double>(batch.size());
  if (loss) *loss = err.squaredNorm() / n;
  const Matrix upstream = (2.0 / n) * err.transpose();
  return backward(critic_, tape, upstream).params;
}

double DdpgLearner::actor_objective(const Batch& batch) const {
  const Matrix actions = forward(actor_, batch.states);
  const Matrix q = forward(critic_, stack(batch.states, actions));
  return -q.mean();
}

FlatVector DdpgLearner::actor_gradient(const Batch& batch) const {
  if (batch.size() == 0) throw InputError("actor_gradient: empty batch");
  Tape actor_tape;
  const Matrix actions = forward(actor_, batch.states, &actor_tape);
  Tape critic_tape;
  forward(critic_, stack(batch.states, actions), &critic_tape);
  const double n = static_cast<double>(batch.size());
  const Matrix upstream = Matrix::Constant(1, actions.cols(), -1.0 / n);
  const Gradient dq = backward(critic_, critic_tape, upstream);
  const Matrix d_action = dq.input.bottomRows(actions.rows());
  return backward(actor_, actor_tape, d_action).params;
}

double DdpgLearner::critic_update(const Batch& batch) {
  double loss = 0.0;
  const auto grad = critic_gradient(batch, &loss);
  if (!std::isfinite(loss)) throw NumericError("critic_update: non-finite loss");
  adam_step(critic_, grad, critic_opt_);
  return loss;
}

void DdpgLearner::actor_update(const Batch& batch) {
  const auto grad = actor_gradient(batch);
  adam_step(actor_, grad, actor_opt_);
}

void DdpgLearner::update_targets() {
  soft_update(target_actor_, actor_, params_.tau);
  soft_update(target_critic_, critic_, params_.tau);
}

}  // namespace erl
