#include "erl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "erl/errors.hpp"

namespace erl {

void EnvSpec::validate() const {
  if (state_dim < 1 || action_dim < 1) throw InputError("env spec: dims must be >= 1");
  if (action_low.size() != action_dim || action_high.size() != action_dim) {
    throw InputError("env spec: action bounds must have action_dim entries");
  }
  for (std::size_t i = 0; i < action_dim; ++i) {
    if (!(action_low[i] < action_high[i])) throw InputError("env spec: action_low must be < action_high");
  }
  if (max_episode_steps < 1) throw InputError("env spec: max_episode_steps must be >= 1");
}

double angle_normalize(double x) {
  constexpr double pi = std::numbers::pi;
  return std::fmod(std::fmod(x + pi, 2.0 * pi) + 2.0 * pi, 2.0 * pi) - pi;
}

Pendulum::Pendulum(std::size_t max_episode_steps) {
  spec_.state_dim = 3;
  spec_.action_dim = 1;
  spec_.action_low = {-kMaxTorque};
  spec_.action_high = {kMaxTorque};
  spec_.max_episode_steps = max_episode_steps;
  spec_.validate();
}

std::vector<double> Pendulum::reset(RandomStream& rng) {
  const double theta = rng.uniform(-std::numbers::pi, std::numbers::pi);
  const double theta_dot = rng.uniform(-1.0, 1.0);
  return reset_to(theta, theta_dot);
}

std::vector<double> Pendulum::reset_to(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  steps_ = 0;
  active_ = true;
  return observe();
}

std::vector<double> Pendulum::observe() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

StepResult Pendulum::step(std::span<const double> action) {
  if (!active_) throw UsageError("pendulum: step() called after episode end or before reset()");
  if (action.size() != 1) throw InputError("pendulum: action must have one component");
  const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);

  const double th = angle_normalize(theta_);
  const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

  const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                       3.0 / (kMass * kLength * kLength) * u;
  theta_dot_ = std::clamp(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  theta_ = theta_ + theta_dot_ * kDt;
  ++steps_;

  StepResult r;
  r.next_state = observe();
  r.reward = -cost;
  r.done = steps_ >= spec_.max_episode_steps;
  if (r.done) active_ = false;
  return r;
}

std::unique_ptr<Environment> Pendulum::clone() const { return std::make_unique<Pendulum>(*this); }

SparseRewardWrapper::SparseRewardWrapper(std::unique_ptr<Environment> inner) : inner_(std::move(inner)) {
  if (!inner_) throw InputError("sparse wrapper: null environment");
}

std::string SparseRewardWrapper::name() const { return "sparse-" + inner_->name(); }

std::vector<double> SparseRewardWrapper::reset(RandomStream& rng) {
  accumulated_ = 0.0;
  return inner_->reset(rng);
}

StepResult SparseRewardWrapper::step(std::span<const double> action) {
  StepResult r = inner_->step(action);
  accumulated_ += r.reward;
  if (r.done) {
    r.reward = accumulated_;
    accumulated_ = 0.0;
  } else {
    r.reward = 0.0;
  }
  return r;
}

std::unique_ptr<Environment> SparseRewardWrapper::clone() const {
  auto copy = std::make_unique<SparseRewardWrapper>(inner_->clone());
  copy->accumulated_ = accumulated_;
  return copy;
}

std::unique_ptr<Environment> wrap_sparse(std::unique_ptr<Environment> env) {
  return std::make_unique<SparseRewardWrapper>(std::move(env));
}

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "sparse-pendulum") return wrap_sparse(std::make_unique<Pendulum>());
  throw InputError("unknown environment '" + std::string(name) + "'");
}

}  // namespace erl
