#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "erl/random.hpp"

namespace erl {

struct EnvSpec {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  std::vector<double> action_low;
  std::vector<double> action_high;
  std::size_t max_episode_steps = 1;

  void validate() const;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool done = false;
};

// Episodic environment with a fixed horizon. One instance per thread.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual std::string name() const = 0;
  virtual std::vector<double> reset(RandomStream& rng) = 0;
  // Throws UsageError if called before reset() or after the episode ended.
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;
};

// Single pendulum swing-up. Observation (cos th, sin th, th_dot); th = 0 is
// upright. Scalar torque in [-2, 2]; 200-step episodes.
class Pendulum final : public Environment {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr std::size_t kEpisodeSteps = 200;

  explicit Pendulum(std::size_t max_episode_steps = kEpisodeSteps);

  const EnvSpec& spec() const override { return spec_; }
  std::string name() const override { return "pendulum"; }
  std::vector<double> reset(RandomStream& rng) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override;

  // Puts the pendulum in an explicit physical state and starts a new episode.
  std::vector<double> reset_to(double theta, double theta_dot);

  double theta() const { return theta_; }
  double theta_dot() const { return theta_dot_; }

 private:
  std::vector<double> observe() const;

  EnvSpec spec_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  std::size_t steps_ = 0;
  bool active_ = false;
};

double angle_normalize(double x);

// Withholds reward until the terminal step, where the episode's accumulated
// reward is paid out at once. Dynamics and spec are those of the inner env.
class SparseRewardWrapper final : public Environment {
 public:
  explicit SparseRewardWrapper(std::unique_ptr<Environment> inner);

  const EnvSpec& spec() const override { return inner_->spec(); }
  std::string name() const override;
  std::vector<double> reset(RandomStream& rng) override;
  StepResult step(std::span<const double> action) override;
  std::unique_ptr<Environment> clone() const override;

  Environment& inner() { return *inner_; }

 private:
  std::unique_ptr<Environment> inner_;
  double accumulated_ = 0.0;
};

std::unique_ptr<Environment> wrap_sparse(std::unique_ptr<Environment> env);

// "pendulum" or "sparse-pendulum"; throws InputError otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name);

}  // namespace erl
