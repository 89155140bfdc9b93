#pragma once

#include <cstddef>
#include <vector>

#include "erl/neural.hpp"
#include "erl/random.hpp"

namespace erl {

// One (s, a, r, s', done) tuple. Actions are stored in the policy's
// normalized [-1, 1] coordinates, which is what the critic consumes.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

// Column-stacked minibatch ready for the batched network passes.
struct Batch {
  Matrix states;       // state_dim x n
  Matrix actions;      // action_dim x n
  Vector rewards;      // n
  Matrix next_states;  // state_dim x n
  Eigen::Array<bool, Eigen::Dynamic, 1> done;

  std::size_t size() const { return static_cast<std::size_t>(rewards.size()); }
};

// Fixed-capacity ring of transitions; once full, each push overwrites the
// oldest entry.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim);

  // Throws InputError on a dimension mismatch or non-finite entry.
  void push(const Transition& t);

  // Uniform with replacement. Throws StateError on an empty buffer.
  std::vector<Transition> sample(std::size_t batch_size, RandomStream& rng) const;
  Batch sample_batch(std::size_t batch_size, RandomStream& rng) const;

  // Entry by age: 0 is the oldest stored transition.
  Transition at(std::size_t i) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  std::size_t total_pushed() const { return pushed_; }

 private:
  std::vector<std::size_t> draw(std::size_t batch_size, RandomStream& rng) const;
  Transition slot(std::size_t physical) const;

  std::size_t capacity_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  std::size_t cursor_ = 0;
  std::size_t size_ = 0;
  std::size_t pushed_ = 0;
  std::vector<double> states_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<double> next_states_;
  std::vector<unsigned char> done_;
};

}  // namespace erl
