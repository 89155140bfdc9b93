#include "erl/replay.hpp"

#include <algorithm>
#include <cmath>

#include "erl/errors.hpp"

namespace erl {

namespace {

bool finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity_ == 0) throw InputError("replay buffer capacity must be >= 1");
  states_.resize(capacity_ * state_dim_);
  next_states_.resize(capacity_ * state_dim_);
  actions_.resize(capacity_ * action_dim_);
  rewards_.resize(capacity_);
  done_.resize(capacity_);
}

void ReplayBuffer::push(const Transition& t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ ||
      t.action.size() != action_dim_) {
    throw InputError("replay push: transition dimensions do not match the buffer");
  }
  if (!finite(t.state) || !finite(t.next_state) || !finite(t.action) || !std::isfinite(t.reward)) {
    throw InputError("replay push: non-finite transition");
  }
  std::copy(t.state.begin(), t.state.end(), states_.begin() + static_cast<std::ptrdiff_t>(cursor_ * state_dim_));
  std::copy(t.next_state.begin(), t.next_state.end(),
            next_states_.begin() + static_cast<std::ptrdiff_t>(cursor_ * state_dim_));
  std::copy(t.action.begin(), t.action.end(), actions_.begin() + static_cast<std::ptrdiff_t>(cursor_ * action_dim_));
  rewards_[cursor_] = t.reward;
  done_[cursor_] = t.done ? 1 : 0;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
  ++pushed_;
}

Transition ReplayBuffer::slot(std::size_t k) const {
  Transition t;
  auto s0 = states_.begin() + static_cast<std::ptrdiff_t>(k * state_dim_);
  auto n0 = next_states_.begin() + static_cast<std::ptrdiff_t>(k * state_dim_);
  auto a0 = actions_.begin() + static_cast<std::ptrdiff_t>(k * action_dim_);
  t.state.assign(s0, s0 + static_cast<std::ptrdiff_t>(state_dim_));
  t.next_state.assign(n0, n0 + static_cast<std::ptrdiff_t>(state_dim_));
  t.action.assign(a0, a0 + static_cast<std::ptrdiff_t>(action_dim_));
  t.reward = rewards_[k];
  t.done = done_[k] != 0;
  return t;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw InputError("replay at: index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : cursor_;
  return slot((oldest + i) % capacity_);
}

std::vector<std::size_t> ReplayBuffer::draw(std::size_t batch_size, RandomStream& rng) const {
  if (size_ == 0) throw StateError("replay sample: buffer is empty");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.index(size_);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, RandomStream& rng) const {
  std::vector<Transition> out;
  out.reserve(batch_size);
  for (auto i : draw(batch_size, rng)) out.push_back(slot(i));
  return out;
}

Batch ReplayBuffer::sample_batch(std::size_t batch_size, RandomStream& rng) const {
  const auto idx = draw(batch_size, rng);
  const auto n = static_cast<Eigen::Index>(batch_size);
  const auto sd = static_cast<Eigen::Index>(state_dim_);
  const auto ad = static_cast<Eigen::Index>(action_dim_);
  Batch b;
  b.states.resize(sd, n);
  b.next_states.resize(sd, n);
  b.actions.resize(ad, n);
  b.rewards.resize(n);
  b.done.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t k = idx[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < sd; ++r) {
      b.states(r, c) = states_[k * state_dim_ + static_cast<std::size_t>(r)];
      b.next_states(r, c) = next_states_[k * state_dim_ + static_cast<std::size_t>(r)];
    }
    for (Eigen::Index r = 0; r < ad; ++r) b.actions(r, c) = actions_[k * action_dim_ + static_cast<std::size_t>(r)];
    b.rewards(c) = rewards_[k];
    b.done(c) = done_[k] != 0;
  }
  return b;
}

}  // namespace erl
