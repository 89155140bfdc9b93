#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "erl/random.hpp"

namespace erl {

using Matrix = Eigen::MatrixXd;  // features x batch, one sample per column
using Vector = Eigen::VectorXd;
// Flat parameter/gradient storage. The aligned base keeps every vectorized
// kernel over sub-blocks on the same code path run to run.
using FlatVector = std::vector<double, Eigen::aligned_allocator<double>>;

enum class Activation { tanh, elu, identity };

// The critic's first hidden layer is two disjoint sub-layers: the state block
// feeds `state_width` units and the action block feeds `action_width` units.
// Their outputs are concatenated (state first) into hidden_dims[0].
struct CriticSplit {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t state_width = 0;
  std::size_t action_width = 0;

  bool operator==(const CriticSplit&) const = default;
};

struct NetworkSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 1;
  Activation activation = Activation::tanh;
  Activation output_activation = Activation::tanh;
  bool layer_norm = true;
  std::optional<CriticSplit> critic_split;

  // Throws InputError describing the first violated invariant.
  void validate() const;

  bool operator==(const NetworkSpec&) const = default;
};

// Actor topology: input -> [Linear, LayerNorm, tanh]* -> Linear -> tanh.
NetworkSpec actor_spec(std::size_t state_dim, std::size_t action_dim,
                       std::vector<std::size_t> hidden, bool layer_norm = true);

// Critic topology: (state -> sub-layer A) ++ (action -> sub-layer B), then
// [Linear, LayerNorm, elu]* -> Linear (identity). Input rows are the state
// followed by the action.
NetworkSpec critic_spec(std::size_t state_dim, std::size_t action_dim,
                        std::size_t state_width, std::size_t action_width,
                        std::vector<std::size_t> hidden, bool layer_norm = true);

// Location of one affine layer (and its optional layer-norm gain/bias) inside
// the flat parameter array. Weights are stored row-major, one row per output
// neuron.
struct LayerLayout {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t input_row = 0;  // first input row consumed (critic sub-layers)
  std::size_t weight = 0;
  std::size_t bias = 0;
  std::optional<std::size_t> ln_gain;
  std::optional<std::size_t> ln_bias;
  Activation activation = Activation::identity;

  std::size_t weight_count() const { return in * out; }
};

struct Layout {
  std::vector<LayerLayout> layers;
  std::size_t total = 0;
  // Number of leading layers that read directly from the network input in
  // parallel (2 for a split critic, otherwise 1).
  std::size_t parallel_inputs = 1;

  static Layout from_spec(const NetworkSpec& spec);
  bool operator==(const Layout&) const = default;
};

std::size_t parameter_count(const NetworkSpec& spec);

// Flat weight vector of one network plus the metadata needed to interpret it.
class Parameters {
 public:
  Parameters() = default;
  explicit Parameters(NetworkSpec spec);  // zero-filled

  const NetworkSpec& spec() const { return spec_; }
  const Layout& layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Row-major view of a layer's weight matrix (out x in).
  using WeightMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  using ConstWeightMap =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
  WeightMap weights(std::size_t layer);
  ConstWeightMap weights(std::size_t layer) const;

  bool congruent(const Parameters& other) const { return spec_ == other.spec_; }
  bool all_finite() const;

  bool operator==(const Parameters& other) const {
    return spec_ == other.spec_ && values_ == other.values_;
  }

 private:
  NetworkSpec spec_;
  Layout layout_;
  FlatVector values_;
};

// Weights ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)], biases 0, layer-norm gain 1
// and bias 0.
Parameters init_network(const NetworkSpec& spec, RandomStream& rng);

inline constexpr double kLayerNormEpsilon = 1e-5;

// Intermediates of one batched forward pass, consumed by backward().
struct LayerTape {
  Matrix input;
  Matrix normalized;          // (pre - mean) * inv_std, only with layer norm
  Eigen::RowVectorXd inv_std;
  Matrix pre_activation;      // after layer norm when enabled
  Matrix output;
};

struct Tape {
  std::vector<LayerTape> layers;
};

// Batched forward pass; `input` is input_dim x batch. Records intermediates
// into `tape` when non-null.
Matrix forward(const Parameters& p, const Matrix& input, Tape* tape = nullptr);

Vector forward_actor(const Parameters& p, std::span<const double> state);
double forward_critic(const Parameters& p, std::span<const double> state,
                      std::span<const double> action);

struct Gradient {
  FlatVector params;  // congruent with Parameters::values()
  Matrix input;                // input_dim x batch
};

// Reverse-mode gradient of sum_{j,b} upstream(j,b) * output(j,b) with respect
// to every parameter and every input entry.
Gradient backward(const Parameters& p, const Tape& tape, const Matrix& upstream);

enum class ClipMode { norm, value };

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step_count = 0;
  double learning_rate = 1e-3;
  double clip_norm = 10.0;
  ClipMode clip_mode = ClipMode::norm;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double lr, double clip = 10.0)
      : first_moment(n, 0.0), second_moment(n, 0.0), learning_rate(lr), clip_norm(clip) {}
};

// Clips `grad` in place according to the optimizer's clip settings and
// returns the L2 norm of the clipped gradient.
double clip_gradient(std::span<double> grad, const AdamState& opt);

// One Adam descent step. Throws NumericError (leaving everything unchanged)
// if the gradient has a non-finite entry.
void adam_step(Parameters& p, std::span<const double> grad, AdamState& opt);

// target <- tau * source + (1 - tau) * target
void soft_update(Parameters& target, const Parameters& source, double tau);

}  // namespace erl
