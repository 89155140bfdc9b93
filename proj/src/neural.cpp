#include "erl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "erl/errors.hpp"

namespace erl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InputError(what);
}

}  // namespace

void NetworkSpec::validate() const {
  require(input_dim >= 1, "network input_dim must be >= 1");
  require(output_dim >= 1, "network output_dim must be >= 1");
  for (auto h : hidden_dims) require(h >= 1, "network hidden dims must be >= 1");
  if (critic_split) {
    const auto& s = *critic_split;
    require(s.state_dim >= 1 && s.action_dim >= 1 && s.state_width >= 1 && s.action_width >= 1,
            "critic split dims must be >= 1");
    require(s.state_dim + s.action_dim == input_dim,
            "critic split: state_dim + action_dim must equal input_dim");
    require(!hidden_dims.empty() && hidden_dims[0] == s.state_width + s.action_width,
            "critic split: hidden_dims[0] must equal the sum of the sub-layer widths");
  }
}

NetworkSpec actor_spec(std::size_t state_dim, std::size_t action_dim,
                       std::vector<std::size_t> hidden, bool layer_norm) {
  NetworkSpec s;
  s.input_dim = state_dim;
  s.hidden_dims = std::move(hidden);
  s.output_dim = action_dim;
  s.activation = Activation::tanh;
  s.output_activation = Activation::tanh;
  s.layer_norm = layer_norm;
  s.validate();
  return s;
}

NetworkSpec critic_spec(std::size_t state_dim, std::size_t action_dim,
                        std::size_t state_width, std::size_t action_width,
                        std::vector<std::size_t> hidden, bool layer_norm) {
  NetworkSpec s;
  s.input_dim = state_dim + action_dim;
  s.hidden_dims.push_back(state_width + action_width);
  s.hidden_dims.insert(s.hidden_dims.end(), hidden.begin(), hidden.end());
  s.output_dim = 1;
  s.activation = Activation::elu;
  s.output_activation = Activation::identity;
  s.layer_norm = layer_norm;
  s.critic_split = CriticSplit{state_dim, action_dim, state_width, action_width};
  s.validate();
  return s;
}

Layout Layout::from_spec(const NetworkSpec& spec) {
  spec.validate();
  Layout layout;
  std::size_t cursor = 0;
  auto add = [&](std::size_t in, std::size_t out, std::size_t input_row, bool hidden) {
    LayerLayout l;
    l.in = in;
    l.out = out;
    l.input_row = input_row;
    l.weight = cursor;
    cursor += in * out;
    l.bias = cursor;
    cursor += out;
    if (hidden && spec.layer_norm) {
      l.ln_gain = cursor;
      cursor += out;
      l.ln_bias = cursor;
      cursor += out;
    }
    l.activation = hidden ? spec.activation : spec.output_activation;
    layout.layers.push_back(l);
  };

  std::size_t width = spec.input_dim;
  std::size_t first_dense = 0;
  if (spec.critic_split) {
    const auto& s = *spec.critic_split;
    add(s.state_dim, s.state_width, 0, true);
    add(s.action_dim, s.action_width, s.state_dim, true);
    layout.parallel_inputs = 2;
    width = spec.hidden_dims[0];
    first_dense = 1;
  }
  for (std::size_t i = first_dense; i < spec.hidden_dims.size(); ++i) {
    add(width, spec.hidden_dims[i], 0, true);
    width = spec.hidden_dims[i];
  }
  add(width, spec.output_dim, 0, false);
  layout.total = cursor;
  return layout;
}

std::size_t parameter_count(const NetworkSpec& spec) { return Layout::from_spec(spec).total; }

Parameters::Parameters(NetworkSpec spec)
    : spec_(std::move(spec)), layout_(Layout::from_spec(spec_)), values_(layout_.total, 0.0) {}

Parameters::WeightMap Parameters::weights(std::size_t layer) {
  const auto& l = layout_.layers.at(layer);
  return WeightMap(values_.data() + l.weight, static_cast<Eigen::Index>(l.out),
                   static_cast<Eigen::Index>(l.in));
}

Parameters::ConstWeightMap Parameters::weights(std::size_t layer) const {
  const auto& l = layout_.layers.at(layer);
  return ConstWeightMap(values_.data() + l.weight, static_cast<Eigen::Index>(l.out),
                        static_cast<Eigen::Index>(l.in));
}

bool Parameters::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Parameters init_network(const NetworkSpec& spec, RandomStream& rng) {
  Parameters p(spec);
  auto v = p.values();
  for (const auto& l : p.layout().layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    for (std::size_t i = 0; i < l.weight_count(); ++i) v[l.weight + i] = rng.uniform(-bound, bound);
    if (l.ln_gain) std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(*l.ln_gain), l.out, 1.0);
  }
  return p;
}

namespace {

using ConstVecMap = Eigen::Map<const Vector>;
using VecMap = Eigen::Map<Vector>;

void activate(Activation a, const Matrix& pre, Matrix& out) {
  switch (a) {
    case Activation::tanh:
      out = pre.array().tanh().matrix();
      break;
    case Activation::elu:
      out = pre.unaryExpr([](double x) { return x > 0.0 ? x : std::expm1(x); });
      break;
    case Activation::identity:
      out = pre;
      break;
  }
}

// d out / d pre, elementwise, expressed through the cached output.
Matrix activation_grad(Activation a, const Matrix& pre, const Matrix& out) {
  switch (a) {
    case Activation::tanh:
      return (1.0 - out.array().square()).matrix();
    case Activation::elu:
      return pre.binaryExpr(out, [](double x, double y) { return x > 0.0 ? 1.0 : y + 1.0; });
    case Activation::identity:
      break;
  }
  return Matrix::Ones(pre.rows(), pre.cols());
}

Matrix apply_layer(const Parameters& p, const LayerLayout& l, const Matrix& x, LayerTape* tape) {
  const auto v = p.values();
  const auto out = static_cast<Eigen::Index>(l.out);
  Parameters::ConstWeightMap w(v.data() + l.weight, out, static_cast<Eigen::Index>(l.in));
  ConstVecMap b(v.data() + l.bias, out);

  Matrix pre = w * x;
  pre.colwise() += b;

  Matrix normalized;
  Eigen::RowVectorXd inv_std;
  if (l.ln_gain) {
    ConstVecMap gain(v.data() + *l.ln_gain, out);
    ConstVecMap shift(v.data() + *l.ln_bias, out);
    const Eigen::RowVectorXd mean = pre.colwise().mean();
    normalized = pre.rowwise() - mean;
    const Eigen::RowVectorXd var = normalized.array().square().colwise().mean();
    inv_std = (var.array() + kLayerNormEpsilon).rsqrt().matrix();
    normalized = normalized.array().rowwise() * inv_std.array();
    pre = (normalized.array().colwise() * gain.array()).matrix();
    pre.colwise() += shift;
  }

  Matrix result;
  activate(l.activation, pre, result);
  if (tape) {
    tape->input = x;
    tape->normalized = std::move(normalized);
    tape->inv_std = std::move(inv_std);
    tape->pre_activation = std::move(pre);
    tape->output = result;
  }
  return result;
}

}  // namespace

Matrix forward(const Parameters& p, const Matrix& input, Tape* tape) {
  const auto& spec = p.spec();
  if (static_cast<std::size_t>(input.rows()) != spec.input_dim) {
    throw InputError("forward: input has " + std::to_string(input.rows()) + " rows, network expects " +
                     std::to_string(spec.input_dim));
  }
  const auto& layers = p.layout().layers;
  if (tape) tape->layers.assign(layers.size(), {});
  auto slot = [&](std::size_t i) { return tape ? &tape->layers[i] : nullptr; };

  Matrix h;
  std::size_t first = 0;
  if (spec.critic_split) {
    const auto& s = *spec.critic_split;
    const auto sd = static_cast<Eigen::Index>(s.state_dim);
    const auto ad = static_cast<Eigen::Index>(s.action_dim);
    Matrix hs = apply_layer(p, layers[0], input.topRows(sd), slot(0));
    Matrix ha = apply_layer(p, layers[1], input.bottomRows(ad), slot(1));
    h.resize(hs.rows() + ha.rows(), input.cols());
    h << hs, ha;
    first = 2;
  } else {
    h = input;
  }
  for (std::size_t i = first; i < layers.size(); ++i) h = apply_layer(p, layers[i], h, slot(i));
  return h;
}

Vector forward_actor(const Parameters& p, std::span<const double> state) {
  if (state.size() != p.spec().input_dim) throw InputError("forward_actor: state dimension mismatch");
  Matrix x = ConstVecMap(state.data(), static_cast<Eigen::Index>(state.size()));
  return forward(p, x).col(0);
}

double forward_critic(const Parameters& p, std::span<const double> state,
                      std::span<const double> action) {
  const auto& split = p.spec().critic_split;
  if (!split) throw InputError("forward_critic: network has no critic split");
  if (state.size() != split->state_dim || action.size() != split->action_dim) {
    throw InputError("forward_critic: state/action dimension mismatch");
  }
  Matrix x(static_cast<Eigen::Index>(state.size() + action.size()), 1);
  for (std::size_t i = 0; i < state.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = state[i];
  for (std::size_t i = 0; i < action.size(); ++i) {
    x(static_cast<Eigen::Index>(state.size() + i), 0) = action[i];
  }
  return forward(p, x)(0, 0);
}

namespace {

// Back-propagates through one layer, accumulating parameter gradients into
// `grad` and returning the gradient with respect to the layer input.
Matrix backward_layer(const Parameters& p, const LayerLayout& l, const LayerTape& t,
                      const Matrix& upstream, FlatVector& grad) {
  const auto v = p.values();
  const auto out = static_cast<Eigen::Index>(l.out);
  const auto in = static_cast<Eigen::Index>(l.in);

  Matrix d_pre = upstream.cwiseProduct(activation_grad(l.activation, t.pre_activation, t.output));

  if (l.ln_gain) {
    ConstVecMap gain(v.data() + *l.ln_gain, out);
    VecMap(grad.data() + *l.ln_gain, out) += d_pre.cwiseProduct(t.normalized).rowwise().sum();
    VecMap(grad.data() + *l.ln_bias, out) += d_pre.rowwise().sum();
    const Matrix d_norm = d_pre.array().colwise() * gain.array();
    const Eigen::RowVectorXd mean_d = d_norm.colwise().mean();
    const Eigen::RowVectorXd mean_dn = d_norm.cwiseProduct(t.normalized).colwise().mean();
    Matrix centered = d_norm.rowwise() - mean_d;
    centered -= (t.normalized.array().rowwise() * mean_dn.array()).matrix();
    d_pre = centered.array().rowwise() * t.inv_std.array();
  }

  Parameters::WeightMap(grad.data() + l.weight, out, in) += d_pre * t.input.transpose();
  VecMap(grad.data() + l.bias, out) += d_pre.rowwise().sum();
  return Parameters::ConstWeightMap(v.data() + l.weight, out, in).transpose() * d_pre;
}

}  // namespace

Gradient backward(const Parameters& p, const Tape& tape, const Matrix& upstream) {
  const auto& spec = p.spec();
  const auto& layers = p.layout().layers;
  if (tape.layers.size() != layers.size()) throw InputError("backward: tape does not match network");
  if (static_cast<std::size_t>(upstream.rows()) != spec.output_dim ||
      upstream.cols() != tape.layers.back().output.cols()) {
    throw InputError("backward: upstream gradient shape mismatch");
  }

  Gradient g;
  g.params.assign(p.size(), 0.0);
  const std::size_t first = spec.critic_split ? 2 : 0;
  Matrix d = upstream;
  for (std::size_t i = layers.size(); i-- > first;) d = backward_layer(p, layers[i], tape.layers[i], d, g.params);

  if (spec.critic_split) {
    const auto& s = *spec.critic_split;
    const auto sw = static_cast<Eigen::Index>(s.state_width);
    const auto aw = static_cast<Eigen::Index>(s.action_width);
    const Matrix ds = backward_layer(p, layers[0], tape.layers[0], d.topRows(sw), g.params);
    const Matrix da = backward_layer(p, layers[1], tape.layers[1], d.bottomRows(aw), g.params);
    g.input.resize(static_cast<Eigen::Index>(spec.input_dim), d.cols());
    g.input << ds, da;
  } else {
    g.input = std::move(d);
  }
  return g;
}

namespace {

// Sequential sum so the result does not depend on the buffer's address.
double l2_norm(std::span<const double> x) {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return std::sqrt(sq);
}

}  // namespace

double clip_gradient(std::span<double> grad, const AdamState& opt) {
  if (opt.clip_mode == ClipMode::value) {
    for (auto& v : grad) v = std::clamp(v, -opt.clip_norm, opt.clip_norm);
    return l2_norm(grad);
  }
  const double norm = l2_norm(grad);
  if (norm > opt.clip_norm) {
    const double scale = opt.clip_norm / norm;
    for (auto& v : grad) v *= scale;
    return opt.clip_norm;
  }
  return norm;
}

void adam_step(Parameters& p, std::span<const double> grad, AdamState& opt) {
  if (grad.size() != p.size() || opt.first_moment.size() != p.size() ||
      opt.second_moment.size() != p.size()) {
    throw InputError("adam_step: gradient/moment size does not match parameters");
  }
  if (!std::all_of(grad.begin(), grad.end(), [](double x) { return std::isfinite(x); })) {
    throw NumericError("adam_step: non-finite gradient");
  }
  FlatVector g(grad.begin(), grad.end());
  clip_gradient(g, opt);

  opt.step_count += 1;
  const double t = static_cast<double>(opt.step_count);
  const double bias1 = 1.0 - std::pow(opt.beta1, t);
  const double bias2 = 1.0 - std::pow(opt.beta2, t);
  auto v = p.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double& m = opt.first_moment[i];
    double& s = opt.second_moment[i];
    m = opt.beta1 * m + (1.0 - opt.beta1) * g[i];
    s = opt.beta2 * s + (1.0 - opt.beta2) * g[i] * g[i];
    const double m_hat = m / bias1;
    const double s_hat = s / bias2;
    v[i] -= opt.learning_rate * m_hat / (std::sqrt(s_hat) + opt.epsilon);
  }
}

void soft_update(Parameters& target, const Parameters& source, double tau) {
  if (!target.congruent(source)) throw InputError("soft_update: layout mismatch");
  if (!(tau > 0.0 && tau <= 1.0)) throw InputError("soft_update: tau must lie in (0, 1]");
  auto t = target.values();
  const auto s = source.values();
  if (tau == 1.0) {
    std::copy(s.begin(), s.end(), t.begin());
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * s[i] + (1.0 - tau) * t[i];
}

}  // namespace erl
