#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "erl/errors.hpp"
#include "erl/neural.hpp"
#include "gradcheck.hpp"

namespace erl {
namespace {

NetworkSpec tiny_actor() { return actor_spec(2, 1, {4}); }

// Straight-line re-implementation of one hidden layer with layer norm,
// reading weights by explicit row-major index arithmetic.
std::vector<double> oracle_layer(const std::vector<double>& v, const LayerLayout& l, const std::vector<double>& x,
                                 Activation act) {
  std::vector<double> z(l.out);
  for (std::size_t i = 0; i < l.out; ++i) {
    double acc = v[l.bias + i];
    for (std::size_t j = 0; j < l.in; ++j) acc += v[l.weight + i * l.in + j] * x[j];
    z[i] = acc;
  }
  if (l.ln_gain) {
    double mean = 0.0;
    for (double q : z) mean += q;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double q : z) var += (q - mean) * (q - mean);
    var /= static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = v[*l.ln_gain + i] * (z[i] - mean) / std::sqrt(var + kLayerNormEpsilon) + v[*l.ln_bias + i];
    }
  }
  for (double& q : z) {
    if (act == Activation::tanh) q = std::tanh(q);
    if (act == Activation::elu) q = q > 0 ? q : std::exp(q) - 1.0;
  }
  return z;
}

TEST(Neural, InitIsDeterministicPerSeed) {
  RandomStream a(7), b(7);
  EXPECT_EQ(init_network(tiny_actor(), a), init_network(tiny_actor(), b));
  RandomStream c(8);
  RandomStream d(7);
  EXPECT_NE(init_network(tiny_actor(), c).values()[0], init_network(tiny_actor(), d).values()[0]);
}

TEST(Neural, ParameterCountMatchesHandCount) {
  // W1 2*4 + b1 4 + LN gain/bias 4+4 + W2 4*1 + b2 1
  EXPECT_EQ(parameter_count(tiny_actor()), 2u * 4 + 4 + 8 + 4 * 1 + 1);
  EXPECT_EQ(parameter_count(actor_spec(2, 1, {4}, false)), 2u * 4 + 4 + 4 * 1 + 1);
  // state 3 -> 5 (+LN), action 1 -> 2 (+LN), 7 -> 6 (+LN), 6 -> 1
  const std::size_t critic = (3 * 5 + 5 + 10) + (1 * 2 + 2 + 4) + (7 * 6 + 6 + 12) + (6 + 1);
  EXPECT_EQ(parameter_count(critic_spec(3, 1, 5, 2, {6})), critic);
}

TEST(Neural, ParameterCountEqualsFlatLengthAcrossSpecs) {
  for (std::size_t h : {1u, 3u, 16u}) {
    for (bool ln : {true, false}) {
      NetworkSpec a = actor_spec(3, 2, {h, h + 1}, ln);
      EXPECT_EQ(Parameters(a).size(), parameter_count(a));
      NetworkSpec c = critic_spec(3, 2, h, h + 2, {h}, ln);
      EXPECT_EQ(Parameters(c).size(), parameter_count(c));
    }
  }
}

TEST(Neural, InitRespectsDocumentedBounds) {
  RandomStream rng(11);
  Parameters p = init_network(critic_spec(3, 1, 8, 8, {12}), rng);
  const auto v = p.values();
  for (const auto& l : p.layout().layers) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    for (std::size_t i = 0; i < l.weight_count(); ++i) {
      EXPECT_LE(std::abs(v[l.weight + i]), bound);
    }
    for (std::size_t i = 0; i < l.out; ++i) {
      EXPECT_EQ(v[l.bias + i], 0.0);
      if (l.ln_gain) {
        EXPECT_EQ(v[*l.ln_gain + i], 1.0);
        EXPECT_EQ(v[*l.ln_bias + i], 0.0);
      }
    }
  }
  EXPECT_TRUE(p.all_finite());
}

TEST(Neural, SpecValidationRejectsBadSplit) {
  NetworkSpec s = critic_spec(3, 1, 4, 4, {5});
  s.hidden_dims[0] = 9;
  EXPECT_THROW(s.validate(), InputError);
  s = critic_spec(3, 1, 4, 4, {5});
  s.input_dim = 5;
  EXPECT_THROW(s.validate(), InputError);
  EXPECT_THROW(actor_spec(0, 1, {4}), InputError);
}

TEST(Neural, ZeroActorOutputsZero) {
  Parameters p(actor_spec(3, 2, {5, 5}, false));
  const std::vector<double> s{0.3, -2.0, 7.0};
  const Vector a = forward_actor(p, s);
  ASSERT_EQ(a.size(), 2);
  EXPECT_EQ(a(0), 0.0);
  EXPECT_EQ(a(1), 0.0);
}

TEST(Neural, ActorOutputsStayInUnitBox) {
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Parameters p = init_network(actor_spec(3, 2, {8, 8}), rng);
    for (auto& v : p.values()) v *= 20.0;
    std::vector<double> s{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vector a = forward_actor(p, s);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      EXPECT_GE(a(i), -1.0);
      EXPECT_LE(a(i), 1.0);
    }
  }
}

TEST(Neural, ActorMatchesStraightLineOracle) {
  RandomStream rng(7);
  Parameters p = init_network(tiny_actor(), rng);
  // Perturb layer-norm parameters away from identity so they matter.
  auto v = p.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.01 * static_cast<double>(i % 5);
  const std::vector<double> state{0.1, -0.2};

  const std::vector<double> vals(v.begin(), v.end());
  const auto& L = p.layout().layers;
  auto h = oracle_layer(vals, L[0], state, Activation::tanh);
  auto out = oracle_layer(vals, L[1], h, Activation::tanh);

  const Vector a = forward_actor(p, state);
  ASSERT_EQ(a.size(), 1);
  EXPECT_NEAR(a(0), out[0], 1e-14);
}

TEST(Neural, CriticMatchesStraightLineOracle) {
  RandomStream rng(5);
  Parameters p = init_network(critic_spec(3, 1, 4, 3, {5}), rng);
  auto v = p.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.02 * static_cast<double>(i % 3);
  const std::vector<double> vals(v.begin(), v.end());
  const std::vector<double> s{0.4, -0.1, 0.9};
  const std::vector<double> a{-0.7};

  const auto& L = p.layout().layers;
  auto hs = oracle_layer(vals, L[0], s, Activation::elu);
  auto ha = oracle_layer(vals, L[1], a, Activation::elu);
  hs.insert(hs.end(), ha.begin(), ha.end());
  auto h2 = oracle_layer(vals, L[2], hs, Activation::elu);
  auto q = oracle_layer(vals, L[3], h2, Activation::identity);

  EXPECT_NEAR(forward_critic(p, s, a), q[0], 1e-13);
}

TEST(Neural, ZeroCriticOutputsZero) {
  Parameters p(critic_spec(3, 1, 4, 4, {6}));
  const std::vector<double> s{1.0, 2.0, 3.0};
  const std::vector<double> a{0.5};
  EXPECT_EQ(forward_critic(p, s, a), 0.0);
}

TEST(Neural, CriticSubLayerRoleSwapIsSymmetric) {
  // A critic with split (2, 3) and one with split (3, 2) compute the same
  // function once the sub-layers trade places and the next layer's input
  // columns are permuted to match the new concatenation order.
  RandomStream rng(21);
  const std::size_t wa = 4, wb = 3;
  Parameters p = init_network(critic_spec(2, 3, wa, wb, {5}), rng);
  Parameters q(critic_spec(3, 2, wb, wa, {5}));
  const auto& lp = p.layout().layers;
  const auto& lq = q.layout().layers;
  auto pv = p.values();
  auto qv = q.values();
  auto copy_layer = [&](const LayerLayout& from, const LayerLayout& to) {
    std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(from.weight), from.weight_count(),
                qv.begin() + static_cast<std::ptrdiff_t>(to.weight));
    for (std::size_t i = 0; i < from.out; ++i) {
      qv[to.bias + i] = pv[from.bias + i];
      qv[*to.ln_gain + i] = pv[*from.ln_gain + i];
      qv[*to.ln_bias + i] = pv[*from.ln_bias + i];
    }
  };
  copy_layer(lp[0], lq[1]);
  copy_layer(lp[1], lq[0]);
  // Layer 2: q's input is [B-block (wb), A-block (wa)].
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < wa; ++c) qv[lq[2].weight + r * 7 + wb + c] = pv[lp[2].weight + r * 7 + c];
    for (std::size_t c = 0; c < wb; ++c) qv[lq[2].weight + r * 7 + c] = pv[lp[2].weight + r * 7 + wa + c];
    qv[lq[2].bias + r] = pv[lp[2].bias + r];
    qv[*lq[2].ln_gain + r] = pv[*lp[2].ln_gain + r];
    qv[*lq[2].ln_bias + r] = pv[*lp[2].ln_bias + r];
  }
  std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(lp[3].weight), 6,
              qv.begin() + static_cast<std::ptrdiff_t>(lq[3].weight));

  const std::vector<double> x{0.3, -0.8}, y{0.5, 0.1, -0.4};
  EXPECT_NEAR(forward_critic(p, x, y), forward_critic(q, y, x), 1e-13);
}

TEST(Neural, ForwardRejectsWrongDimensions) {
  Parameters a(tiny_actor());
  const std::vector<double> s3{1, 2, 3};
  EXPECT_THROW(forward_actor(a, s3), InputError);
  Parameters c(critic_spec(3, 1, 2, 2, {3}));
  const std::vector<double> s{1, 2, 3}, bad{1, 2};
  EXPECT_THROW(forward_critic(c, s, bad), InputError);
  EXPECT_THROW(forward_critic(a, s, bad), InputError);
}

TEST(Neural, ZeroOutputLayerBlocksEarlierGradients) {
  RandomStream rng(2);
  Parameters p = init_network(actor_spec(3, 2, {5, 4}), rng);
  const auto& out = p.layout().layers.back();
  auto v = p.values();
  std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(out.weight), out.weight_count(), 0.0);

  Matrix x = Matrix::Random(3, 6);
  Tape tape;
  forward(p, x, &tape);
  const Gradient g = backward(p, tape, Matrix::Ones(2, 6));
  for (std::size_t i = 0; i < out.weight; ++i) EXPECT_EQ(g.params[i], 0.0) << "index " << i;
  EXPECT_TRUE(g.input.isZero(0.0));
}

TEST(Neural, BackwardRejectsMismatchedShapes) {
  RandomStream rng(1);
  Parameters p = init_network(tiny_actor(), rng);
  Tape tape;
  forward(p, Matrix::Random(2, 3), &tape);
  EXPECT_THROW(backward(p, tape, Matrix::Ones(2, 3)), InputError);
  EXPECT_THROW(backward(p, tape, Matrix::Ones(1, 4)), InputError);
}

TEST(Neural, ActorGradientMatchesFiniteDifferences) {
  RandomStream rng(101);
  for (int draw = 0; draw < 20; ++draw) {
    const auto r = testing::check_network_gradient(actor_spec(3, 2, {6, 5}), rng, 4);
    EXPECT_LT(r.params, 1e-4) << "draw " << draw;
    EXPECT_LT(r.inputs, 1e-4) << "draw " << draw;
  }
}

TEST(Neural, CriticGradientMatchesFiniteDifferences) {
  RandomStream rng(202);
  for (int draw = 0; draw < 20; ++draw) {
    const auto r = testing::check_network_gradient(critic_spec(3, 2, 4, 3, {6}), rng, 4);
    EXPECT_LT(r.params, 1e-4) << "draw " << draw;
    EXPECT_LT(r.inputs, 1e-4) << "draw " << draw;  // includes d Q / d action
  }
}

TEST(Neural, GradientWithoutLayerNormMatchesFiniteDifferences) {
  RandomStream rng(303);
  const auto r = testing::check_network_gradient(critic_spec(2, 1, 3, 3, {4}, false), rng, 3);
  EXPECT_LT(r.params, 1e-4);
  EXPECT_LT(r.inputs, 1e-4);
}

TEST(Adam, ZeroGradientLeavesParametersAndCountsStep) {
  RandomStream rng(1);
  Parameters p = init_network(tiny_actor(), rng);
  const Parameters before = p;
  AdamState opt(p.size(), 0.1);
  const std::vector<double> zero(p.size(), 0.0);
  adam_step(p, zero, opt);
  EXPECT_EQ(p, before);
  EXPECT_EQ(opt.step_count, 1u);
}

TEST(Adam, NormClippingCapsAtClipNorm) {
  std::vector<double> g(4, 50.0);  // norm 100
  AdamState opt(4, 0.1, 10.0);
  EXPECT_DOUBLE_EQ(clip_gradient(g, opt), 10.0);
  double sq = 0.0;
  for (double x : g) sq += x * x;
  EXPECT_NEAR(std::sqrt(sq), 10.0, 1e-12);
  for (double x : g) EXPECT_NEAR(x, 5.0, 1e-12);  // direction preserved
}

TEST(Adam, ValueClippingIsElementwise) {
  std::vector<double> g{50.0, -3.0, -20.0};
  AdamState opt(3, 0.1, 10.0);
  opt.clip_mode = ClipMode::value;
  clip_gradient(g, opt);
  EXPECT_EQ(g, (std::vector<double>{10.0, -3.0, -10.0}));
}

TEST(Adam, TwoStepsMatchHandEvaluatedRecurrence) {
  // Scalar-weight network: y = w*x + b, both parameters driven by grad 1.
  NetworkSpec s;
  s.input_dim = 1;
  s.output_dim = 1;
  s.layer_norm = false;
  s.output_activation = Activation::identity;
  Parameters p(s);
  p.values()[0] = 0.5;
  AdamState opt(p.size(), 0.1, 10.0);
  const std::vector<double> g{1.0, 1.0};

  // m1 = 0.1, v1 = 0.001 -> m_hat = v_hat = 1; m2 = 0.19, v2 = 0.001999 -> again 1.
  double w = 0.5, m = 0.0, v = 0.0;
  for (int t = 1; t <= 2; ++t) {
    m = 0.9 * m + 0.1;
    v = 0.999 * v + 0.001;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    w -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    adam_step(p, g, opt);
  }
  EXPECT_DOUBLE_EQ(p.values()[0], w);
  EXPECT_NEAR(p.values()[0], 0.5 - 0.2, 1e-8);
  EXPECT_EQ(opt.step_count, 2u);
}

TEST(Adam, NonFiniteGradientIsRejectedWithoutSideEffects) {
  RandomStream rng(1);
  Parameters p = init_network(tiny_actor(), rng);
  const Parameters before = p;
  AdamState opt(p.size(), 0.1);
  std::vector<double> g(p.size(), 0.1);
  g[3] = std::nan("");
  EXPECT_THROW(adam_step(p, g, opt), NumericError);
  EXPECT_EQ(p, before);
  EXPECT_EQ(opt.step_count, 0u);
  g[3] = INFINITY;
  EXPECT_THROW(adam_step(p, g, opt), NumericError);
}

TEST(SoftUpdate, TauOneCopiesSource) {
  RandomStream rng(4);
  Parameters t = init_network(tiny_actor(), rng);
  const Parameters s = init_network(tiny_actor(), rng);
  soft_update(t, s, 1.0);
  EXPECT_EQ(t, s);
}

TEST(SoftUpdate, SmallTauArithmetic) {
  NetworkSpec spec = tiny_actor();
  Parameters t(spec), s(spec);
  for (auto& v : s.values()) v = 1.0;
  soft_update(t, s, 1e-3);
  for (double v : t.values()) EXPECT_DOUBLE_EQ(v, 0.001);
}

TEST(SoftUpdate, RepeatedUpdatesContractTowardSource) {
  RandomStream rng(9);
  Parameters t = init_network(tiny_actor(), rng);
  const Parameters s = init_network(tiny_actor(), rng);
  auto max_diff = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t.values()[i] - s.values()[i]));
    return m;
  };
  double prev = max_diff();
  for (int i = 0; i < 50; ++i) {
    soft_update(t, s, 0.05);
    const double d = max_diff();
    EXPECT_LT(d, prev);
    prev = d;
    EXPECT_TRUE(t.all_finite());
  }
}

TEST(SoftUpdate, RejectsMismatchedLayouts) {
  Parameters t(tiny_actor());
  Parameters s(actor_spec(2, 1, {5}));
  EXPECT_THROW(soft_update(t, s, 0.5), InputError);
  Parameters ok(tiny_actor());
  EXPECT_THROW(soft_update(t, ok, 0.0), InputError);
}

}  // namespace
}  // namespace erl
