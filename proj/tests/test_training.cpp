#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "classrbm/data.hpp"
#include "classrbm/dropping.hpp"
#include "classrbm/training.hpp"
#include "support.hpp"

using classrbm::BinaryInput;
using classrbm::Dataset;
using classrbm::DroppingScheme;
using classrbm::GradientRecord;
using classrbm::Label;
using classrbm::LabeledExample;
using classrbm::Matrix;
using classrbm::ModelParameters;
using classrbm::Rng;
using classrbm::TrainingConfig;
using classrbm::Vector;

namespace {

/// Exact expectation of the CD-1 estimate at one example, by enumerating the
/// single Gibbs sweep: h ~ p(h|x,y), then x' ~ p(x|h) and y' ~ p(y|h).
GradientRecord expected_cd1(const ModelParameters& p, const LabeledExample& ex) {
  const std::size_t D = p.num_visible();
  const std::size_t M = p.num_hidden();
  const std::size_t K = p.num_classes();
  const Vector hp = classrbm::hidden_activation_probs(p, ex.x, ex.y);

  GradientRecord g = GradientRecord::zeros(D, M, K);
  for (std::uint64_t hc = 0; hc < (1ULL << M); ++hc) {
    const auto h = classrbm::oracle::detail::bits_from_code(hc, M);
    double ph = 1.0;
    for (std::size_t j = 0; j < M; ++j) ph *= h[j] ? hp[j] : 1.0 - hp[j];
    const Vector vp = classrbm::visible_activation_probs(p, h);
    const auto lp = classrbm::label_probs_given_hidden(p, h);
    for (std::uint64_t xc = 0; xc < (1ULL << D); ++xc) {
      const BinaryInput xn = classrbm::oracle::detail::input_from_code(xc, D);
      double px = 1.0;
      for (std::size_t i = 0; i < D; ++i) px *= xn[i] ? vp[i] : 1.0 - vp[i];
      for (std::size_t k = 1; k <= K; ++k) {
        const double w = ph * px * lp[k - 1];
        if (w == 0.0) continue;
        const Vector hn = classrbm::hidden_activation_probs(p, xn, Label(k));
        for (std::size_t i = 0; i < D; ++i) {
          g.visible_bias[i] += w * (static_cast<double>(ex.x[i]) - static_cast<double>(xn[i]));
        }
        for (std::size_t j = 0; j < M; ++j) g.hidden_bias[j] += w * (hp[j] - hn[j]);
        g.label_bias[ex.y.index() - 1] += w;
        g.label_bias[k - 1] -= w;
        for (std::size_t i = 0; i < D; ++i) {
          for (std::size_t j = 0; j < M; ++j) {
            g.visible_hidden(i, j) +=
                w * (static_cast<double>(ex.x[i]) * hp[j] - static_cast<double>(xn[i]) * hn[j]);
          }
        }
        for (std::size_t j = 0; j < M; ++j) {
          g.hidden_label(j, ex.y.index() - 1) += w * hp[j];
          g.hidden_label(j, k - 1) -= w * hn[j];
        }
      }
    }
  }
  return g;
}

double max_abs_block_diff(const GradientRecord& a, const GradientRecord& b) {
  double worst = 0.0;
  auto scan = [&](const Vector& u, const Vector& v) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      worst = std::max(worst, std::abs(u[i] - v[i]));
    }
  };
  scan(a.visible_bias, b.visible_bias);
  scan(a.hidden_bias, b.hidden_bias);
  scan(a.label_bias, b.label_bias);
  scan(a.visible_hidden.data(), b.visible_hidden.data());
  scan(a.hidden_label.data(), b.hidden_label.data());
  return worst;
}

Dataset tiny_dataset() {
  std::vector<LabeledExample> examples{
      {BinaryInput({1, 0, 1}), Label(1)}, {BinaryInput({0, 1, 1}), Label(2)},
      {BinaryInput({1, 1, 0}), Label(1)}, {BinaryInput({0, 0, 1}), Label(2)},
      {BinaryInput({1, 0, 0}), Label(1)},
  };
  return Dataset(3, 2, std::move(examples));
}

}  // namespace

TEST_CASE("config validation") {
  TrainingConfig config;
  config.hidden_units = 3;
  CHECK_NOTHROW(config.validate());

  TrainingConfig bad = config;
  bad.hidden_units = 0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.iterations = 0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.cd_steps = 0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.learning_rate = -0.1;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.init_scale = -1.0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = config;
  bad.scheme.kind = classrbm::DroppingKind::dropout;
  bad.scheme.p = 2.0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);
}

TEST_CASE("init_params draws weights and leaves biases zero") {
  Rng a(7);
  Rng b(7);
  const ModelParameters pa = classrbm::init_params(3, 2, 2, 0.01, a);
  const ModelParameters pb = classrbm::init_params(3, 2, 2, 0.01, b);
  CHECK(pa == pb);
  for (double v : pa.visible_bias()) CHECK(v == 0.0);
  for (double v : pa.hidden_bias()) CHECK(v == 0.0);
  for (double v : pa.label_bias()) CHECK(v == 0.0);

  Rng c(7);
  const ModelParameters zero_scale = classrbm::init_params(3, 2, 2, 0.0, c);
  for (double v : zero_scale.visible_hidden_weights().data()) CHECK(v == 0.0);
  const auto probs = classrbm::predict_proba(zero_scale, BinaryInput({1, 0, 1}));
  CHECK(probs[0] == Catch::Approx(0.5).margin(1e-15));
  // Scale zero draws nothing: the generator stays in step with the fresh one.
  Rng d(7);
  CHECK(c() == d());
}

TEST_CASE("init_params weight spread follows the scale") {
  Rng rng(71);
  const ModelParameters p = classrbm::init_params(100, 100, 2, 0.01, rng);
  double sumsq = 0.0;
  for (double v : p.visible_hidden_weights().data()) sumsq += v * v;
  const double std = std::sqrt(sumsq / p.visible_hidden_weights().size());
  CHECK(std > 0.009);
  CHECK(std < 0.011);
}

TEST_CASE("cd label block is a difference of one-hot vectors") {
  Rng rng(500);
  const ModelParameters p = testsupport::random_model(4, 3, 3, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const LabeledExample ex{testsupport::random_input(4, rng), testsupport::random_label(3, rng)};
    const GradientRecord g = classrbm::cd_gradient(p, ex, 1, rng);
    double sum = 0.0;
    for (double v : g.label_bias) {
      sum += v;
      CHECK((v == -1.0 || v == 0.0 || v == 1.0));
    }
    CHECK(sum == 0.0);
    for (double v : g.visible_bias) {
      CHECK((v == -1.0 || v == 0.0 || v == 1.0));
    }
  }
}

TEST_CASE("cd gradient vanishes at a saturated fixed point") {
  const ModelParameters p(Vector{40.0, -40.0}, Vector{40.0, -40.0}, Vector{40.0, 0.0},
                          Matrix(2, 2), Matrix(2, 2));
  const LabeledExample ex{BinaryInput({1, 0}), Label(1)};
  Rng rng(510);
  for (int trial = 0; trial < 20; ++trial) {
    const GradientRecord g = classrbm::cd_gradient(p, ex, 1, rng);
    for (double v : g.visible_bias) CHECK(v == 0.0);
    for (double v : g.hidden_bias) CHECK(v == 0.0);
    for (double v : g.label_bias) CHECK(v == 0.0);
    for (double v : g.visible_hidden.data()) CHECK(v == 0.0);
    for (double v : g.hidden_label.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("cd gradient averages to its enumerated expectation") {
  Rng model_rng(520);
  const ModelParameters p = testsupport::random_model(3, 2, 2, model_rng, 0.3, 0.3);
  Rng rng(521);
  const std::vector<LabeledExample> examples{
      {BinaryInput({1, 0, 1}), Label(1)},
      {BinaryInput({0, 1, 0}), Label(2)},
      {BinaryInput({1, 1, 1}), Label(2)},
  };
  for (const LabeledExample& ex : examples) {
    const GradientRecord expected = expected_cd1(p, ex);
    GradientRecord mean = GradientRecord::zeros(3, 2, 2);
    const int n = 30000;
    for (int draw = 0; draw < n; ++draw) {
      const GradientRecord g = classrbm::cd_gradient(p, ex, 1, rng);
      for (std::size_t i = 0; i < 3; ++i) mean.visible_bias[i] += g.visible_bias[i];
      for (std::size_t j = 0; j < 2; ++j) mean.hidden_bias[j] += g.hidden_bias[j];
      for (std::size_t k = 0; k < 2; ++k) mean.label_bias[k] += g.label_bias[k];
      for (std::size_t i = 0; i < 6; ++i) {
        mean.visible_hidden.data()[i] += g.visible_hidden.data()[i];
      }
      for (std::size_t i = 0; i < 4; ++i) {
        mean.hidden_label.data()[i] += g.hidden_label.data()[i];
      }
    }
    for (double& v : mean.visible_bias) v /= n;
    for (double& v : mean.hidden_bias) v /= n;
    for (double& v : mean.label_bias) v /= n;
    for (double& v : mean.visible_hidden.data()) v /= n;
    for (double& v : mean.hidden_label.data()) v /= n;
    CHECK(max_abs_block_diff(mean, expected) < 0.02);
  }
}

TEST_CASE("training with zero learning rate returns the initial weights") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.learning_rate = 0.0;
  config.iterations = 50;
  config.seed = 33;
  const auto result = classrbm::train(data, config);

  Rng rng(33);
  const ModelParameters expected = classrbm::init_params(3, 2, 2, config.init_scale, rng);
  CHECK(result.params == expected);
}

TEST_CASE("training is a pure function of the seed") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 3;
  config.learning_rate = 0.1;
  config.iterations = 400;
  config.seed = 77;
  config.scheme = DroppingScheme::droppart(0.5, 0.5);

  const auto r1 = classrbm::train(data, config);
  const auto r2 = classrbm::train(data, config);
  CHECK(r1.params == r2.params);
  REQUIRE(r1.log.checkpoints.size() == r2.log.checkpoints.size());
  for (std::size_t i = 0; i < r1.log.checkpoints.size(); ++i) {
    CHECK(r1.log.checkpoints[i].iteration == r2.log.checkpoints[i].iteration);
    CHECK(r1.log.checkpoints[i].reconstruction_error ==
          r2.log.checkpoints[i].reconstruction_error);
    CHECK(r1.log.checkpoints[i].train_accuracy == r2.log.checkpoints[i].train_accuracy);
  }
}

TEST_CASE("one masked update is exactly reproducible by hand") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.learning_rate = 1e-3;
  config.momentum = 0.0;
  config.iterations = 1;
  config.seed = 91;
  config.scheme = DroppingScheme::dropconnect(0.7);

  const auto result = classrbm::train(data, config);

  // Replay the documented generator consumption: init, example pick, mask,
  // then the Gibbs draws inside the gradient.
  Rng rng(91);
  const ModelParameters init = classrbm::init_params(3, 2, 2, config.init_scale, rng);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  const LabeledExample& ex = data.examples()[pick(rng)];
  const classrbm::Mask mask = classrbm::gen_mask(3, 2, 2, config.scheme, rng);
  const GradientRecord g =
      classrbm::cd_gradient(classrbm::apply_mask(init, mask), ex, config.cd_steps, rng);

  Vector b = init.visible_bias();
  Vector c = init.hidden_bias();
  Vector d = init.label_bias();
  Matrix w1 = init.visible_hidden_weights();
  Matrix w2 = init.hidden_label_weights();
  for (std::size_t i = 0; i < 3; ++i) b[i] += config.learning_rate * g.visible_bias[i];
  for (std::size_t k = 0; k < 2; ++k) d[k] += config.learning_rate * g.label_bias[k];
  for (std::size_t j = 0; j < 2; ++j) {
    c[j] += config.learning_rate * mask.hidden_bias[j] * g.hidden_bias[j];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      w1(i, j) += config.learning_rate * mask.visible_hidden(i, j) * g.visible_hidden(i, j);
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k < 2; ++k) {
      w2(j, k) += config.learning_rate * mask.hidden_label(j, k) * g.hidden_label(j, k);
    }
  }
  const ModelParameters expected(std::move(b), std::move(c), std::move(d), std::move(w1),
                                 std::move(w2));
  CHECK(result.params == expected);
}

TEST_CASE("an all-zero mask freezes the masked blocks but not the biases") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.learning_rate = 0.1;
  config.iterations = 200;
  config.seed = 13;
  config.scheme = DroppingScheme::dropconnect(0.0);

  const auto result = classrbm::train(data, config);
  Rng rng(13);
  const ModelParameters init = classrbm::init_params(3, 2, 2, config.init_scale, rng);
  CHECK(result.params.hidden_bias() == init.hidden_bias());
  CHECK(result.params.visible_hidden_weights() == init.visible_hidden_weights());
  CHECK(result.params.hidden_label_weights() == init.hidden_label_weights());
  CHECK(result.params.visible_bias() != init.visible_bias());
}

TEST_CASE("divergent learning rates abort instead of returning garbage") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.learning_rate = 1e308;
  config.iterations = 50;
  config.seed = 3;
  CHECK_THROWS_AS(classrbm::train(data, config), classrbm::numerical_error);
}

TEST_CASE("training rejects an empty dataset") {
  const Dataset empty(3, 2, {});
  TrainingConfig config;
  config.hidden_units = 2;
  CHECK_THROWS_AS(classrbm::train(empty, config), classrbm::data_error);
}

TEST_CASE("checkpoint cadence covers start, interval, and final iteration") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.iterations = 250;
  config.log_every = 100;
  config.seed = 5;
  const auto result = classrbm::train(data, config);
  std::vector<std::size_t> iterations;
  for (const auto& cp : result.log.checkpoints) iterations.push_back(cp.iteration);
  CHECK(iterations == std::vector<std::size_t>{0, 100, 200, 250});
}

TEST_CASE("sweep mode visits examples in reshuffled passes, deterministically") {
  const Dataset data = tiny_dataset();
  TrainingConfig config;
  config.hidden_units = 2;
  config.learning_rate = 0.05;
  config.iterations = 100;
  config.seed = 21;
  config.sweep_examples = true;
  const auto r1 = classrbm::train(data, config);
  const auto r2 = classrbm::train(data, config);
  CHECK(r1.params == r2.params);
}

TEST_CASE("dropout training halves the label weights for prediction") {
  Rng rng(530);
  const ModelParameters p = testsupport::random_model(3, 2, 2, rng);
  const ModelParameters for_dropout =
      classrbm::final_prediction_params(p, DroppingScheme::dropout(0.5));
  CHECK(for_dropout == classrbm::dropout_prediction_params(p));
  const ModelParameters untouched =
      classrbm::final_prediction_params(p, DroppingScheme::dropconnect(0.5));
  CHECK(untouched == p);
  CHECK(classrbm::final_prediction_params(p, DroppingScheme::none()) == p);
}

TEST_CASE("training raises the exact likelihood on small problems") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng gen_rng(900 + seed);
    const auto synth = classrbm::synth_generate(4, 2, 20, 0.5, gen_rng);

    TrainingConfig config;
    config.hidden_units = 3;
    config.learning_rate = 0.05;
    config.iterations = 5000;
    config.log_every = 5000;
    config.seed = seed;
    config.track_exact_loglik = true;
    const auto result = classrbm::train(synth.data, config);

    REQUIRE(result.log.checkpoints.size() >= 2);
    const auto& first = result.log.checkpoints.front();
    const auto& last = result.log.checkpoints.back();
    REQUIRE(first.mean_log_likelihood.has_value());
    REQUIRE(last.mean_log_likelihood.has_value());
    if (*last.mean_log_likelihood > *first.mean_log_likelihood) ++improved;
  }
  CHECK(improved >= 9);
}
