#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "classrbm/data.hpp"
#include "classrbm/dropping.hpp"
#include "classrbm/error.hpp"
#include "classrbm/gradient.hpp"
#include "classrbm/model.hpp"
#include "classrbm/oracle.hpp"
#include "classrbm/rng.hpp"

namespace classrbm {

struct TrainingConfig {
  std::size_t hidden_units = 0;
  double learning_rate = 0.01;
  double momentum = 0.5;
  std::size_t iterations = 100000;
  std::size_t cd_steps = 1;
  DroppingScheme scheme = DroppingScheme::none();
  std::uint64_t seed = 1;
  double init_scale = 0.01;
  // One iteration normally consumes one uniformly drawn example; with
  // sweep_examples the examples are visited in reshuffled passes instead.
  bool sweep_examples = false;
  std::size_t log_every = 0;  // 0: a tenth of the iteration budget
  // Records exact mean log-likelihood at checkpoints. Only feasible on
  // models small enough to enumerate.
  bool track_exact_loglik = false;

  void validate() const {
    if (hidden_units < 1) throw dimension_error("hidden_units must be at least 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw dimension_error("learning_rate must be a finite non-negative real");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
      throw dimension_error("momentum must lie in [0,1)");
    }
    if (iterations < 1) throw dimension_error("iterations must be at least 1");
    if (cd_steps < 1) throw dimension_error("cd_steps must be at least 1");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
      throw dimension_error("init_scale must be a finite non-negative real");
    }
    scheme.validate();
  }
};

struct TrainingCheckpoint {
  std::size_t iteration = 0;
  double reconstruction_error = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> mean_log_likelihood;
};

struct TrainingLog {
  std::vector<TrainingCheckpoint> checkpoints;
};

/// Weights iid Gaussian(0, init_scale^2), biases zero. W1 fills row-major
/// first, then W2; scale 0 draws nothing from the generator.
inline ModelParameters init_params(std::size_t num_visible, std::size_t num_hidden,
                                   std::size_t num_classes, double init_scale, Rng& rng) {
  if (num_visible < 1 || num_hidden < 1 || num_classes < 1) {
    throw dimension_error("model dimensions must be positive");
  }
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw dimension_error("init_scale must be a finite non-negative real");
  }
  Matrix w1(num_visible, num_hidden);
  Matrix w2(num_hidden, num_classes);
  if (init_scale > 0.0) {
    std::normal_distribution<double> gauss(0.0, init_scale);
    for (double& w : w1.data()) w = gauss(rng);
    for (double& w : w2.data()) w = gauss(rng);
  }
  return ModelParameters(Vector(num_visible, 0.0), Vector(num_hidden, 0.0),
                         Vector(num_classes, 0.0), std::move(w1), std::move(w2));
}

/// CD-k gradient estimate at one example: positive phase takes (x, y) with
/// mean-field hidden activations, the negative phase takes the chain state
/// after cd_steps full Gibbs sweeps started at the example, again with
/// mean-field hidden activations. Returns positive minus negative per block.
inline GradientRecord cd_gradient(const ModelParameters& p, const LabeledExample& example,
                                  std::size_t cd_steps, Rng& rng) {
  if (cd_steps < 1) throw dimension_error("cd_steps must be at least 1");
  detail::check_input(p, example.x);
  detail::check_label(p, example.y);
  const std::size_t D = p.num_visible();
  const std::size_t M = p.num_hidden();
  const std::size_t K = p.num_classes();

  const Vector hp = hidden_activation_probs(p, example.x, example.y);
  GibbsSample chain{example.x, example.y, {}};
  for (std::size_t step = 0; step < cd_steps; ++step) {
    chain = gibbs_step(p, chain.x, chain.y, rng);
  }
  const Vector hn = hidden_activation_probs(p, chain.x, chain.y);

  GradientRecord g = GradientRecord::zeros(D, M, K);
  for (std::size_t i = 0; i < D; ++i) {
    g.visible_bias[i] = static_cast<double>(example.x[i]) - static_cast<double>(chain.x[i]);
  }
  for (std::size_t j = 0; j < M; ++j) {
    g.hidden_bias[j] = hp[j] - hn[j];
  }
  g.label_bias[example.y.index() - 1] += 1.0;
  g.label_bias[chain.y.index() - 1] -= 1.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double xp = example.x[i];
    const double xn = chain.x[i];
    if (xp == 0.0 && xn == 0.0) continue;
    for (std::size_t j = 0; j < M; ++j) {
      g.visible_hidden(i, j) = xp * hp[j] - xn * hn[j];
    }
  }
  for (std::size_t j = 0; j < M; ++j) {
    g.hidden_label(j, example.y.index() - 1) += hp[j];
    g.hidden_label(j, chain.y.index() - 1) -= hn[j];
  }
  return g;
}

/// Parameters to use at prediction time after training under a scheme:
/// dropout halves the hidden-label weights, everything else passes through.
inline ModelParameters final_prediction_params(const ModelParameters& params,
                                               const DroppingScheme& scheme) {
  if (scheme.kind == DroppingKind::dropout) {
    return dropout_prediction_params(params);
  }
  return params;
}

struct TrainingResult {
  ModelParameters params;
  TrainingLog log;
};

/// Stochastic CD training. Each iteration: draw one example, draw one mask
/// from the scheme, take the CD gradient at the masked parameters, then apply
/// the momentum update with the mask multiplying the c, W1, W2 gradient
/// blocks (b and d update unmasked).
///
/// The whole run is a pure function of config.seed. Generator consumption
/// order: weight initialization first, then per iteration the example draw
/// (or a pass reshuffle when sweep_examples starts a new pass), the mask draw
/// (nothing for scheme none), then the Gibbs draws.
inline TrainingResult train(const Dataset& dataset, const TrainingConfig& config) {
  config.validate();
  if (dataset.size() == 0) throw data_error("cannot train on an empty dataset");
  const std::size_t D = dataset.num_visible();
  const std::size_t M = config.hidden_units;
  const std::size_t K = dataset.num_classes();
  const std::size_t n = dataset.size();

  Rng rng(config.seed);
  ModelParameters init = init_params(D, M, K, config.init_scale, rng);
  Vector b = init.visible_bias();
  Vector c = init.hidden_bias();
  Vector d = init.label_bias();
  Matrix w1 = init.visible_hidden_weights();
  Matrix w2 = init.hidden_label_weights();

  Vector vb(D, 0.0), vc(M, 0.0), vd(K, 0.0);
  Matrix vw1(D, M), vw2(M, K);

  const bool masked = config.scheme.kind != DroppingKind::none;
  const double lr = config.learning_rate;
  const double mom = config.momentum;

  auto as_params = [&]() {
    return ModelParameters(b, c, d, w1, w2);
  };

  auto record_checkpoint = [&](std::size_t iteration, TrainingLog& log) {
    const ModelParameters current = as_params();
    const ModelParameters scorer = final_prediction_params(current, config.scheme);
    double recon = 0.0;
    std::size_t correct = 0;
    for (const LabeledExample& ex : dataset.examples()) {
      const Vector hp = hidden_activation_probs(current, ex.x, ex.y);
      double example_err = 0.0;
      for (std::size_t i = 0; i < D; ++i) {
        double t = b[i];
        for (std::size_t j = 0; j < M; ++j) t += w1(i, j) * hp[j];
        example_err += std::abs(static_cast<double>(ex.x[i]) - sigmoid(t));
      }
      recon += example_err / static_cast<double>(D);
      if (predict(scorer, ex.x) == ex.y) ++correct;
    }
    TrainingCheckpoint cp;
    cp.iteration = iteration;
    cp.reconstruction_error = recon / static_cast<double>(n);
    cp.train_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (config.track_exact_loglik) {
      cp.mean_log_likelihood = oracle::mean_log_likelihood(current, dataset.examples());
    }
    log.checkpoints.push_back(cp);
  };

  const std::size_t cadence =
      config.log_every > 0 ? config.log_every : std::max<std::size_t>(1, config.iterations / 10);

  TrainingLog log;
  record_checkpoint(0, log);

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n;  // forces a reshuffle on the first sweep iteration

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    std::size_t index;
    if (config.sweep_examples) {
      if (cursor == n) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      index = order[cursor++];
    } else {
      index = pick(rng);
    }
    const LabeledExample& ex = dataset.examples()[index];

    GradientRecord g;
    Mask mask;
    if (masked) {
      mask = gen_mask(D, M, K, config.scheme, rng);
      g = cd_gradient(apply_mask(as_params(), mask), ex, config.cd_steps, rng);
    } else {
      g = cd_gradient(as_params(), ex, config.cd_steps, rng);
    }

    for (std::size_t i = 0; i < D; ++i) {
      vb[i] = mom * vb[i] + lr * g.visible_bias[i];
      b[i] += vb[i];
    }
    for (std::size_t k = 0; k < K; ++k) {
      vd[k] = mom * vd[k] + lr * g.label_bias[k];
      d[k] += vd[k];
    }
    if (masked) {
      for (std::size_t j = 0; j < M; ++j) {
        vc[j] = mom * vc[j] + lr * mask.hidden_bias[j] * g.hidden_bias[j];
        c[j] += vc[j];
      }
      for (std::size_t i = 0; i < D; ++i) {
        for (std::size_t j = 0; j < M; ++j) {
          vw1(i, j) = mom * vw1(i, j) + lr * mask.visible_hidden(i, j) * g.visible_hidden(i, j);
          w1(i, j) += vw1(i, j);
        }
      }
      for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t k = 0; k < K; ++k) {
          vw2(j, k) = mom * vw2(j, k) + lr * mask.hidden_label(j, k) * g.hidden_label(j, k);
          w2(j, k) += vw2(j, k);
        }
      }
    } else {
      for (std::size_t j = 0; j < M; ++j) {
        vc[j] = mom * vc[j] + lr * g.hidden_bias[j];
        c[j] += vc[j];
      }
      for (std::size_t i = 0; i < w1.size(); ++i) {
        vw1.data()[i] = mom * vw1.data()[i] + lr * g.visible_hidden.data()[i];
        w1.data()[i] += vw1.data()[i];
      }
      for (std::size_t i = 0; i < w2.size(); ++i) {
        vw2.data()[i] = mom * vw2.data()[i] + lr * g.hidden_label.data()[i];
        w2.data()[i] += vw2.data()[i];
      }
    }

    if (!all_finite(b) || !all_finite(c) || !all_finite(d) || !all_finite(w1.data()) ||
        !all_finite(w2.data())) {
      throw numerical_error("non-finite parameter after update " + std::to_string(t) +
                            " of " + std::to_string(config.iterations) +
                            " (consider a smaller learning rate)");
    }

    if (t % cadence == 0 || t == config.iterations) {
      record_checkpoint(t, log);
    }
  }

  return TrainingResult{as_params(), std::move(log)};
}

}  // namespace classrbm
