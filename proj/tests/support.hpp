#pragma once

// Shared helpers for the test suites: random model generation, independent
// recomputation paths, finite differences, and distribution distances.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "classrbm/gradient.hpp"
#include "classrbm/matrix.hpp"
#include "classrbm/model.hpp"
#include "classrbm/numerics.hpp"
#include "classrbm/oracle.hpp"
#include "classrbm/rng.hpp"

namespace testsupport {

using classrbm::BinaryInput;
using classrbm::GradientRecord;
using classrbm::Label;
using classrbm::LabeledExample;
using classrbm::Matrix;
using classrbm::ModelParameters;
using classrbm::Rng;
using classrbm::Vector;

inline ModelParameters random_model(std::size_t D, std::size_t M, std::size_t K, Rng& rng,
                                    double weight_scale = 1.0, double bias_range = 1.0) {
  std::normal_distribution<double> gauss(0.0, weight_scale);
  std::uniform_real_distribution<double> unit(-bias_range, bias_range);
  Vector b(D), c(M), d(K);
  for (double& v : b) v = unit(rng);
  for (double& v : c) v = unit(rng);
  for (double& v : d) v = unit(rng);
  Matrix w1(D, M), w2(M, K);
  for (double& v : w1.data()) v = gauss(rng);
  for (double& v : w2.data()) v = gauss(rng);
  return ModelParameters(std::move(b), std::move(c), std::move(d), std::move(w1),
                         std::move(w2));
}

inline BinaryInput random_input(std::size_t D, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<std::uint8_t> bits(D);
  for (auto& v : bits) v = static_cast<std::uint8_t>(bit(rng));
  return BinaryInput(std::move(bits));
}

inline Label random_label(std::size_t K, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(1, K);
  return Label(pick(rng));
}

/// Label log scores recomputed per label from scratch, with no shared
/// precompute: an independent second path for the same contract.
inline Vector naive_label_log_scores(const ModelParameters& p, const BinaryInput& x) {
  const std::size_t M = p.num_hidden();
  const std::size_t K = p.num_classes();
  Vector scores(K);
  for (std::size_t k = 0; k < K; ++k) {
    double score = p.label_bias()[k];
    for (std::size_t j = 0; j < M; ++j) {
      double t = p.hidden_bias()[j] + p.hidden_label_weights()(j, k);
      for (std::size_t i = 0; i < p.num_visible(); ++i) {
        if (x[i]) t += p.visible_hidden_weights()(i, j);
      }
      score += classrbm::softplus(t);
    }
    scores[k] = score;
  }
  return scores;
}

/// Rebuilds the model with a single entry nudged. block: 0=b, 1=c, 2=d,
/// 3=W1 (flat row-major), 4=W2 (flat row-major).
inline ModelParameters nudge(const ModelParameters& p, int block, std::size_t index,
                             double delta) {
  Vector b = p.visible_bias();
  Vector c = p.hidden_bias();
  Vector d = p.label_bias();
  Matrix w1 = p.visible_hidden_weights();
  Matrix w2 = p.hidden_label_weights();
  switch (block) {
    case 0: b[index] += delta; break;
    case 1: c[index] += delta; break;
    case 2: d[index] += delta; break;
    case 3: w1.data()[index] += delta; break;
    case 4: w2.data()[index] += delta; break;
  }
  return ModelParameters(std::move(b), std::move(c), std::move(d), std::move(w1),
                         std::move(w2));
}

/// Central finite differences of the exact mean log-likelihood.
inline GradientRecord fd_gradient(const ModelParameters& p,
                                  const std::vector<LabeledExample>& examples, double step) {
  GradientRecord g = GradientRecord::zeros(p.num_visible(), p.num_hidden(), p.num_classes());
  auto central = [&](int block, std::size_t index) {
    const double up =
        classrbm::oracle::mean_log_likelihood(nudge(p, block, index, step), examples);
    const double down =
        classrbm::oracle::mean_log_likelihood(nudge(p, block, index, -step), examples);
    return (up - down) / (2.0 * step);
  };
  for (std::size_t i = 0; i < p.num_visible(); ++i) g.visible_bias[i] = central(0, i);
  for (std::size_t j = 0; j < p.num_hidden(); ++j) g.hidden_bias[j] = central(1, j);
  for (std::size_t k = 0; k < p.num_classes(); ++k) g.label_bias[k] = central(2, k);
  for (std::size_t i = 0; i < g.visible_hidden.size(); ++i) {
    g.visible_hidden.data()[i] = central(3, i);
  }
  for (std::size_t i = 0; i < g.hidden_label.size(); ++i) {
    g.hidden_label.data()[i] = central(4, i);
  }
  return g;
}

/// Relative block error: max absolute difference scaled by the reference
/// block's largest magnitude.
inline double block_rel_error(const Vector& test, const Vector& reference) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    diff = std::max(diff, std::abs(test[i] - reference[i]));
    scale = std::max(scale, std::abs(reference[i]));
  }
  return diff / (scale + 1e-12);
}

inline double gradient_rel_error(const GradientRecord& test, const GradientRecord& reference) {
  double worst = block_rel_error(test.visible_bias, reference.visible_bias);
  worst = std::max(worst, block_rel_error(test.hidden_bias, reference.hidden_bias));
  worst = std::max(worst, block_rel_error(test.label_bias, reference.label_bias));
  worst = std::max(worst, block_rel_error(test.visible_hidden.data(),
                                          reference.visible_hidden.data()));
  worst =
      std::max(worst, block_rel_error(test.hidden_label.data(), reference.hidden_label.data()));
  return worst;
}

inline double total_variation(const Vector& a, const Vector& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace testsupport
