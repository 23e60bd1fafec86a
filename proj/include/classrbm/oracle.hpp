#pragma once

// Brute-force reference implementations. Everything here enumerates binary
// configurations outright and is meant for tiny models only; the rest of the
// library is validated against these routines on randomized small instances.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "classrbm/gradient.hpp"
#include "classrbm/model.hpp"
#include "classrbm/numerics.hpp"

namespace classrbm::oracle {

inline constexpr std::size_t kMaxEnumVisible = 16;
inline constexpr std::size_t kMaxEnumHidden = 16;
inline constexpr std::size_t kMaxEnumClasses = 10;

namespace detail {

inline void check_enum_guard(const ModelParameters& p, bool needs_hidden_enumeration) {
  if (p.num_visible() > kMaxEnumVisible || p.num_classes() > kMaxEnumClasses) {
    throw enumeration_error("enumeration too large: model exceeds the oracle size guard");
  }
  if (needs_hidden_enumeration && p.num_hidden() > kMaxEnumHidden) {
    throw enumeration_error("enumeration too large: hidden layer exceeds the oracle size guard");
  }
}

inline BinaryInput input_from_code(std::uint64_t code, std::size_t width) {
  std::vector<std::uint8_t> bits(width);
  for (std::size_t i = 0; i < width; ++i) {
    bits[i] = static_cast<std::uint8_t>((code >> i) & 1u);
  }
  return BinaryInput(std::move(bits));
}

inline std::vector<std::uint8_t> bits_from_code(std::uint64_t code, std::size_t width) {
  std::vector<std::uint8_t> bits(width);
  for (std::size_t i = 0; i < width; ++i) {
    bits[i] = static_cast<std::uint8_t>((code >> i) & 1u);
  }
  return bits;
}

/// Unnormalized log p(x, y) with the hidden layer summed out analytically:
/// b'x + d_y + sum_j softplus(c_j + W2[j, y] + W1[:, j]'x).
inline double free_log_weight(const ModelParameters& p, const BinaryInput& x, Label y) {
  const std::size_t k = y.index() - 1;
  double lw = p.label_bias()[k];
  for (std::size_t i = 0; i < p.num_visible(); ++i) {
    if (x[i]) lw += p.visible_bias()[i];
  }
  for (std::size_t j = 0; j < p.num_hidden(); ++j) {
    double t = p.hidden_bias()[j] + p.hidden_label_weights()(j, k);
    for (std::size_t i = 0; i < p.num_visible(); ++i) {
      if (x[i]) t += p.visible_hidden_weights()(i, j);
    }
    lw += softplus(t);
  }
  return lw;
}

}  // namespace detail

/// log Z by enumerating every (x, y) configuration, hidden units summed
/// analytically. Guarded: refuses models beyond the enumeration limits.
inline double log_partition_function(const ModelParameters& p) {
  detail::check_enum_guard(p, false);
  const std::uint64_t n_inputs = 1ULL << p.num_visible();
  Vector log_weights;
  log_weights.reserve(n_inputs * p.num_classes());
  for (std::uint64_t code = 0; code < n_inputs; ++code) {
    const BinaryInput x = detail::input_from_code(code, p.num_visible());
    for (std::size_t k = 1; k <= p.num_classes(); ++k) {
      log_weights.push_back(detail::free_log_weight(p, x, Label(k)));
    }
  }
  return log_sum_exp(log_weights);
}

/// log Z by triple enumeration over (x, y, h); the slow second route used to
/// validate the analytic hidden sum.
inline double log_partition_bruteforce(const ModelParameters& p) {
  detail::check_enum_guard(p, true);
  const std::uint64_t n_inputs = 1ULL << p.num_visible();
  const std::uint64_t n_hidden = 1ULL << p.num_hidden();
  Vector log_weights;
  log_weights.reserve(n_inputs * p.num_classes() * n_hidden);
  for (std::uint64_t xc = 0; xc < n_inputs; ++xc) {
    const BinaryInput x = detail::input_from_code(xc, p.num_visible());
    for (std::size_t k = 1; k <= p.num_classes(); ++k) {
      for (std::uint64_t hc = 0; hc < n_hidden; ++hc) {
        log_weights.push_back(-energy(p, x, Label(k), detail::bits_from_code(hc, p.num_hidden())));
      }
    }
  }
  return log_sum_exp(log_weights);
}

/// Exact joint probability p(x, y) with hidden units summed out.
inline double exact_joint(const ModelParameters& p, const BinaryInput& x, Label y) {
  detail::check_enum_guard(p, false);
  classrbm::detail::check_input(p, x);
  classrbm::detail::check_label(p, y);
  return std::exp(detail::free_log_weight(p, x, y) - log_partition_function(p));
}

/// Exact gradient of the mean log-likelihood over a dataset: data expectation
/// minus model expectation of the sufficient statistics.
inline GradientRecord exact_loglik_gradient(const ModelParameters& p,
                                            const std::vector<LabeledExample>& dataset) {
  detail::check_enum_guard(p, false);
  if (dataset.empty()) {
    throw dimension_error("exact_loglik_gradient requires a non-empty dataset");
  }
  const std::size_t D = p.num_visible();
  const std::size_t M = p.num_hidden();
  const std::size_t K = p.num_classes();

  // shared accumulator: stats(x, y) scaled by `weight` added into `out`
  auto accumulate = [&](GradientRecord& out, const BinaryInput& x, Label y, double weight) {
    const std::size_t k = y.index() - 1;
    out.label_bias[k] += weight;
    for (std::size_t i = 0; i < D; ++i) {
      if (x[i]) out.visible_bias[i] += weight;
    }
    for (std::size_t j = 0; j < M; ++j) {
      double t = p.hidden_bias()[j] + p.hidden_label_weights()(j, k);
      for (std::size_t i = 0; i < D; ++i) {
        if (x[i]) t += p.visible_hidden_weights()(i, j);
      }
      const double hp = sigmoid(t) * weight;
      out.hidden_bias[j] += hp;
      out.hidden_label(j, k) += hp;
      for (std::size_t i = 0; i < D; ++i) {
        if (x[i]) out.visible_hidden(i, j) += hp;
      }
    }
  };

  GradientRecord data_term = GradientRecord::zeros(D, M, K);
  for (const LabeledExample& ex : dataset) {
    classrbm::detail::check_input(p, ex.x);
    classrbm::detail::check_label(p, ex.y);
    accumulate(data_term, ex.x, ex.y, 1.0 / static_cast<double>(dataset.size()));
  }

  GradientRecord model_term = GradientRecord::zeros(D, M, K);
  const double log_z = log_partition_function(p);
  const std::uint64_t n_inputs = 1ULL << D;
  for (std::uint64_t code = 0; code < n_inputs; ++code) {
    const BinaryInput x = detail::input_from_code(code, D);
    for (std::size_t k = 1; k <= K; ++k) {
      const Label y(k);
      accumulate(model_term, x, y, std::exp(detail::free_log_weight(p, x, y) - log_z));
    }
  }

  GradientRecord grad = GradientRecord::zeros(D, M, K);
  for (std::size_t i = 0; i < D; ++i) grad.visible_bias[i] = data_term.visible_bias[i] - model_term.visible_bias[i];
  for (std::size_t j = 0; j < M; ++j) grad.hidden_bias[j] = data_term.hidden_bias[j] - model_term.hidden_bias[j];
  for (std::size_t k = 0; k < K; ++k) grad.label_bias[k] = data_term.label_bias[k] - model_term.label_bias[k];
  for (std::size_t i = 0; i < grad.visible_hidden.size(); ++i) {
    grad.visible_hidden.data()[i] = data_term.visible_hidden.data()[i] - model_term.visible_hidden.data()[i];
  }
  for (std::size_t i = 0; i < grad.hidden_label.size(); ++i) {
    grad.hidden_label.data()[i] = data_term.hidden_label.data()[i] - model_term.hidden_label.data()[i];
  }
  return grad;
}

/// Mean log p(x, y) over a dataset, sharing one partition-function evaluation.
inline double mean_log_likelihood(const ModelParameters& p,
                                  const std::vector<LabeledExample>& dataset) {
  detail::check_enum_guard(p, false);
  if (dataset.empty()) {
    throw dimension_error("mean_log_likelihood requires a non-empty dataset");
  }
  const double log_z = log_partition_function(p);
  double total = 0.0;
  for (const LabeledExample& ex : dataset) {
    total += detail::free_log_weight(p, ex.x, ex.y) - log_z;
  }
  return total / static_cast<double>(dataset.size());
}

/// p(x_i = 1 | all other inputs zero, y) by conditioning the exact joint on
/// the two admissible inputs (the i-th basis vector and the zero vector).
/// `input` is a 0-based index.
inline double exact_input_relevance(const ModelParameters& p, std::size_t input, Label y) {
  detail::check_enum_guard(p, false);
  classrbm::detail::check_label(p, y);
  if (input >= p.num_visible()) {
    throw dimension_error("input index out of range");
  }
  std::vector<std::uint8_t> bits(p.num_visible(), 0);
  const BinaryInput zero(bits);
  bits[input] = 1;
  const BinaryInput basis(std::move(bits));
  // The partition function cancels in the ratio; work with free log weights.
  const double lw_basis = detail::free_log_weight(p, basis, y);
  const double lw_zero = detail::free_log_weight(p, zero, y);
  return sigmoid(lw_basis - lw_zero);
}

// ---------------------------------------------------------------------------
// Conditionals recomputed from the joint by exhaustive enumeration. These are
// the independent routes for checking the closed forms in model.hpp; they go
// through energy() only and never touch the sigmoid/softplus expressions.
// ---------------------------------------------------------------------------

/// p(y | x) by enumerating every hidden configuration for each label.
inline Vector enum_label_posterior(const ModelParameters& p, const BinaryInput& x) {
  detail::check_enum_guard(p, true);
  classrbm::detail::check_input(p, x);
  const std::uint64_t n_hidden = 1ULL << p.num_hidden();
  const std::size_t K = p.num_classes();
  Vector per_label(K);
  for (std::size_t k = 1; k <= K; ++k) {
    Vector lw;
    lw.reserve(n_hidden);
    for (std::uint64_t hc = 0; hc < n_hidden; ++hc) {
      lw.push_back(-energy(p, x, Label(k), detail::bits_from_code(hc, p.num_hidden())));
    }
    per_label[k - 1] = log_sum_exp(lw);
  }
  const double lse = log_sum_exp(per_label);
  for (double& v : per_label) v = std::exp(v - lse);
  return per_label;
}

/// Per-unit p(h_j = 1 | x, y) by enumerating every hidden configuration.
inline Vector enum_hidden_conditional(const ModelParameters& p, const BinaryInput& x, Label y) {
  detail::check_enum_guard(p, true);
  classrbm::detail::check_input(p, x);
  classrbm::detail::check_label(p, y);
  const std::size_t M = p.num_hidden();
  const std::uint64_t n_hidden = 1ULL << M;
  Vector lw(n_hidden);
  for (std::uint64_t hc = 0; hc < n_hidden; ++hc) {
    lw[hc] = -energy(p, x, y, detail::bits_from_code(hc, M));
  }
  const double total = log_sum_exp(lw);
  Vector probs(M);
  for (std::size_t j = 0; j < M; ++j) {
    Vector active;
    active.reserve(n_hidden / 2);
    for (std::uint64_t hc = 0; hc < n_hidden; ++hc) {
      if ((hc >> j) & 1u) active.push_back(lw[hc]);
    }
    probs[j] = std::exp(log_sum_exp(active) - total);
  }
  return probs;
}

/// Per-input p(x_i = 1 | h) by enumerating every visible configuration and
/// summing the label out of the joint.
inline Vector enum_visible_conditional(const ModelParameters& p,
                                       const std::vector<std::uint8_t>& h) {
  detail::check_enum_guard(p, false);
  classrbm::detail::check_hidden(p, h);
  const std::size_t D = p.num_visible();
  const std::uint64_t n_inputs = 1ULL << D;
  Vector lw(n_inputs);
  for (std::uint64_t xc = 0; xc < n_inputs; ++xc) {
    const BinaryInput x = detail::input_from_code(xc, D);
    Vector over_labels(p.num_classes());
    for (std::size_t k = 1; k <= p.num_classes(); ++k) {
      over_labels[k - 1] = -energy(p, x, Label(k), h);
    }
    lw[xc] = log_sum_exp(over_labels);
  }
  const double total = log_sum_exp(lw);
  Vector probs(D);
  for (std::size_t i = 0; i < D; ++i) {
    Vector active;
    active.reserve(n_inputs / 2);
    for (std::uint64_t xc = 0; xc < n_inputs; ++xc) {
      if ((xc >> i) & 1u) active.push_back(lw[xc]);
    }
    probs[i] = std::exp(log_sum_exp(active) - total);
  }
  return probs;
}

/// p(y | h) by enumerating every visible configuration per label.
inline Vector enum_label_given_hidden(const ModelParameters& p,
                                      const std::vector<std::uint8_t>& h) {
  detail::check_enum_guard(p, false);
  classrbm::detail::check_hidden(p, h);
  const std::uint64_t n_inputs = 1ULL << p.num_visible();
  Vector per_label(p.num_classes());
  for (std::size_t k = 1; k <= p.num_classes(); ++k) {
    Vector lw;
    lw.reserve(n_inputs);
    for (std::uint64_t xc = 0; xc < n_inputs; ++xc) {
      lw.push_back(-energy(p, detail::input_from_code(xc, p.num_visible()), Label(k), h));
    }
    per_label[k - 1] = log_sum_exp(lw);
  }
  const double lse = log_sum_exp(per_label);
  for (double& v : per_label) v = std::exp(v - lse);
  return per_label;
}

}  // namespace classrbm::oracle
