#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "classrbm/error.hpp"
#include "classrbm/matrix.hpp"
#include "classrbm/numerics.hpp"
#include "classrbm/rng.hpp"

namespace classrbm {

/// Binary visible vector; every entry is exactly 0 or 1.
class BinaryInput {
 public:
  BinaryInput() = default;

  explicit BinaryInput(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::uint8_t b : bits_) {
      if (b > 1) {
        throw dimension_error("BinaryInput entries must be 0 or 1");
      }
    }
  }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryInput& a, const BinaryInput& b) {
    return a.bits_ == b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

/// Class label with 1-based index.
class Label {
 public:
  Label() = default;
  explicit Label(std::size_t index) : index_(index) {
    if (index_ < 1) {
      throw dimension_error("Label index must be at least 1");
    }
  }

  std::size_t index() const { return index_; }

  friend bool operator==(Label a, Label b) { return a.index_ == b.index_; }
  friend bool operator!=(Label a, Label b) { return a.index_ != b.index_; }

 private:
  std::size_t index_ = 1;
};

inline std::vector<std::uint8_t> one_hot(Label y, std::size_t num_classes) {
  if (y.index() > num_classes) {
    throw dimension_error("Label index exceeds the number of classes");
  }
  std::vector<std::uint8_t> v(num_classes, 0);
  v[y.index() - 1] = 1;
  return v;
}

inline Label label_from_one_hot(const std::vector<std::uint8_t>& v) {
  std::size_t active = 0;
  std::size_t where = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 1) {
      ++active;
      where = k;
    } else if (v[k] != 0) {
      throw dimension_error("one-hot vector entries must be 0 or 1");
    }
  }
  if (active != 1) {
    throw dimension_error("one-hot vector must have exactly one active entry");
  }
  return Label(where + 1);
}

/// Sampled bits and mean-field activations of the hidden layer.
struct HiddenState {
  std::vector<std::uint8_t> bits;
  Vector probs;
};

struct LabeledExample {
  BinaryInput x;
  Label y;
};

/// Distribution over class labels; entries in [0,1] summing to 1.
class LabelDistribution {
 public:
  explicit LabelDistribution(Vector probs) : probs_(std::move(probs)) {
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw numerical_error("LabelDistribution entry outside [0,1]");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
      throw numerical_error("LabelDistribution does not sum to 1");
    }
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  const Vector& probs() const { return probs_; }

  /// Index (1-based) of the largest entry; ties resolve to the lowest index.
  Label argmax() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < probs_.size(); ++k) {
      if (probs_[k] > probs_[best]) best = k;
    }
    return Label(best + 1);
  }

 private:
  Vector probs_;
};

/// Full parameter set of the classification RBM: biases for the visible,
/// hidden, and label layers plus the two inter-layer weight matrices
/// (visible-hidden, D x M, and hidden-label, M x K). Immutable once built;
/// construction validates shape consistency and finiteness of every entry.
class ModelParameters {
 public:
  ModelParameters(Vector visible_bias, Vector hidden_bias, Vector label_bias,
                  Matrix visible_hidden_weights, Matrix hidden_label_weights)
      : b_(std::move(visible_bias)),
        c_(std::move(hidden_bias)),
        d_(std::move(label_bias)),
        w1_(std::move(visible_hidden_weights)),
        w2_(std::move(hidden_label_weights)) {
    if (b_.empty() || c_.empty() || d_.empty()) {
      throw dimension_error("model dimensions must be positive");
    }
    if (w1_.rows() != b_.size() || w1_.cols() != c_.size()) {
      throw dimension_error("visible-hidden weight shape does not match biases");
    }
    if (w2_.rows() != c_.size() || w2_.cols() != d_.size()) {
      throw dimension_error("hidden-label weight shape does not match biases");
    }
    check_finite();
  }

  std::size_t num_visible() const { return b_.size(); }
  std::size_t num_hidden() const { return c_.size(); }
  std::size_t num_classes() const { return d_.size(); }

  const Vector& visible_bias() const { return b_; }
  const Vector& hidden_bias() const { return c_; }
  const Vector& label_bias() const { return d_; }
  const Matrix& visible_hidden_weights() const { return w1_; }
  const Matrix& hidden_label_weights() const { return w2_; }

  void check_finite() const {
    if (!all_finite(b_) || !all_finite(c_) || !all_finite(d_) ||
        !all_finite(w1_.data()) || !all_finite(w2_.data())) {
      throw numerical_error("model parameters contain a non-finite value");
    }
  }

  friend bool operator==(const ModelParameters& a, const ModelParameters& b) {
    return a.b_ == b.b_ && a.c_ == b.c_ && a.d_ == b.d_ && a.w1_ == b.w1_ && a.w2_ == b.w2_;
  }

 private:
  Vector b_, c_, d_;
  Matrix w1_, w2_;
};

inline ModelParameters zero_params(std::size_t num_visible, std::size_t num_hidden,
                                   std::size_t num_classes) {
  return ModelParameters(Vector(num_visible, 0.0), Vector(num_hidden, 0.0),
                         Vector(num_classes, 0.0), Matrix(num_visible, num_hidden),
                         Matrix(num_hidden, num_classes));
}

namespace detail {

inline void check_input(const ModelParameters& p, const BinaryInput& x) {
  if (x.size() != p.num_visible()) {
    throw dimension_error("input width does not match the model");
  }
}

inline void check_label(const ModelParameters& p, Label y) {
  if (y.index() > p.num_classes()) {
    throw dimension_error("label index out of range");
  }
}

inline void check_hidden(const ModelParameters& p, const std::vector<std::uint8_t>& h) {
  if (h.size() != p.num_hidden()) {
    throw dimension_error("hidden vector length does not match the model");
  }
}

}  // namespace detail

/// E(x, y, h) = -b'x - c'h - d'y - x'W1 h - h'W2 y.
inline double energy(const ModelParameters& p, const BinaryInput& x, Label y,
                     const std::vector<std::uint8_t>& h) {
  detail::check_input(p, x);
  detail::check_label(p, y);
  detail::check_hidden(p, h);
  const std::size_t D = p.num_visible();
  const std::size_t M = p.num_hidden();
  const std::size_t k = y.index() - 1;

  double e = -p.label_bias()[k];
  for (std::size_t i = 0; i < D; ++i) {
    if (x[i]) e -= p.visible_bias()[i];
  }
  for (std::size_t j = 0; j < M; ++j) {
    if (!h[j]) continue;
    e -= p.hidden_bias()[j];
    e -= p.hidden_label_weights()(j, k);
    for (std::size_t i = 0; i < D; ++i) {
      if (x[i]) e -= p.visible_hidden_weights()(i, j);
    }
  }
  return e;
}

/// Mean-field hidden activations: entry j is sigm(c_j + W2[j, y] + W1[:, j]'x).
inline Vector hidden_activation_probs(const ModelParameters& p, const BinaryInput& x, Label y) {
  detail::check_input(p, x);
  detail::check_label(p, y);
  const std::size_t k = y.index() - 1;
  Vector probs(p.num_hidden());
  for (std::size_t j = 0; j < p.num_hidden(); ++j) {
    double t = p.hidden_bias()[j] + p.hidden_label_weights()(j, k);
    for (std::size_t i = 0; i < p.num_visible(); ++i) {
      if (x[i]) t += p.visible_hidden_weights()(i, j);
    }
    probs[j] = sigmoid(t);
  }
  return probs;
}

/// Visible activations given hidden bits: entry i is sigm(b_i + W1[i, :]h).
inline Vector visible_activation_probs(const ModelParameters& p,
                                       const std::vector<std::uint8_t>& h) {
  detail::check_hidden(p, h);
  Vector probs(p.num_visible());
  for (std::size_t i = 0; i < p.num_visible(); ++i) {
    double t = p.visible_bias()[i];
    for (std::size_t j = 0; j < p.num_hidden(); ++j) {
      if (h[j]) t += p.visible_hidden_weights()(i, j);
    }
    probs[i] = sigmoid(t);
  }
  return probs;
}

/// Softmax over d_y + W2[:, y]'h, evaluated in the log domain.
inline LabelDistribution label_probs_given_hidden(const ModelParameters& p,
                                                  const std::vector<std::uint8_t>& h) {
  detail::check_hidden(p, h);
  const std::size_t K = p.num_classes();
  Vector scores(K);
  for (std::size_t k = 0; k < K; ++k) {
    double t = p.label_bias()[k];
    for (std::size_t j = 0; j < p.num_hidden(); ++j) {
      if (h[j]) t += p.hidden_label_weights()(j, k);
    }
    scores[k] = t;
  }
  const double lse = log_sum_exp(scores);
  Vector probs(K);
  for (std::size_t k = 0; k < K; ++k) {
    probs[k] = std::exp(scores[k] - lse);
  }
  return LabelDistribution(std::move(probs));
}

/// Unnormalized log posterior scores over labels with the hidden layer summed
/// out analytically:
///
///   score_y = d_y + sum_j softplus(s_j + W2[j, y]),  s_j = c_j + W1[:, j]'x.
///
/// The s_j are computed once (O(MD)) and reused across labels (O(MK)).
inline Vector label_log_scores(const ModelParameters& p, const BinaryInput& x) {
  detail::check_input(p, x);
  const std::size_t M = p.num_hidden();
  const std::size_t K = p.num_classes();

  Vector s(M);
  for (std::size_t j = 0; j < M; ++j) {
    double t = p.hidden_bias()[j];
    for (std::size_t i = 0; i < p.num_visible(); ++i) {
      if (x[i]) t += p.visible_hidden_weights()(i, j);
    }
    s[j] = t;
  }

  Vector scores(K);
  for (std::size_t k = 0; k < K; ++k) {
    double score = p.label_bias()[k];
    for (std::size_t j = 0; j < M; ++j) {
      score += softplus(s[j] + p.hidden_label_weights()(j, k));
    }
    scores[k] = score;
  }
  return scores;
}

/// Exact class posterior p(y|x), normalized with log-sum-exp.
inline LabelDistribution predict_proba(const ModelParameters& p, const BinaryInput& x) {
  Vector scores = label_log_scores(p, x);
  const double lse = log_sum_exp(scores);
  Vector probs(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    probs[k] = std::exp(scores[k] - lse);
  }
  return LabelDistribution(std::move(probs));
}

/// Most probable class; ties break toward the lowest label index.
inline Label predict(const ModelParameters& p, const BinaryInput& x) {
  return predict_proba(p, x).argmax();
}

struct GibbsSample {
  BinaryInput x;
  Label y;
  std::vector<std::uint8_t> h;
};

/// One full Gibbs sweep: h ~ p(h|x,y), then x' ~ p(x|h) and y' ~ p(y|h).
/// Pure function of (inputs, generator state).
inline GibbsSample gibbs_step(const ModelParameters& p, const BinaryInput& x, Label y,
                              Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const Vector hidden_probs = hidden_activation_probs(p, x, y);
  std::vector<std::uint8_t> h(hidden_probs.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    h[j] = unit(rng) < hidden_probs[j] ? 1 : 0;
  }

  const Vector visible_probs = visible_activation_probs(p, h);
  std::vector<std::uint8_t> xbits(visible_probs.size());
  for (std::size_t i = 0; i < xbits.size(); ++i) {
    xbits[i] = unit(rng) < visible_probs[i] ? 1 : 0;
  }

  const LabelDistribution label_probs = label_probs_given_hidden(p, h);
  double u = unit(rng);
  std::size_t k = 0;
  double acc = 0.0;
  for (; k + 1 < label_probs.size(); ++k) {
    acc += label_probs[k];
    if (u < acc) break;
  }

  return GibbsSample{BinaryInput(std::move(xbits)), Label(k + 1), std::move(h)};
}

}  // namespace classrbm
