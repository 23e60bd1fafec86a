#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <utility>

#include "classrbm/error.hpp"
#include "classrbm/matrix.hpp"
#include "classrbm/model.hpp"
#include "classrbm/rng.hpp"

namespace classrbm {

/// Per-connection multipliers applied to the hidden bias and the two weight
/// matrices during one learning iteration. Entries live in [0,1]; the visible
/// and label biases are never masked.
struct Mask {
  Matrix visible_hidden;  // multiplies W1, D x M
  Matrix hidden_label;    // multiplies W2, M x K
  Vector hidden_bias;     // multiplies c,  length M

  void validate() const {
    if (visible_hidden.cols() != hidden_bias.size() ||
        hidden_label.rows() != hidden_bias.size()) {
      throw dimension_error("mask blocks disagree on the hidden dimension");
    }
    auto in_unit = [](const Vector& v) {
      for (double e : v) {
        if (!(e >= 0.0 && e <= 1.0)) return false;
      }
      return true;
    };
    if (!in_unit(visible_hidden.data()) || !in_unit(hidden_label.data()) ||
        !in_unit(hidden_bias)) {
      throw dimension_error("mask entries must lie in [0,1]");
    }
  }
};

enum class DroppingKind { none, dropout, dropconnect, droppart };

inline std::string to_string(DroppingKind kind) {
  switch (kind) {
    case DroppingKind::none: return "none";
    case DroppingKind::dropout: return "dropout";
    case DroppingKind::dropconnect: return "dropconnect";
    case DroppingKind::droppart: return "droppart";
  }
  return "none";
}

/// Mask generation scheme: which distribution the multipliers are drawn from.
/// Bernoulli schemes carry `p`, the Beta scheme carries `a` and `b`.
struct DroppingScheme {
  DroppingKind kind = DroppingKind::none;
  double p = 0.0;
  double a = 0.0;
  double b = 0.0;

  static DroppingScheme none() { return DroppingScheme{DroppingKind::none, 0.0, 0.0, 0.0}; }

  static DroppingScheme dropout(double p) {
    DroppingScheme s{DroppingKind::dropout, p, 0.0, 0.0};
    s.validate();
    return s;
  }

  static DroppingScheme dropconnect(double p) {
    DroppingScheme s{DroppingKind::dropconnect, p, 0.0, 0.0};
    s.validate();
    return s;
  }

  static DroppingScheme droppart(double a, double b) {
    DroppingScheme s{DroppingKind::droppart, 0.0, a, b};
    s.validate();
    return s;
  }

  void validate() const {
    switch (kind) {
      case DroppingKind::none:
        break;
      case DroppingKind::dropout:
      case DroppingKind::dropconnect:
        if (!(p >= 0.0 && p <= 1.0)) {
          throw dimension_error("Bernoulli mask probability must lie in [0,1]");
        }
        break;
      case DroppingKind::droppart:
        if (!(a > 0.0) || !(b > 0.0)) {
          throw dimension_error("Beta mask shape parameters must be positive");
        }
        break;
    }
  }

  std::string describe() const {
    switch (kind) {
      case DroppingKind::none: return "none";
      case DroppingKind::dropout: return "dropout(p=" + std::to_string(p) + ")";
      case DroppingKind::dropconnect: return "dropconnect(p=" + std::to_string(p) + ")";
      case DroppingKind::droppart:
        return "droppart(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
    }
    return "none";
  }
};

inline Mask all_ones_mask(std::size_t num_visible, std::size_t num_hidden,
                          std::size_t num_classes) {
  return Mask{Matrix(num_visible, num_hidden, 1.0), Matrix(num_hidden, num_classes, 1.0),
              Vector(num_hidden, 1.0)};
}

/// Unit-level mask: one Bernoulli(p) draw per hidden unit j decides column j
/// of the visible-hidden block, row j of the hidden-label block, and the j-th
/// bias multiplier together.
inline Mask gen_dropout_mask(std::size_t num_visible, std::size_t num_hidden,
                             std::size_t num_classes, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw dimension_error("Bernoulli mask probability must lie in [0,1]");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mask mask{Matrix(num_visible, num_hidden), Matrix(num_hidden, num_classes),
            Vector(num_hidden, 0.0)};
  for (std::size_t j = 0; j < num_hidden; ++j) {
    const double active = unit(rng) < p ? 1.0 : 0.0;
    mask.hidden_bias[j] = active;
    for (std::size_t i = 0; i < num_visible; ++i) mask.visible_hidden(i, j) = active;
    for (std::size_t k = 0; k < num_classes; ++k) mask.hidden_label(j, k) = active;
  }
  return mask;
}

/// Connection-level mask: each entry is an independent Bernoulli(p) draw.
inline Mask gen_dropconnect_mask(std::size_t num_visible, std::size_t num_hidden,
                                 std::size_t num_classes, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw dimension_error("Bernoulli mask probability must lie in [0,1]");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mask mask{Matrix(num_visible, num_hidden), Matrix(num_hidden, num_classes),
            Vector(num_hidden, 0.0)};
  for (double& e : mask.visible_hidden.data()) e = unit(rng) < p ? 1.0 : 0.0;
  for (double& e : mask.hidden_label.data()) e = unit(rng) < p ? 1.0 : 0.0;
  for (double& e : mask.hidden_bias) e = unit(rng) < p ? 1.0 : 0.0;
  return mask;
}

/// Partial-activation mask: each entry is an independent Beta(a, b) draw, so
/// connections stay fractionally active instead of being switched off.
inline Mask gen_droppart_mask(std::size_t num_visible, std::size_t num_hidden,
                              std::size_t num_classes, double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw dimension_error("Beta mask shape parameters must be positive");
  }
  Mask mask{Matrix(num_visible, num_hidden), Matrix(num_hidden, num_classes),
            Vector(num_hidden, 0.0)};
  for (double& e : mask.visible_hidden.data()) e = sample_beta(a, b, rng);
  for (double& e : mask.hidden_label.data()) e = sample_beta(a, b, rng);
  for (double& e : mask.hidden_bias) e = sample_beta(a, b, rng);
  return mask;
}

/// Draws one mask according to the scheme; `none` yields the all-ones mask.
inline Mask gen_mask(std::size_t num_visible, std::size_t num_hidden, std::size_t num_classes,
                     const DroppingScheme& scheme, Rng& rng) {
  scheme.validate();
  switch (scheme.kind) {
    case DroppingKind::none:
      return all_ones_mask(num_visible, num_hidden, num_classes);
    case DroppingKind::dropout:
      return gen_dropout_mask(num_visible, num_hidden, num_classes, scheme.p, rng);
    case DroppingKind::dropconnect:
      return gen_dropconnect_mask(num_visible, num_hidden, num_classes, scheme.p, rng);
    case DroppingKind::droppart:
      return gen_droppart_mask(num_visible, num_hidden, num_classes, scheme.a, scheme.b, rng);
  }
  return all_ones_mask(num_visible, num_hidden, num_classes);
}

/// Hadamard products c * m, W1 * M1, W2 * M2; visible and label biases pass
/// through untouched.
inline ModelParameters apply_mask(const ModelParameters& p, const Mask& mask) {
  if (mask.visible_hidden.rows() != p.num_visible() ||
      mask.visible_hidden.cols() != p.num_hidden() ||
      mask.hidden_label.rows() != p.num_hidden() ||
      mask.hidden_label.cols() != p.num_classes() ||
      mask.hidden_bias.size() != p.num_hidden()) {
    throw dimension_error("mask shape does not match the model");
  }
  Vector c = p.hidden_bias();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= mask.hidden_bias[j];
  Matrix w1 = p.visible_hidden_weights();
  for (std::size_t i = 0; i < w1.size(); ++i) w1.data()[i] *= mask.visible_hidden.data()[i];
  Matrix w2 = p.hidden_label_weights();
  for (std::size_t i = 0; i < w2.size(); ++i) w2.data()[i] *= mask.hidden_label.data()[i];
  return ModelParameters(p.visible_bias(), std::move(c), p.label_bias(), std::move(w1),
                         std::move(w2));
}

/// Halves every hidden-label weight; the test-time correction paired with
/// unit-level masking at p = 0.5.
inline ModelParameters dropout_prediction_params(const ModelParameters& p) {
  Matrix w2 = p.hidden_label_weights();
  for (double& e : w2.data()) e *= 0.5;
  return ModelParameters(p.visible_bias(), p.hidden_bias(), p.label_bias(),
                         p.visible_hidden_weights(), std::move(w2));
}

}  // namespace classrbm
