#pragma once

#include "classrbm/matrix.hpp"
#include "classrbm/model.hpp"

namespace classrbm {

/// Log-likelihood gradient (or an estimate of it), one block per parameter
/// block of the model, same shapes as ModelParameters.
struct GradientRecord {
  Vector visible_bias;     // d/db,  length D
  Vector hidden_bias;      // d/dc,  length M
  Vector label_bias;       // d/dd,  length K
  Matrix visible_hidden;   // d/dW1, D x M
  Matrix hidden_label;     // d/dW2, M x K

  static GradientRecord zeros(std::size_t num_visible, std::size_t num_hidden,
                              std::size_t num_classes) {
    return GradientRecord{Vector(num_visible, 0.0), Vector(num_hidden, 0.0),
                          Vector(num_classes, 0.0), Matrix(num_visible, num_hidden),
                          Matrix(num_hidden, num_classes)};
  }
};

}  // namespace classrbm
