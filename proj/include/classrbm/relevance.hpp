#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "classrbm/error.hpp"
#include "classrbm/model.hpp"
#include "classrbm/numerics.hpp"

namespace classrbm {

/// Probability that input i is present given the class label and every other
/// input absent, for each i. Closed form with the hidden layer summed out:
///
///   p_i = sigm( b_i + sum_j [ softplus(c_j + W2[j,y] + W1[i,j])
///                             - softplus(c_j + W2[j,y]) ] )
///
/// which is the two-point conditional between the i-th basis input and the
/// all-zero input.
inline Vector input_relevance(const ModelParameters& p, Label y) {
  detail::check_label(p, y);
  const std::size_t D = p.num_visible();
  const std::size_t M = p.num_hidden();
  const std::size_t k = y.index() - 1;

  // baseline softplus terms for the all-zero input, shared across i
  Vector base(M);
  for (std::size_t j = 0; j < M; ++j) {
    base[j] = p.hidden_bias()[j] + p.hidden_label_weights()(j, k);
  }

  Vector probs(D);
  for (std::size_t i = 0; i < D; ++i) {
    double logit = p.visible_bias()[i];
    for (std::size_t j = 0; j < M; ++j) {
      logit += softplus(base[j] + p.visible_hidden_weights()(i, j)) - softplus(base[j]);
    }
    probs[i] = sigmoid(logit);
  }
  return probs;
}

/// Indices (1-based) whose probability strictly exceeds the threshold, in
/// ascending order.
inline std::vector<std::size_t> relevant_inputs(const Vector& relevance, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw dimension_error("relevance threshold must lie strictly between 0 and 1");
  }
  for (double r : relevance) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw dimension_error("relevance entries must lie in [0,1]");
    }
  }
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    if (relevance[i] > threshold) selected.push_back(i + 1);
  }
  return selected;
}

/// Per-class relevance probabilities with input names attached and the
/// threshold applied; one probability row per (class, input).
struct RelevanceReport {
  double threshold = 0.5;
  std::vector<std::string> input_names;          // length D
  std::vector<Vector> per_class;                 // K vectors of length D
  std::vector<std::vector<std::size_t>> selected;  // K sets of 1-based indices
};

inline RelevanceReport relevance_report(const ModelParameters& p,
                                        const std::vector<std::string>& input_names,
                                        double threshold) {
  if (input_names.size() != p.num_visible()) {
    throw dimension_error("input name list length does not match the model width");
  }
  RelevanceReport report;
  report.threshold = threshold;
  report.input_names = input_names;
  report.per_class.reserve(p.num_classes());
  report.selected.reserve(p.num_classes());
  for (std::size_t k = 1; k <= p.num_classes(); ++k) {
    Vector probs = input_relevance(p, Label(k));
    report.selected.push_back(relevant_inputs(probs, threshold));
    report.per_class.push_back(std::move(probs));
  }
  return report;
}

}  // namespace classrbm
