#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "classrbm/data.hpp"
#include "classrbm/dropping.hpp"
#include "classrbm/error.hpp"
#include "classrbm/model.hpp"
#include "classrbm/rng.hpp"
#include "classrbm/training.hpp"

namespace classrbm {

inline double classification_accuracy(const std::vector<Label>& predictions,
                                      const std::vector<Label>& truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw dimension_error("prediction and truth lists must be non-empty and equally long");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == truths[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

/// Accuracy of always answering the most frequent training label
/// (ties toward the lowest index). The sanity floor every report carries.
inline double majority_baseline(const Dataset& train, const Dataset& test) {
  if (train.size() == 0 || test.size() == 0) {
    throw data_error("majority baseline needs non-empty datasets");
  }
  std::vector<std::size_t> counts(train.num_classes(), 0);
  for (const LabeledExample& ex : train.examples()) {
    ++counts[ex.y.index() - 1];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  const Label majority(best + 1);
  std::size_t correct = 0;
  for (const LabeledExample& ex : test.examples()) {
    if (ex.y == majority) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

/// Trains on the first dataset, scores held-out accuracy on the second,
/// applying the scheme's prediction correction.
inline double evaluate_once(const Dataset& train_set, const Dataset& test_set,
                            const TrainingConfig& config) {
  if (train_set.num_visible() != test_set.num_visible() ||
      train_set.num_classes() != test_set.num_classes()) {
    throw dimension_error("train and test sets have different shapes");
  }
  const TrainingResult result = train(train_set, config);
  const ModelParameters scorer = final_prediction_params(result.params, config.scheme);
  std::vector<Label> predictions;
  std::vector<Label> truths;
  predictions.reserve(test_set.size());
  truths.reserve(test_set.size());
  for (const LabeledExample& ex : test_set.examples()) {
    predictions.push_back(predict(scorer, ex.x));
    truths.push_back(ex.y);
  }
  return classification_accuracy(predictions, truths);
}

/// The repeated-runs comparison grid: hidden-layer sizes x learning rates x
/// dropping schemes, each cell trained `repeats` times on freshly derived
/// seeds and scored on one shared held-out split.
struct ExperimentGrid {
  std::vector<std::size_t> hidden_units = {5, 10, 15, 20};
  std::vector<double> learning_rates = {0.01, 0.1};
  std::vector<DroppingScheme> schemes = {
      DroppingScheme::none(),          DroppingScheme::dropout(0.5),
      DroppingScheme::dropconnect(0.5), DroppingScheme::droppart(0.1, 0.1),
      DroppingScheme::droppart(0.5, 0.5), DroppingScheme::droppart(1.0, 1.0)};
  std::size_t repeats = 10;
  std::uint64_t base_seed = 1;
  double train_fraction = 0.7;
  // Shared training fields: momentum, iterations, cd_steps, init_scale and
  // the flags come from here; hidden_units, learning_rate, scheme and seed
  // are overwritten per cell.
  TrainingConfig training = [] {
    TrainingConfig t;
    t.iterations = 5000;
    return t;
  }();

  std::size_t num_cells() const {
    return hidden_units.size() * learning_rates.size() * schemes.size();
  }

  /// Linear cell id in axis order (hidden, learning rate, scheme).
  std::size_t cell_id(std::size_t h_idx, std::size_t lr_idx, std::size_t s_idx) const {
    return (h_idx * learning_rates.size() + lr_idx) * schemes.size() + s_idx;
  }

  TrainingConfig cell_config(std::size_t h_idx, std::size_t lr_idx, std::size_t s_idx,
                             std::size_t repeat) const {
    TrainingConfig cfg = training;
    cfg.hidden_units = hidden_units[h_idx];
    cfg.learning_rate = learning_rates[lr_idx];
    cfg.scheme = schemes[s_idx];
    cfg.seed = derive_seed(base_seed, {cell_id(h_idx, lr_idx, s_idx), repeat});
    return cfg;
  }

  void validate() const {
    if (hidden_units.empty() || learning_rates.empty() || schemes.empty()) {
      throw dimension_error("experiment grid axes must be non-empty");
    }
    if (repeats < 1) throw dimension_error("repeats must be at least 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw dimension_error("train_fraction must lie strictly between 0 and 1");
    }
    cell_config(0, 0, 0, 0).validate();
  }
};

struct CellResult {
  std::size_t hidden_units = 0;
  double learning_rate = 0.0;
  DroppingScheme scheme = DroppingScheme::none();
  std::vector<double> accuracies;  // one per completed repeat
  double mean = 0.0;
  double stddev = 0.0;  // sample convention, n-1 denominator
  double wall_seconds = 0.0;  // timing only; serialized apart from results
  std::string error;  // non-empty if the cell aborted

  bool ok() const { return error.empty(); }
};

struct ExperimentReport {
  std::uint64_t base_seed = 0;
  double train_fraction = 0.0;
  std::size_t repeats = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double majority_accuracy = 0.0;
  std::vector<CellResult> cells;
  double total_wall_seconds = 0.0;
};

/// Splits the dataset once (seeded by the grid's base seed), then trains and
/// scores every (hidden, learning rate, scheme) cell `repeats` times. Each
/// run's seed is derived from (base seed, cell id, repeat), so cells are
/// independent of execution order. A failing run marks its cell with the
/// error text instead of aborting the grid.
inline ExperimentReport run_experiment(const Dataset& dataset, const ExperimentGrid& grid) {
  grid.validate();
  const auto [train_set, test_set] = split(dataset, grid.train_fraction, grid.base_seed);

  ExperimentReport report;
  report.base_seed = grid.base_seed;
  report.train_fraction = grid.train_fraction;
  report.repeats = grid.repeats;
  report.train_size = train_set.size();
  report.test_size = test_set.size();
  report.majority_accuracy = majority_baseline(train_set, test_set);

  const auto grid_start = std::chrono::steady_clock::now();
  for (std::size_t h = 0; h < grid.hidden_units.size(); ++h) {
    for (std::size_t l = 0; l < grid.learning_rates.size(); ++l) {
      for (std::size_t s = 0; s < grid.schemes.size(); ++s) {
        CellResult cell;
        cell.hidden_units = grid.hidden_units[h];
        cell.learning_rate = grid.learning_rates[l];
        cell.scheme = grid.schemes[s];
        const auto cell_start = std::chrono::steady_clock::now();
        for (std::size_t r = 0; r < grid.repeats; ++r) {
          try {
            cell.accuracies.push_back(
                evaluate_once(train_set, test_set, grid.cell_config(h, l, s, r)));
          } catch (const error& e) {
            cell.error = "repeat " + std::to_string(r + 1) + ": " + e.what();
            break;
          }
        }
        cell.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start)
                .count();
        if (cell.ok() && cell.accuracies.size() == grid.repeats) {
          double sum = 0.0;
          for (double a : cell.accuracies) sum += a;
          cell.mean = sum / static_cast<double>(cell.accuracies.size());
          if (cell.accuracies.size() > 1) {
            double ss = 0.0;
            for (double a : cell.accuracies) ss += (a - cell.mean) * (a - cell.mean);
            cell.stddev = std::sqrt(ss / static_cast<double>(cell.accuracies.size() - 1));
          }
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  report.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - grid_start).count();
  return report;
}

}  // namespace classrbm
