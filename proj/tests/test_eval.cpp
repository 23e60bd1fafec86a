#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "classrbm/data.hpp"
#include "classrbm/eval.hpp"
#include "classrbm/serialize.hpp"

using classrbm::BinaryInput;
using classrbm::Dataset;
using classrbm::DroppingScheme;
using classrbm::ExperimentGrid;
using classrbm::Label;
using classrbm::LabeledExample;
using classrbm::Rng;

TEST_CASE("classification accuracy") {
  const std::vector<Label> truth{Label(1), Label(2), Label(1), Label(2), Label(1)};
  CHECK(classrbm::classification_accuracy(truth, truth) == 1.0);

  const std::vector<Label> wrong{Label(2), Label(1), Label(2), Label(1), Label(2)};
  CHECK(classrbm::classification_accuracy(wrong, truth) == 0.0);

  const std::vector<Label> mixed{Label(1), Label(2), Label(2), Label(1), Label(1)};
  CHECK(classrbm::classification_accuracy(mixed, truth) == 0.6);

  CHECK_THROWS_AS(classrbm::classification_accuracy({}, {}), classrbm::dimension_error);
  CHECK_THROWS_AS(classrbm::classification_accuracy({Label(1)}, truth),
                  classrbm::dimension_error);
}

TEST_CASE("majority baseline") {
  const Dataset train(2, 2,
                      {{BinaryInput({0, 0}), Label(1)},
                       {BinaryInput({0, 1}), Label(1)},
                       {BinaryInput({1, 0}), Label(2)}});
  const Dataset test(2, 2,
                     {{BinaryInput({0, 0}), Label(1)},
                      {BinaryInput({1, 1}), Label(2)},
                      {BinaryInput({1, 0}), Label(1)},
                      {BinaryInput({0, 1}), Label(1)}});
  CHECK(classrbm::majority_baseline(train, test) == 0.75);

  // Tie in the training counts resolves to the lower label.
  const Dataset tied(2, 2,
                     {{BinaryInput({0, 0}), Label(1)}, {BinaryInput({1, 1}), Label(2)}});
  CHECK(classrbm::majority_baseline(tied, test) == 0.75);

  CHECK_THROWS_AS(classrbm::majority_baseline(Dataset(2, 2, {}), test), classrbm::data_error);
}

TEST_CASE("evaluate_once rejects mismatched splits") {
  const Dataset train(2, 2, {{BinaryInput({0, 0}), Label(1)}});
  const Dataset test(3, 2, {{BinaryInput({0, 0, 1}), Label(1)}});
  classrbm::TrainingConfig config;
  config.hidden_units = 2;
  config.iterations = 1;
  CHECK_THROWS_AS(classrbm::evaluate_once(train, test, config), classrbm::dimension_error);
}

TEST_CASE("grid validation and cell layout") {
  ExperimentGrid grid;
  CHECK(grid.num_cells() == 48);
  CHECK_NOTHROW(grid.validate());

  CHECK(grid.cell_id(0, 0, 0) == 0);
  CHECK(grid.cell_id(0, 0, 1) == 1);
  CHECK(grid.cell_id(0, 1, 0) == 6);
  CHECK(grid.cell_id(1, 0, 0) == 12);
  CHECK(grid.cell_id(3, 1, 5) == 47);

  // Every (cell, repeat) pair owns its own derived seed.
  std::set<std::uint64_t> seeds;
  for (std::size_t h = 0; h < 4; ++h) {
    for (std::size_t l = 0; l < 2; ++l) {
      for (std::size_t s = 0; s < 6; ++s) {
        for (std::size_t r = 0; r < 10; ++r) {
          seeds.insert(grid.cell_config(h, l, s, r).seed);
        }
      }
    }
  }
  CHECK(seeds.size() == 480);

  ExperimentGrid bad = grid;
  bad.hidden_units.clear();
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = grid;
  bad.repeats = 0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = grid;
  bad.train_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);

  bad = grid;
  bad.training.momentum = 1.5;
  CHECK_THROWS_AS(bad.validate(), classrbm::dimension_error);
}

TEST_CASE("a small experiment completes with coherent statistics") {
  Rng rng(900);
  const auto synth = classrbm::synth_generate(6, 2, 40, 0.6, rng);

  ExperimentGrid grid;
  grid.hidden_units = {3};
  grid.learning_rates = {0.1};
  grid.schemes = {DroppingScheme::none(), DroppingScheme::dropout(0.5)};
  grid.repeats = 3;
  grid.base_seed = 5;
  grid.training.iterations = 300;

  const auto report = classrbm::run_experiment(synth.data, grid);
  CHECK(report.train_size == 28);
  CHECK(report.test_size == 12);
  CHECK(report.majority_accuracy >= 0.0);
  REQUIRE(report.cells.size() == 2);
  for (const auto& cell : report.cells) {
    CHECK(cell.ok());
    REQUIRE(cell.accuracies.size() == 3);
    double sum = 0.0;
    for (double a : cell.accuracies) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      sum += a;
    }
    CHECK(cell.mean == Catch::Approx(sum / 3.0).margin(1e-12));
    double ss = 0.0;
    for (double a : cell.accuracies) ss += (a - cell.mean) * (a - cell.mean);
    CHECK(cell.stddev == Catch::Approx(std::sqrt(ss / 2.0)).margin(1e-12));
    CHECK(cell.wall_seconds >= 0.0);
  }
}

TEST_CASE("identical repeats produce zero spread") {
  Rng rng(910);
  const auto synth = classrbm::synth_generate(5, 2, 20, 0.5, rng);

  // Zero learning rate and zero init scale: every repeat scores the same
  // all-zero model, so the sample deviation must be exactly zero.
  ExperimentGrid grid;
  grid.hidden_units = {2};
  grid.learning_rates = {0.0};
  grid.schemes = {DroppingScheme::none()};
  grid.repeats = 4;
  grid.training.iterations = 10;
  grid.training.init_scale = 0.0;

  const auto report = classrbm::run_experiment(synth.data, grid);
  REQUIRE(report.cells.size() == 1);
  const auto& cell = report.cells[0];
  REQUIRE(cell.accuracies.size() == 4);
  for (double a : cell.accuracies) CHECK(a == cell.accuracies[0]);
  CHECK(cell.stddev == 0.0);
}

TEST_CASE("experiment report bodies are reproducible") {
  Rng rng(920);
  const auto synth = classrbm::synth_generate(5, 2, 30, 0.5, rng);

  ExperimentGrid grid;
  grid.hidden_units = {2, 3};
  grid.learning_rates = {0.1};
  grid.schemes = {DroppingScheme::droppart(0.5, 0.5)};
  grid.repeats = 2;
  grid.training.iterations = 100;

  const auto r1 = classrbm::run_experiment(synth.data, grid);
  const auto r2 = classrbm::run_experiment(synth.data, grid);
  CHECK(classrbm::experiment_results_json(r1) == classrbm::experiment_results_json(r2));
}

TEST_CASE("a diverging cell is recorded without sinking the grid") {
  Rng rng(930);
  const auto synth = classrbm::synth_generate(5, 2, 20, 0.5, rng);

  ExperimentGrid grid;
  grid.hidden_units = {2};
  grid.learning_rates = {0.1, 1e308};
  grid.schemes = {DroppingScheme::none()};
  grid.repeats = 2;
  grid.training.iterations = 60;

  const auto report = classrbm::run_experiment(synth.data, grid);
  REQUIRE(report.cells.size() == 2);
  CHECK(report.cells[0].ok());
  CHECK(report.cells[0].accuracies.size() == 2);
  CHECK_FALSE(report.cells[1].ok());
  CHECK(report.cells[1].error.find("repeat 1") != std::string::npos);
  CHECK(report.cells[1].accuracies.empty());
}
