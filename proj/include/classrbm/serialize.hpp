#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classrbm/data.hpp"
#include "classrbm/dropping.hpp"
#include "classrbm/error.hpp"
#include "classrbm/eval.hpp"
#include "classrbm/model.hpp"
#include "classrbm/relevance.hpp"
#include "classrbm/training.hpp"

namespace classrbm {

using nlohmann::json;

namespace detail {

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open file: " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw data_error("cannot parse " + path + ": " + e.what());
  }
}

template <typename T>
T json_field(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) {
    throw data_error(context + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw data_error(context + ": field '" + key + "': " + e.what());
  }
}

template <typename T>
T json_field_or(const json& j, const char* key, const std::string& context, T fallback) {
  if (!j.contains(key)) return fallback;
  return json_field<T>(j, key, context);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("cannot write file: " + path);
  }
  out << text;
  if (!out) {
    throw data_error("write failed: " + path);
  }
}

/// Shortest decimal form that parses back to the same double; what the JSON
/// serializer emits, reused for CSV cells so all formats agree byte-for-byte.
inline std::string format_double(double x) { return json(x).dump(); }

}  // namespace detail

inline void save_json_file(const std::string& path, const json& j) {
  detail::write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

inline json model_to_json(const ModelParameters& p) {
  json j;
  j["format"] = "classrbm-model";
  j["format_version"] = 1;
  j["num_visible"] = p.num_visible();
  j["num_hidden"] = p.num_hidden();
  j["num_classes"] = p.num_classes();
  j["visible_bias"] = p.visible_bias();
  j["hidden_bias"] = p.hidden_bias();
  j["label_bias"] = p.label_bias();
  j["visible_hidden_weights"] = p.visible_hidden_weights().data();  // row-major
  j["hidden_label_weights"] = p.hidden_label_weights().data();      // row-major
  return j;
}

inline ModelParameters model_from_json(const json& j, const std::string& context) {
  const auto D = detail::json_field<std::size_t>(j, "num_visible", context);
  const auto M = detail::json_field<std::size_t>(j, "num_hidden", context);
  const auto K = detail::json_field<std::size_t>(j, "num_classes", context);
  auto b = detail::json_field<Vector>(j, "visible_bias", context);
  auto c = detail::json_field<Vector>(j, "hidden_bias", context);
  auto d = detail::json_field<Vector>(j, "label_bias", context);
  auto w1_flat = detail::json_field<Vector>(j, "visible_hidden_weights", context);
  auto w2_flat = detail::json_field<Vector>(j, "hidden_label_weights", context);
  if (b.size() != D || c.size() != M || d.size() != K || w1_flat.size() != D * M ||
      w2_flat.size() != M * K) {
    throw data_error(context + ": array lengths disagree with the declared dimensions");
  }
  Matrix w1(D, M);
  w1.data() = std::move(w1_flat);
  Matrix w2(M, K);
  w2.data() = std::move(w2_flat);
  try {
    return ModelParameters(std::move(b), std::move(c), std::move(d), std::move(w1),
                           std::move(w2));
  } catch (const error& e) {
    throw data_error(context + ": " + e.what());
  }
}

inline void save_model(const ModelParameters& p, const std::string& path) {
  save_json_file(path, model_to_json(p));
}

inline ModelParameters load_model(const std::string& path) {
  return model_from_json(detail::parse_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Dropping scheme / training configuration / experiment grid / synth spec
// ---------------------------------------------------------------------------

inline json scheme_to_json(const DroppingScheme& s) {
  json j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case DroppingKind::none:
      break;
    case DroppingKind::dropout:
    case DroppingKind::dropconnect:
      j["p"] = s.p;
      break;
    case DroppingKind::droppart:
      j["a"] = s.a;
      j["b"] = s.b;
      break;
  }
  return j;
}

inline DroppingScheme scheme_from_json(const json& j, const std::string& context) {
  const auto kind = detail::json_field<std::string>(j, "kind", context);
  try {
    if (kind == "none") return DroppingScheme::none();
    if (kind == "dropout") {
      return DroppingScheme::dropout(detail::json_field<double>(j, "p", context));
    }
    if (kind == "dropconnect") {
      return DroppingScheme::dropconnect(detail::json_field<double>(j, "p", context));
    }
    if (kind == "droppart") {
      return DroppingScheme::droppart(detail::json_field<double>(j, "a", context),
                                      detail::json_field<double>(j, "b", context));
    }
  } catch (const dimension_error& e) {
    throw data_error(context + ": " + e.what());
  }
  throw data_error(context + ": unknown dropping kind '" + kind + "'");
}

inline json training_config_to_json(const TrainingConfig& c) {
  json j;
  j["hidden_units"] = c.hidden_units;
  j["learning_rate"] = c.learning_rate;
  j["momentum"] = c.momentum;
  j["iterations"] = c.iterations;
  j["cd_steps"] = c.cd_steps;
  j["scheme"] = scheme_to_json(c.scheme);
  j["seed"] = c.seed;
  j["init_scale"] = c.init_scale;
  j["sweep_examples"] = c.sweep_examples;
  j["log_every"] = c.log_every;
  j["track_exact_loglik"] = c.track_exact_loglik;
  return j;
}

inline TrainingConfig training_config_from_json(const json& j, const std::string& context) {
  TrainingConfig c;
  c.hidden_units = detail::json_field_or(j, "hidden_units", context, c.hidden_units);
  c.learning_rate = detail::json_field_or(j, "learning_rate", context, c.learning_rate);
  c.momentum = detail::json_field_or(j, "momentum", context, c.momentum);
  c.iterations = detail::json_field_or(j, "iterations", context, c.iterations);
  c.cd_steps = detail::json_field_or(j, "cd_steps", context, c.cd_steps);
  if (j.contains("scheme")) c.scheme = scheme_from_json(j.at("scheme"), context);
  c.seed = detail::json_field_or(j, "seed", context, c.seed);
  c.init_scale = detail::json_field_or(j, "init_scale", context, c.init_scale);
  c.sweep_examples = detail::json_field_or(j, "sweep_examples", context, c.sweep_examples);
  c.log_every = detail::json_field_or(j, "log_every", context, c.log_every);
  c.track_exact_loglik =
      detail::json_field_or(j, "track_exact_loglik", context, c.track_exact_loglik);
  try {
    c.validate();
  } catch (const error& e) {
    throw data_error(context + ": " + e.what());
  }
  return c;
}

inline TrainingConfig load_training_config(const std::string& path) {
  return training_config_from_json(detail::parse_json_file(path), path);
}

inline json grid_to_json(const ExperimentGrid& g) {
  json j;
  j["hidden_units"] = g.hidden_units;
  j["learning_rates"] = g.learning_rates;
  json schemes = json::array();
  for (const DroppingScheme& s : g.schemes) schemes.push_back(scheme_to_json(s));
  j["schemes"] = std::move(schemes);
  j["repeats"] = g.repeats;
  j["base_seed"] = g.base_seed;
  j["train_fraction"] = g.train_fraction;
  json t = training_config_to_json(g.training);
  // per-cell fields live on the axes, not in the shared block
  t.erase("hidden_units");
  t.erase("learning_rate");
  t.erase("scheme");
  t.erase("seed");
  j["training"] = std::move(t);
  return j;
}

inline ExperimentGrid grid_from_json(const json& j, const std::string& context) {
  ExperimentGrid g;
  g.hidden_units =
      detail::json_field_or(j, "hidden_units", context, g.hidden_units);
  g.learning_rates =
      detail::json_field_or(j, "learning_rates", context, g.learning_rates);
  if (j.contains("schemes")) {
    if (!j.at("schemes").is_array()) {
      throw data_error(context + ": field 'schemes' must be an array");
    }
    g.schemes.clear();
    for (const json& s : j.at("schemes")) {
      g.schemes.push_back(scheme_from_json(s, context));
    }
  }
  g.repeats = detail::json_field_or(j, "repeats", context, g.repeats);
  g.base_seed = detail::json_field_or(j, "base_seed", context, g.base_seed);
  g.train_fraction = detail::json_field_or(j, "train_fraction", context, g.train_fraction);
  if (j.contains("training")) {
    json t = j.at("training");
    // the shared block never carries per-cell fields; tolerate and ignore them
    t["hidden_units"] = 1;
    t["learning_rate"] = 0.01;
    t.erase("scheme");
    TrainingConfig shared = training_config_from_json(t, context);
    shared.hidden_units = g.training.hidden_units;
    shared.learning_rate = g.training.learning_rate;
    shared.scheme = g.training.scheme;
    g.training = shared;
  }
  try {
    g.validate();
  } catch (const error& e) {
    throw data_error(context + ": " + e.what());
  }
  return g;
}

inline ExperimentGrid load_experiment_grid(const std::string& path) {
  return grid_from_json(detail::parse_json_file(path), path);
}

inline json synth_spec_to_json(const SynthSpec& s) {
  json j;
  j["num_visible"] = s.num_visible;
  j["num_classes"] = s.num_classes;
  j["num_examples"] = s.num_examples;
  j["signal_strength"] = s.signal_strength;
  j["seed"] = s.seed;
  return j;
}

inline SynthSpec synth_spec_from_json(const json& j, const std::string& context) {
  SynthSpec s;
  s.num_visible = detail::json_field_or(j, "num_visible", context, s.num_visible);
  s.num_classes = detail::json_field_or(j, "num_classes", context, s.num_classes);
  s.num_examples = detail::json_field_or(j, "num_examples", context, s.num_examples);
  s.signal_strength =
      detail::json_field_or(j, "signal_strength", context, s.signal_strength);
  s.seed = detail::json_field_or(j, "seed", context, s.seed);
  return s;
}

inline SynthSpec load_synth_spec(const std::string& path) {
  return synth_spec_from_json(detail::parse_json_file(path), path);
}

inline json generation_record_to_json(const GenerationRecord& r) {
  json j;
  j["num_visible"] = r.num_visible;
  j["num_classes"] = r.num_classes;
  j["signal_strength"] = r.signal_strength;
  j["noise"] = r.noise;
  j["templates"] = r.templates;
  return j;
}

inline GenerationRecord generation_record_from_json(const json& j, const std::string& context) {
  GenerationRecord r;
  r.num_visible = detail::json_field<std::size_t>(j, "num_visible", context);
  r.num_classes = detail::json_field<std::size_t>(j, "num_classes", context);
  r.signal_strength = detail::json_field<double>(j, "signal_strength", context);
  r.noise = detail::json_field<double>(j, "noise", context);
  r.templates =
      detail::json_field<std::vector<std::vector<std::uint8_t>>>(j, "templates", context);
  if (r.templates.size() != r.num_classes) {
    throw data_error(context + ": template count disagrees with num_classes");
  }
  for (const auto& tpl : r.templates) {
    if (tpl.size() != r.num_visible) {
      throw data_error(context + ": template width disagrees with num_visible");
    }
    for (std::uint8_t bit : tpl) {
      if (bit > 1) throw data_error(context + ": template entries must be 0 or 1");
    }
  }
  return r;
}

inline GenerationRecord load_generation_record(const std::string& path) {
  return generation_record_from_json(detail::parse_json_file(path), path);
}

// ---------------------------------------------------------------------------
// Categorical schema
// ---------------------------------------------------------------------------

inline json schema_to_json(const CategoricalSchema& schema) {
  json features = json::array();
  for (const CategoryFeature& f : schema.features()) {
    features.push_back(json{{"name", f.name}, {"categories", f.categories}});
  }
  json j;
  j["name"] = schema.name();
  j["features"] = std::move(features);
  if (schema.label()) {
    j["label"] = json{{"name", schema.label()->name},
                      {"categories", schema.label()->categories}};
  }
  return j;
}

inline CategoricalSchema schema_from_json(const json& j, const std::string& context) {
  const auto name = detail::json_field_or<std::string>(j, "name", context, "schema");
  if (!j.contains("features") || !j.at("features").is_array()) {
    throw data_error(context + ": missing 'features' array");
  }
  std::vector<CategoryFeature> features;
  std::size_t index = 0;
  for (const json& f : j.at("features")) {
    const std::string fcontext = context + ": feature " + std::to_string(index + 1);
    features.push_back(CategoryFeature{
        detail::json_field<std::string>(f, "name", fcontext),
        detail::json_field<std::vector<std::string>>(f, "categories", fcontext)});
    ++index;
  }
  std::optional<LabelSpec> label;
  if (j.contains("label")) {
    const std::string lcontext = context + ": label";
    label = LabelSpec{
        detail::json_field<std::string>(j.at("label"), "name", lcontext),
        detail::json_field<std::vector<std::string>>(j.at("label"), "categories", lcontext)};
  }
  try {
    return CategoricalSchema(name, std::move(features), std::move(label));
  } catch (const error& e) {
    throw data_error(context + ": " + e.what());
  }
}

inline CategoricalSchema load_schema(const std::string& path) {
  return schema_from_json(detail::parse_json_file(path), path);
}

inline void save_schema(const CategoricalSchema& schema, const std::string& path) {
  save_json_file(path, schema_to_json(schema));
}

// ---------------------------------------------------------------------------
// Training log
// ---------------------------------------------------------------------------

inline std::string training_log_csv(const TrainingLog& log) {
  std::string out = "iteration,reconstruction_error,train_accuracy,mean_log_likelihood\n";
  for (const TrainingCheckpoint& cp : log.checkpoints) {
    out += std::to_string(cp.iteration);
    out += ',' + detail::format_double(cp.reconstruction_error);
    out += ',' + detail::format_double(cp.train_accuracy);
    out += ',';
    if (cp.mean_log_likelihood) out += detail::format_double(*cp.mean_log_likelihood);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiment report
// ---------------------------------------------------------------------------

/// Deterministic report body: everything except timing. Two runs with the
/// same inputs and seeds produce byte-identical output here.
inline json experiment_results_json(const ExperimentReport& report) {
  json cells = json::array();
  for (const CellResult& cell : report.cells) {
    json c;
    c["hidden_units"] = cell.hidden_units;
    c["learning_rate"] = cell.learning_rate;
    c["scheme"] = scheme_to_json(cell.scheme);
    c["accuracies"] = cell.accuracies;
    c["mean"] = cell.mean;
    c["stddev"] = cell.stddev;
    c["error"] = cell.error;
    cells.push_back(std::move(c));
  }
  json j;
  j["format"] = "classrbm-experiment-report";
  j["format_version"] = 1;
  j["base_seed"] = report.base_seed;
  j["train_fraction"] = report.train_fraction;
  j["repeats"] = report.repeats;
  j["train_size"] = report.train_size;
  j["test_size"] = report.test_size;
  j["majority_accuracy"] = report.majority_accuracy;
  j["cells"] = std::move(cells);
  return j;
}

/// Timing and provenance, kept apart so the result body stays reproducible.
inline json experiment_metadata_json(const ExperimentReport& report) {
  char stamp[32] = {0};
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);

  json cell_walls = json::array();
  for (const CellResult& cell : report.cells) cell_walls.push_back(cell.wall_seconds);
  json j;
  j["generated_at"] = stamp;
  j["total_wall_seconds"] = report.total_wall_seconds;
  j["cell_wall_seconds"] = std::move(cell_walls);
  j["stddev_convention"] = "sample, n-1 denominator";
  return j;
}

inline std::string experiment_table_csv(const ExperimentReport& report) {
  std::string out =
      "hidden_units,learning_rate,scheme,mean_accuracy,stddev,majority_baseline,status\n";
  for (const CellResult& cell : report.cells) {
    out += std::to_string(cell.hidden_units);
    out += ',' + detail::format_double(cell.learning_rate);
    out += ',' + csv::quote_field(cell.scheme.describe());
    if (cell.ok()) {
      out += ',' + detail::format_double(cell.mean);
      out += ',' + detail::format_double(cell.stddev);
    } else {
      out += ",,";
    }
    out += ',' + detail::format_double(report.majority_accuracy);
    out += ',' + (cell.ok() ? std::string("ok") : csv::quote_field(cell.error));
    out += '\n';
  }
  return out;
}

/// (series, index, value) rows: per-run accuracies per cell plus a "mean"
/// series over cell ids, ready for external chart tools.
inline std::string experiment_plot_csv(const ExperimentReport& report) {
  std::string out = "series,index,value\n";
  for (std::size_t cell_id = 0; cell_id < report.cells.size(); ++cell_id) {
    const CellResult& cell = report.cells[cell_id];
    const std::string series = "cell" + std::to_string(cell_id) + " h" +
                               std::to_string(cell.hidden_units) + " lr" +
                               detail::format_double(cell.learning_rate) + " " +
                               cell.scheme.describe();
    for (std::size_t r = 0; r < cell.accuracies.size(); ++r) {
      out += csv::quote_field(series) + ',' + std::to_string(r + 1) + ',' +
             detail::format_double(cell.accuracies[r]) + '\n';
    }
    if (cell.ok()) {
      out += "mean," + std::to_string(cell_id) + ',' + detail::format_double(cell.mean) + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relevance report
// ---------------------------------------------------------------------------

inline json relevance_report_to_json(const RelevanceReport& report) {
  json classes = json::array();
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    json c;
    c["class"] = k + 1;
    c["probabilities"] = report.per_class[k];
    c["selected"] = report.selected[k];
    classes.push_back(std::move(c));
  }
  json j;
  j["format"] = "classrbm-relevance-report";
  j["format_version"] = 1;
  j["threshold"] = report.threshold;
  j["input_names"] = report.input_names;
  j["classes"] = std::move(classes);
  return j;
}

inline std::string relevance_report_csv(const RelevanceReport& report) {
  std::string out = "class,input,input_name,probability,selected\n";
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    const auto& selected = report.selected[k];
    for (std::size_t i = 0; i < report.per_class[k].size(); ++i) {
      const bool is_selected =
          std::find(selected.begin(), selected.end(), i + 1) != selected.end();
      out += std::to_string(k + 1);
      out += ',' + std::to_string(i + 1);
      out += ',' + csv::quote_field(report.input_names[i]);
      out += ',' + detail::format_double(report.per_class[k][i]);
      out += ',' + std::string(is_selected ? "1" : "0");
      out += '\n';
    }
  }
  return out;
}

/// (series, index, value) rows, one series per class.
inline std::string relevance_plot_csv(const RelevanceReport& report) {
  std::string out = "series,index,value\n";
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    for (std::size_t i = 0; i < report.per_class[k].size(); ++i) {
      out += "class" + std::to_string(k + 1) + ',' + std::to_string(i + 1) + ',' +
             detail::format_double(report.per_class[k][i]) + '\n';
    }
  }
  return out;
}

}  // namespace classrbm
