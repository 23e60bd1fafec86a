// Command-line front end: train models, predict, report relevant inputs,
// run comparison grids, generate synthetic data, inspect model files, and
// emit enumeration fixtures.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "classrbm/classrbm.hpp"

namespace {

using namespace classrbm;

void report_error(int exit_code, const std::string& kind, const std::string& message,
                  const std::string& hint) {
  json line;
  line["error"] = json{{"exit", exit_code}, {"kind", kind}, {"message", message}};
  std::cerr << line.dump() << "\n";
  std::cerr << "classrbm: " << message << "\n";
  if (!hint.empty()) {
    std::cerr << "classrbm: " << hint << "\n";
  }
}

std::string default_label_column(const std::optional<CategoricalSchema>& schema,
                                 const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (schema && schema->label()) return schema->label()->name;
  return "label";
}

Dataset load_labeled(const std::string& data_path, const std::string& schema_path,
                     const std::string& label_column) {
  if (!schema_path.empty()) {
    CategoricalSchema schema = load_schema(schema_path);
    return load_csv(data_path, schema,
                    default_label_column(schema, label_column));
  }
  return load_binary_csv(data_path, default_label_column(std::nullopt, label_column));
}

std::vector<std::string> generic_input_names(std::size_t width) {
  std::vector<std::string> names;
  names.reserve(width);
  for (std::size_t i = 1; i <= width; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

/// Inputs for prediction: the label column is optional and ignored when
/// present, everything else must conform to the schema (or be 0/1 columns).
std::vector<BinaryInput> load_inputs(const std::string& data_path,
                                     const std::string& schema_path,
                                     const std::string& label_column) {
  const auto rows = csv::read_file(data_path);
  const std::vector<std::string>& header = rows[0];

  std::optional<CategoricalSchema> schema;
  if (!schema_path.empty()) schema = load_schema(schema_path);
  const std::string label_col_name = default_label_column(schema, label_column);

  std::vector<BinaryInput> inputs;
  inputs.reserve(rows.size() - 1);
  if (schema) {
    std::vector<std::size_t> feature_cols;
    for (const CategoryFeature& f : schema->features()) {
      const auto it = std::find(header.begin(), header.end(), f.name);
      if (it == header.end()) {
        throw data_error("column '" + f.name + "' missing from header of " + data_path);
      }
      feature_cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != header.size()) {
        throw data_error("row " + std::to_string(r + 1) + ": wrong field count");
      }
      std::vector<std::string> record;
      record.reserve(feature_cols.size());
      for (std::size_t col : feature_cols) record.push_back(rows[r][col]);
      try {
        inputs.push_back(binarize(record, *schema));
      } catch (const data_error& e) {
        throw data_error("row " + std::to_string(r + 1) + ": " + e.what());
      }
    }
    return inputs;
  }

  std::vector<std::size_t> bit_cols;
  for (std::size_t col = 0; col < header.size(); ++col) {
    if (header[col] != label_col_name) bit_cols.push_back(col);
  }
  if (bit_cols.empty()) {
    throw data_error("no input columns in " + data_path);
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw data_error("row " + std::to_string(r + 1) + ": wrong field count");
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(bit_cols.size());
    for (std::size_t col : bit_cols) {
      const std::string& v = rows[r][col];
      if (v != "0" && v != "1") {
        throw data_error("row " + std::to_string(r + 1) + ": column '" + header[col] +
                         "' is not 0/1 (use --schema for categorical data)");
      }
      bits.push_back(v == "1" ? 1 : 0);
    }
    inputs.push_back(BinaryInput(std::move(bits)));
  }
  return inputs;
}

struct BlockStats {
  double min = 0.0, max = 0.0, mean = 0.0, stddev = 0.0;
};

BlockStats block_stats(const Vector& v) {
  BlockStats s;
  if (v.empty()) return s;
  s.min = v[0];
  s.max = v[0];
  double sum = 0.0;
  for (double e : v) {
    s.min = std::min(s.min, e);
    s.max = std::max(s.max, e);
    sum += e;
  }
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double e : v) ss += (e - s.mean) * (e - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

int run_train(const std::string& data_path, const std::string& schema_path,
              const std::string& label_column, const std::string& config_path,
              const std::string& out_path, std::string log_path) {
  const Dataset dataset = load_labeled(data_path, schema_path, label_column);
  const TrainingConfig config = load_training_config(config_path);
  const TrainingResult result = train(dataset, config);
  save_model(result.params, out_path);
  if (log_path.empty()) log_path = out_path + ".log.csv";
  detail::write_text_file(log_path, training_log_csv(result.log));

  const TrainingCheckpoint& last = result.log.checkpoints.back();
  std::cout << "trained on " << dataset.size() << " examples (width "
            << dataset.num_visible() << ", " << dataset.num_classes() << " classes), "
            << config.iterations << " iterations, scheme " << config.scheme.describe()
            << "\n";
  std::cout << "final train accuracy " << last.train_accuracy << ", reconstruction error "
            << last.reconstruction_error << "\n";
  std::cout << "model written to " << out_path << ", log to " << log_path << "\n";
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& schema_path, const std::string& label_column,
                const std::string& out_path) {
  const ModelParameters model = load_model(model_path);
  const std::vector<BinaryInput> inputs = load_inputs(data_path, schema_path, label_column);

  std::optional<CategoricalSchema> schema;
  if (!schema_path.empty()) schema = load_schema(schema_path);
  const bool named_labels = schema && schema->label() &&
                            schema->label()->categories.size() == model.num_classes();

  std::string out = "row,predicted_class";
  if (named_labels) out += ",predicted_category";
  for (std::size_t k = 1; k <= model.num_classes(); ++k) {
    out += ",prob_" + std::to_string(k);
  }
  out += '\n';
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    const LabelDistribution dist = predict_proba(model, inputs[r]);
    const Label label = dist.argmax();
    out += std::to_string(r + 1);
    out += ',' + std::to_string(label.index());
    if (named_labels) {
      out += ',' + csv::quote_field(schema->label()->categories[label.index() - 1]);
    }
    for (std::size_t k = 0; k < dist.size(); ++k) {
      out += ',' + detail::format_double(dist[k]);
    }
    out += '\n';
  }
  if (out_path.empty()) {
    std::cout << out;
  } else {
    detail::write_text_file(out_path, out);
    std::cout << "predictions for " << inputs.size() << " rows written to " << out_path
              << "\n";
  }
  return 0;
}

int run_relevance(const std::string& model_path, const std::string& schema_path,
                  std::size_t class_filter, double threshold, const std::string& out_path,
                  const std::string& json_path, const std::string& plot_path) {
  const ModelParameters model = load_model(model_path);
  std::vector<std::string> names;
  if (!schema_path.empty()) {
    names = load_schema(schema_path).binary_input_names();
  } else {
    names = generic_input_names(model.num_visible());
  }
  const RelevanceReport report = relevance_report(model, names, threshold);
  if (class_filter > model.num_classes()) {
    throw data_error("--class " + std::to_string(class_filter) + " out of range (model has " +
                     std::to_string(model.num_classes()) + " classes)");
  }

  std::string stdout_csv = "class,input,input_name,probability,selected\n";
  for (std::size_t k = 0; k < report.per_class.size(); ++k) {
    if (class_filter != 0 && k + 1 != class_filter) continue;
    for (std::size_t i = 0; i < report.per_class[k].size(); ++i) {
      const auto& sel = report.selected[k];
      const bool is_selected = std::find(sel.begin(), sel.end(), i + 1) != sel.end();
      stdout_csv += std::to_string(k + 1) + ',' + std::to_string(i + 1) + ',' +
                    csv::quote_field(report.input_names[i]) + ',' +
                    detail::format_double(report.per_class[k][i]) + ',' +
                    (is_selected ? "1" : "0") + '\n';
    }
  }

  if (out_path.empty() && json_path.empty() && plot_path.empty()) {
    std::cout << stdout_csv;
    return 0;
  }
  if (!out_path.empty()) detail::write_text_file(out_path, relevance_report_csv(report));
  if (!json_path.empty()) save_json_file(json_path, relevance_report_to_json(report));
  if (!plot_path.empty()) detail::write_text_file(plot_path, relevance_plot_csv(report));
  std::cout << "relevance report written (threshold " << threshold << ")\n";
  return 0;
}

int run_experiment(const std::string& data_path, const std::string& schema_path,
                   const std::string& label_column, const std::string& grid_path,
                   const std::string& out_path, const std::string& csv_path,
                   const std::string& plot_path) {
  const Dataset dataset = load_labeled(data_path, schema_path, label_column);
  const ExperimentGrid grid = load_experiment_grid(grid_path);
  const ExperimentReport report = classrbm::run_experiment(dataset, grid);

  save_json_file(out_path, experiment_results_json(report));
  save_json_file(out_path + ".meta.json", experiment_metadata_json(report));
  if (!csv_path.empty()) detail::write_text_file(csv_path, experiment_table_csv(report));
  if (!plot_path.empty()) detail::write_text_file(plot_path, experiment_plot_csv(report));

  std::size_t failed = 0;
  for (const CellResult& cell : report.cells) {
    if (!cell.ok()) ++failed;
  }
  std::cout << report.cells.size() << " cells x " << report.repeats << " repeats, train/test "
            << report.train_size << "/" << report.test_size << ", majority baseline "
            << report.majority_accuracy << "\n";
  if (failed > 0) std::cout << failed << " cell(s) failed; see the report\n";
  std::cout << "results written to " << out_path << " (timing in " << out_path
            << ".meta.json)\n";
  return 0;
}

int run_synth(const std::string& spec_path, const std::string& out_path,
              std::string record_path) {
  const SynthSpec spec = load_synth_spec(spec_path);
  const SynthResult result = synth_generate(spec);
  export_csv(result.data, out_path);
  if (record_path.empty()) record_path = out_path + ".record.json";
  json record = generation_record_to_json(result.record);
  record["spec"] = synth_spec_to_json(spec);
  save_json_file(record_path, record);
  std::cout << result.data.size() << " examples (width " << result.data.num_visible() << ", "
            << result.data.num_classes() << " classes) written to " << out_path << "\n";
  std::cout << "generating rule accuracy on this draw: "
            << bayes_accuracy(result.record, result.data) << "\n";
  std::cout << "generation record written to " << record_path << "\n";
  return 0;
}

int run_inspect(const std::string& model_path) {
  const ModelParameters model = load_model(model_path);
  std::cout << "model: " << model.num_visible() << " visible x " << model.num_hidden()
            << " hidden x " << model.num_classes() << " classes\n";
  const auto show = [](const char* name, const Vector& v) {
    const BlockStats s = block_stats(v);
    std::cout << name << ": n=" << v.size() << " min=" << s.min << " max=" << s.max
              << " mean=" << s.mean << " std=" << s.stddev << "\n";
  };
  show("visible_bias", model.visible_bias());
  show("hidden_bias", model.hidden_bias());
  show("label_bias", model.label_bias());
  show("visible_hidden_weights", model.visible_hidden_weights().data());
  show("hidden_label_weights", model.hidden_label_weights().data());
  return 0;
}

int run_fixtures(const std::string& out_path, std::size_t count, std::uint64_t seed) {
  const std::vector<OracleFixture> fixtures = generate_oracle_fixtures(count, seed);
  save_oracle_fixtures(fixtures, out_path);
  std::cout << fixtures.size() << " enumeration fixtures written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"classification RBM: exact prediction, relevant inputs, masked CD training"};
  app.require_subcommand(1);

  std::string data_path, schema_path, label_column, config_path, model_path, grid_path;
  std::string out_path, log_path, json_path, csv_path, plot_path, spec_path, record_path;
  std::size_t class_filter = 0;
  double threshold = 0.5;
  std::size_t fixture_count = 10;
  std::uint64_t fixture_seed = 1;

  CLI::App* cmd_train = app.add_subcommand("train", "train a model on a labeled CSV");
  cmd_train->add_option("--data", data_path, "labeled CSV")->required();
  cmd_train->add_option("--schema", schema_path, "categorical schema JSON (omit for 0/1 CSV)");
  cmd_train->add_option("--label-column", label_column,
                        "label column name (default: schema label, else 'label')");
  cmd_train->add_option("--config", config_path, "training configuration JSON")->required();
  cmd_train->add_option("--out", out_path, "output model JSON")->required();
  cmd_train->add_option("--log", log_path, "training log CSV (default: <out>.log.csv)");

  CLI::App* cmd_predict = app.add_subcommand("predict", "class distribution per input row");
  cmd_predict->add_option("--model", model_path, "model JSON")->required();
  cmd_predict->add_option("--data", data_path, "input CSV (label column optional)")
      ->required();
  cmd_predict->add_option("--schema", schema_path, "categorical schema JSON");
  cmd_predict->add_option("--label-column", label_column, "label column to ignore");
  cmd_predict->add_option("--out", out_path, "output CSV (default: stdout)");

  CLI::App* cmd_relevance =
      app.add_subcommand("relevance", "per-input conditional probabilities per class");
  cmd_relevance->add_option("--model", model_path, "model JSON")->required();
  cmd_relevance->add_option("--schema", schema_path, "schema JSON for input names");
  cmd_relevance->add_option("--class", class_filter, "restrict output to one class (1-based)");
  cmd_relevance->add_option("--threshold", threshold, "selection threshold, default 0.5");
  cmd_relevance->add_option("--out", out_path, "CSV output file (default: stdout)");
  cmd_relevance->add_option("--json", json_path, "JSON output file");
  cmd_relevance->add_option("--plot-data", plot_path, "(series,index,value) CSV for charts");

  CLI::App* cmd_experiment = app.add_subcommand("experiment", "run the comparison grid");
  cmd_experiment->add_option("--data", data_path, "labeled CSV")->required();
  cmd_experiment->add_option("--schema", schema_path, "categorical schema JSON");
  cmd_experiment->add_option("--label-column", label_column, "label column name");
  cmd_experiment->add_option("--grid", grid_path, "grid configuration JSON")->required();
  cmd_experiment->add_option("--out", out_path, "report JSON (timing goes to <out>.meta.json)")
      ->required();
  cmd_experiment->add_option("--csv", csv_path, "summary table CSV");
  cmd_experiment->add_option("--plot-data", plot_path, "(series,index,value) CSV for charts");

  CLI::App* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  cmd_synth->add_option("--spec", spec_path, "generator spec JSON")->required();
  cmd_synth->add_option("--out", out_path, "output CSV")->required();
  cmd_synth->add_option("--record", record_path,
                        "generation record JSON (default: <out>.record.json)");

  CLI::App* cmd_inspect = app.add_subcommand("inspect", "print model dimensions and stats");
  cmd_inspect->add_option("--model", model_path, "model JSON")->required();

  CLI::App* cmd_fixtures =
      app.add_subcommand("fixtures", "emit enumeration reference fixtures for testing");
  cmd_fixtures->add_option("--out", out_path, "fixtures JSON")->required();
  cmd_fixtures->add_option("--count", fixture_count, "number of fixtures, default 10");
  cmd_fixtures->add_option("--seed", fixture_seed, "generator seed, default 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(1, "usage", e.what(), "run with --help for usage");
    return 1;
  }

  try {
    if (cmd_train->parsed()) {
      return run_train(data_path, schema_path, label_column, config_path, out_path, log_path);
    }
    if (cmd_predict->parsed()) {
      return run_predict(model_path, data_path, schema_path, label_column, out_path);
    }
    if (cmd_relevance->parsed()) {
      return run_relevance(model_path, schema_path, class_filter, threshold, out_path,
                           json_path, plot_path);
    }
    if (cmd_experiment->parsed()) {
      return run_experiment(data_path, schema_path, label_column, grid_path, out_path,
                            csv_path, plot_path);
    }
    if (cmd_synth->parsed()) {
      return run_synth(spec_path, out_path, record_path);
    }
    if (cmd_inspect->parsed()) {
      return run_inspect(model_path);
    }
    if (cmd_fixtures->parsed()) {
      return run_fixtures(out_path, fixture_count, fixture_seed);
    }
  } catch (const numerical_error& e) {
    report_error(3, "numerical", e.what(),
                 "the computation produced a non-finite value; try a smaller learning rate");
    return 3;
  } catch (const classrbm::error& e) {
    report_error(2, "data", e.what(), "check the input files and their formats");
    return 2;
  } catch (const std::exception& e) {
    report_error(2, "internal", e.what(), "");
    return 2;
  }
  return 0;
}
