#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "classrbm/error.hpp"
#include "classrbm/model.hpp"
#include "classrbm/rng.hpp"

namespace classrbm {

struct CategoryFeature {
  std::string name;
  std::vector<std::string> categories;
};

struct LabelSpec {
  std::string name;
  std::vector<std::string> categories;  // ordered; position defines the 1..K mapping
};

/// Ordered categorical feature list plus the declared label categories.
/// Binarization is one-hot per feature, concatenated in feature order, so the
/// bit layout is fixed by the schema alone.
class CategoricalSchema {
 public:
  CategoricalSchema(std::string name, std::vector<CategoryFeature> features,
                    std::optional<LabelSpec> label)
      : name_(std::move(name)), features_(std::move(features)), label_(std::move(label)) {
    if (features_.empty()) {
      throw data_error("schema declares no features");
    }
    offsets_.reserve(features_.size());
    std::size_t offset = 0;
    std::unordered_map<std::string, bool> feature_names;
    for (const CategoryFeature& f : features_) {
      if (f.name.empty()) throw data_error("schema feature with empty name");
      if (!feature_names.emplace(f.name, true).second) {
        throw data_error("duplicate feature name: " + f.name);
      }
      if (f.categories.empty()) {
        throw data_error("feature '" + f.name + "' declares no categories");
      }
      std::unordered_map<std::string, bool> seen;
      for (const std::string& c : f.categories) {
        if (!seen.emplace(c, true).second) {
          throw data_error("duplicate category '" + c + "' in feature '" + f.name + "'");
        }
      }
      offsets_.push_back(offset);
      offset += f.categories.size();
    }
    width_ = offset;
    if (label_) {
      if (label_->categories.size() < 2) {
        throw data_error("label must declare at least two categories");
      }
      std::unordered_map<std::string, bool> seen;
      for (const std::string& c : label_->categories) {
        if (!seen.emplace(c, true).second) {
          throw data_error("duplicate label category '" + c + "'");
        }
      }
    }
  }

  const std::string& name() const { return name_; }
  const std::vector<CategoryFeature>& features() const { return features_; }
  std::size_t feature_count() const { return features_.size(); }
  std::size_t width() const { return width_; }
  std::size_t offset(std::size_t feature_index) const { return offsets_[feature_index]; }
  const std::optional<LabelSpec>& label() const { return label_; }

  std::size_t num_classes() const {
    if (!label_) throw data_error("schema '" + name_ + "' declares no label");
    return label_->categories.size();
  }

  /// "<feature>: <category>" for every bit position, in layout order.
  std::vector<std::string> binary_input_names() const {
    std::vector<std::string> names;
    names.reserve(width_);
    for (const CategoryFeature& f : features_) {
      for (const std::string& c : f.categories) {
        names.push_back(f.name + ": " + c);
      }
    }
    return names;
  }

 private:
  std::string name_;
  std::vector<CategoryFeature> features_;
  std::optional<LabelSpec> label_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 0;
};

/// One-hot concatenation of one category choice per feature, in schema order.
inline BinaryInput binarize(const std::vector<std::string>& record,
                            const CategoricalSchema& schema) {
  if (record.size() != schema.feature_count()) {
    throw data_error("record has " + std::to_string(record.size()) + " values, schema expects " +
                     std::to_string(schema.feature_count()));
  }
  std::vector<std::uint8_t> bits(schema.width(), 0);
  for (std::size_t f = 0; f < record.size(); ++f) {
    const CategoryFeature& feature = schema.features()[f];
    const auto it = std::find(feature.categories.begin(), feature.categories.end(), record[f]);
    if (it == feature.categories.end()) {
      throw data_error("unknown category '" + record[f] + "' for feature '" + feature.name + "'");
    }
    bits[schema.offset(f) + static_cast<std::size_t>(it - feature.categories.begin())] = 1;
  }
  return BinaryInput(std::move(bits));
}

/// Immutable collection of labeled binary examples. Carries the schema it was
/// binarized with, when there is one; synthetic data is raw binary.
class Dataset {
 public:
  Dataset(std::size_t num_visible, std::size_t num_classes, std::vector<LabeledExample> examples,
          std::optional<CategoricalSchema> schema = std::nullopt)
      : num_visible_(num_visible),
        num_classes_(num_classes),
        examples_(std::move(examples)),
        schema_(std::move(schema)) {
    if (num_visible_ == 0 || num_classes_ < 2) {
      throw data_error("dataset needs a positive width and at least two classes");
    }
    if (schema_ && schema_->width() != num_visible_) {
      throw data_error("dataset width does not match its schema");
    }
    for (const LabeledExample& ex : examples_) {
      if (ex.x.size() != num_visible_) {
        throw data_error("example width does not match the dataset");
      }
      if (ex.y.index() > num_classes_) {
        throw data_error("example label out of range");
      }
    }
  }

  std::size_t size() const { return examples_.size(); }
  std::size_t num_visible() const { return num_visible_; }
  std::size_t num_classes() const { return num_classes_; }
  const std::vector<LabeledExample>& examples() const { return examples_; }
  const std::optional<CategoricalSchema>& schema() const { return schema_; }

 private:
  std::size_t num_visible_;
  std::size_t num_classes_;
  std::vector<LabeledExample> examples_;
  std::optional<CategoricalSchema> schema_;
};

namespace csv {

/// Splits one CSV line, honoring double-quoted fields with "" escapes.
inline std::vector<std::string> parse_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

inline std::string quote_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) {
    return value;
  }
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

inline std::vector<std::vector<std::string>> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open file: " + path);
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_line(line));
  }
  if (rows.empty()) {
    throw data_error("empty file: " + path);
  }
  return rows;
}

}  // namespace csv

/// Categorical CSV loader: header row named after schema features plus one
/// label column. Row-level problems are collected and reported together with
/// their 1-based row numbers; nothing is imputed.
inline Dataset load_csv(const std::string& path, const CategoricalSchema& schema,
                        const std::string& label_column) {
  const auto rows = csv::read_file(path);
  const std::vector<std::string>& header = rows[0];

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw data_error("column '" + name + "' missing from header of " + path);
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::size_t> feature_cols;
  feature_cols.reserve(schema.feature_count());
  for (const CategoryFeature& f : schema.features()) {
    feature_cols.push_back(column_of(f.name));
  }
  const std::size_t label_col = column_of(label_column);
  if (!schema.label()) {
    throw data_error("schema '" + schema.name() + "' declares no label categories");
  }
  const std::vector<std::string>& label_cats = schema.label()->categories;

  std::vector<LabeledExample> examples;
  examples.reserve(rows.size() - 1);
  std::vector<std::string> problems;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      problems.push_back("row " + std::to_string(r + 1) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(row.size()));
      continue;
    }
    try {
      std::vector<std::string> record;
      record.reserve(schema.feature_count());
      for (std::size_t col : feature_cols) record.push_back(row[col]);
      BinaryInput x = binarize(record, schema);
      const auto it = std::find(label_cats.begin(), label_cats.end(), row[label_col]);
      if (it == label_cats.end()) {
        throw data_error("unknown label '" + row[label_col] + "'");
      }
      const auto k = static_cast<std::size_t>(it - label_cats.begin()) + 1;
      examples.push_back(LabeledExample{std::move(x), Label(k)});
    } catch (const data_error& e) {
      problems.push_back("row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string message = std::to_string(problems.size()) + " bad row(s) in " + path;
    for (const std::string& p : problems) message += "\n  " + p;
    throw data_error(message);
  }
  if (examples.empty()) {
    throw data_error("no data rows in " + path);
  }
  return Dataset(schema.width(), label_cats.size(), std::move(examples), schema);
}

/// Raw binary CSV loader: every non-label column holds 0/1, the label column
/// holds integers 1..K. The format `synth` emits.
inline Dataset load_binary_csv(const std::string& path, const std::string& label_column) {
  const auto rows = csv::read_file(path);
  const std::vector<std::string>& header = rows[0];
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw data_error("column '" + label_column + "' missing from header of " + path);
  }
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());
  if (header.size() < 2) {
    throw data_error("no input columns in " + path);
  }

  std::vector<LabeledExample> examples;
  std::vector<std::string> problems;
  std::size_t max_label = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      problems.push_back("row " + std::to_string(r + 1) + ": wrong field count");
      continue;
    }
    std::vector<std::uint8_t> bits;
    bits.reserve(header.size() - 1);
    bool bad = false;
    for (std::size_t col = 0; col < row.size(); ++col) {
      if (col == label_col) continue;
      if (row[col] == "0") {
        bits.push_back(0);
      } else if (row[col] == "1") {
        bits.push_back(1);
      } else {
        problems.push_back("row " + std::to_string(r + 1) + ": column '" + header[col] +
                           "' is not 0/1 (use a schema for categorical data)");
        bad = true;
        break;
      }
    }
    if (bad) continue;
    std::size_t label = 0;
    try {
      label = static_cast<std::size_t>(std::stoul(row[label_col]));
    } catch (const std::exception&) {
      problems.push_back("row " + std::to_string(r + 1) + ": label '" + row[label_col] +
                         "' is not a positive integer");
      continue;
    }
    if (label < 1) {
      problems.push_back("row " + std::to_string(r + 1) + ": label must be at least 1");
      continue;
    }
    max_label = std::max(max_label, label);
    examples.push_back(LabeledExample{BinaryInput(std::move(bits)), Label(label)});
  }
  if (!problems.empty()) {
    std::string message = std::to_string(problems.size()) + " bad row(s) in " + path;
    for (const std::string& p : problems) message += "\n  " + p;
    throw data_error(message);
  }
  if (examples.empty()) {
    throw data_error("no data rows in " + path);
  }
  return Dataset(header.size() - 1, std::max<std::size_t>(max_label, 2), std::move(examples));
}

/// Writes a dataset back to CSV: category strings when a schema is attached,
/// raw 0/1 columns otherwise. Loading the produced file recovers the dataset
/// exactly.
inline void export_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("cannot write file: " + path);
  }
  if (dataset.schema()) {
    const CategoricalSchema& schema = *dataset.schema();
    if (!schema.label()) {
      throw data_error("cannot export: schema declares no label");
    }
    for (const CategoryFeature& f : schema.features()) {
      out << csv::quote_field(f.name) << ',';
    }
    out << csv::quote_field(schema.label()->name) << '\n';
    for (const LabeledExample& ex : dataset.examples()) {
      for (std::size_t f = 0; f < schema.feature_count(); ++f) {
        const CategoryFeature& feature = schema.features()[f];
        std::size_t chosen = feature.categories.size();
        for (std::size_t c = 0; c < feature.categories.size(); ++c) {
          if (ex.x[schema.offset(f) + c]) {
            chosen = c;
            break;
          }
        }
        if (chosen == feature.categories.size()) {
          throw data_error("example has no active bit for feature '" + feature.name + "'");
        }
        out << csv::quote_field(feature.categories[chosen]) << ',';
      }
      out << csv::quote_field(schema.label()->categories[ex.y.index() - 1]) << '\n';
    }
  } else {
    for (std::size_t i = 1; i <= dataset.num_visible(); ++i) {
      out << 'x' << i << ',';
    }
    out << "label\n";
    for (const LabeledExample& ex : dataset.examples()) {
      for (std::size_t i = 0; i < dataset.num_visible(); ++i) {
        out << static_cast<int>(ex.x[i]) << ',';
      }
      out << ex.y.index() << '\n';
    }
  }
}

/// Seeded random split. The first ceil(fraction * n) examples of the permuted
/// order form the training side; both sides are non-empty or the call fails.
inline std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw data_error("split fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.size();
  const auto train_size =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  if (train_size == 0 || train_size >= n) {
    throw data_error("split would leave one side empty");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<LabeledExample> train_examples;
  train_examples.reserve(train_size);
  std::vector<LabeledExample> test_examples;
  test_examples.reserve(n - train_size);
  for (std::size_t i = 0; i < n; ++i) {
    (i < train_size ? train_examples : test_examples).push_back(dataset.examples()[order[i]]);
  }
  return {Dataset(dataset.num_visible(), dataset.num_classes(), std::move(train_examples),
                  dataset.schema()),
          Dataset(dataset.num_visible(), dataset.num_classes(), std::move(test_examples),
                  dataset.schema())};
}

// ---------------------------------------------------------------------------
// Synthetic class-conditional data for desk-scale validation.
// ---------------------------------------------------------------------------

/// The generating rule of a synthetic dataset: per-class bit templates plus
/// the flip probability. Keeping it alongside the data makes the
/// generator's optimal classifier available as a reference ceiling.
struct GenerationRecord {
  std::size_t num_visible = 0;
  std::size_t num_classes = 0;
  double signal_strength = 0.0;
  double noise = 0.5;  // probability that a bit disagrees with its template
  std::vector<std::vector<std::uint8_t>> templates;  // K rows of D bits
};

struct SynthResult {
  Dataset data;
  GenerationRecord record;
};

/// Most probable class under the recorded generating rule; ties break toward
/// the lowest label index.
inline Label bayes_predict(const GenerationRecord& record, const BinaryInput& x) {
  if (x.size() != record.num_visible) {
    throw dimension_error("input width does not match the generation record");
  }
  std::size_t best = 0;
  std::size_t best_matches = 0;
  for (std::size_t k = 0; k < record.num_classes; ++k) {
    std::size_t matches = 0;
    for (std::size_t i = 0; i < record.num_visible; ++i) {
      if (x[i] == record.templates[k][i]) ++matches;
    }
    if (k == 0 || matches > best_matches) {
      best = k;
      best_matches = matches;
    }
  }
  return Label(best + 1);
}

inline double bayes_accuracy(const GenerationRecord& record, const Dataset& dataset) {
  if (dataset.size() == 0) {
    throw data_error("empty dataset");
  }
  std::size_t correct = 0;
  for (const LabeledExample& ex : dataset.examples()) {
    if (bayes_predict(record, ex.x) == ex.y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

/// Everything needed to regenerate one synthetic dataset.
struct SynthSpec {
  std::size_t num_visible = 20;
  std::size_t num_classes = 2;
  std::size_t num_examples = 1000;
  double signal_strength = 0.4;
  std::uint64_t seed = 1;
};

/// Draws n examples with uniform class labels. Each class owns a distinct
/// random bit template; every bit then disagrees with its template with
/// probability (1 - signal_strength)^2 / 2, so strength 0 gives
/// class-independent noise and strength 1 reproduces the templates exactly.
inline SynthResult synth_generate(std::size_t num_visible, std::size_t num_classes,
                                  std::size_t n, double signal_strength, Rng& rng) {
  if (num_visible < 2 || num_classes < 2 || n < 1) {
    throw data_error("synthetic generator needs D >= 2, K >= 2, n >= 1");
  }
  if (!(signal_strength >= 0.0 && signal_strength <= 1.0)) {
    throw data_error("signal strength must lie in [0,1]");
  }
  if (num_visible < 60 && (1ULL << num_visible) < num_classes) {
    throw data_error("cannot draw this many distinct class templates");
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GenerationRecord record;
  record.num_visible = num_visible;
  record.num_classes = num_classes;
  record.signal_strength = signal_strength;
  record.noise = 0.5 * (1.0 - signal_strength) * (1.0 - signal_strength);

  record.templates.reserve(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    std::vector<std::uint8_t> tpl(num_visible);
    do {
      for (auto& bit : tpl) bit = unit(rng) < 0.5 ? 1 : 0;
    } while (std::find(record.templates.begin(), record.templates.end(), tpl) !=
             record.templates.end());
    record.templates.push_back(std::move(tpl));
  }

  std::uniform_int_distribution<std::size_t> class_pick(1, num_classes);
  std::vector<LabeledExample> examples;
  examples.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    const Label y(class_pick(rng));
    const std::vector<std::uint8_t>& tpl = record.templates[y.index() - 1];
    std::vector<std::uint8_t> bits(num_visible);
    for (std::size_t i = 0; i < num_visible; ++i) {
      const bool flip = unit(rng) < record.noise;
      bits[i] = flip ? static_cast<std::uint8_t>(1 - tpl[i]) : tpl[i];
    }
    examples.push_back(LabeledExample{BinaryInput(std::move(bits)), y});
  }
  return SynthResult{Dataset(num_visible, num_classes, std::move(examples)),
                     std::move(record)};
}

inline SynthResult synth_generate(const SynthSpec& spec) {
  Rng rng(spec.seed);
  return synth_generate(spec.num_visible, spec.num_classes, spec.num_examples,
                        spec.signal_strength, rng);
}

}  // namespace classrbm
