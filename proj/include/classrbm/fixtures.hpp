#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classrbm/error.hpp"
#include "classrbm/gradient.hpp"
#include "classrbm/model.hpp"
#include "classrbm/oracle.hpp"
#include "classrbm/rng.hpp"
#include "classrbm/serialize.hpp"

namespace classrbm {

/// One tiny model with every brute-force reference output precomputed:
/// log partition, the full joint table, class posteriors for every input,
/// the exact likelihood gradient on a small dataset, and the exact
/// single-input relevance matrix. Written to a file, these let any test
/// check its module against the enumeration results without re-deriving
/// them.
struct OracleFixture {
  ModelParameters model;
  double log_partition = 0.0;
  std::vector<Vector> joint;        // 2^D rows (input code order), K columns
  std::vector<Vector> posterior;    // 2^D rows, K columns, p(y|x)
  std::vector<LabeledExample> gradient_dataset;
  GradientRecord gradient;
  std::vector<Vector> relevance;    // K rows, D columns
};

/// Computes every reference output for the given model. Dims must satisfy
/// the enumeration guard; keep D small, the tables have 2^D rows.
inline OracleFixture make_oracle_fixture(const ModelParameters& model, Rng& rng,
                                         std::size_t gradient_examples = 5) {
  const std::size_t D = model.num_visible();
  const std::size_t K = model.num_classes();

  OracleFixture f{model, 0.0, {}, {}, {}, GradientRecord{}, {}};
  f.log_partition = oracle::log_partition_function(model);

  const std::uint64_t n_inputs = std::uint64_t{1} << D;
  f.joint.reserve(n_inputs);
  f.posterior.reserve(n_inputs);
  for (std::uint64_t code = 0; code < n_inputs; ++code) {
    const BinaryInput x = oracle::detail::input_from_code(code, D);
    Vector row(K);
    for (std::size_t k = 0; k < K; ++k) {
      row[k] = oracle::exact_joint(model, x, Label(k + 1));
    }
    f.joint.push_back(std::move(row));
    f.posterior.push_back(oracle::enum_label_posterior(model, x));
  }

  std::uniform_int_distribution<std::uint64_t> input_pick(0, n_inputs - 1);
  std::uniform_int_distribution<std::size_t> label_pick(1, K);
  for (std::size_t e = 0; e < gradient_examples; ++e) {
    f.gradient_dataset.push_back(LabeledExample{
        oracle::detail::input_from_code(input_pick(rng), D), Label(label_pick(rng))});
  }
  f.gradient = oracle::exact_loglik_gradient(model, f.gradient_dataset);

  f.relevance.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    Vector row(D);
    for (std::size_t i = 0; i < D; ++i) {
      row[i] = oracle::exact_input_relevance(model, i, Label(k + 1));
    }
    f.relevance.push_back(std::move(row));
  }
  return f;
}

/// A batch of fixtures on random models (weights standard normal, biases
/// uniform in [-1, 1]), dims drawn small enough to keep files compact.
inline std::vector<OracleFixture> generate_oracle_fixtures(std::size_t count,
                                                           std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> d_pick(2, 5);
  std::uniform_int_distribution<std::size_t> m_pick(1, 4);
  std::uniform_int_distribution<std::size_t> k_pick(2, 3);

  std::vector<OracleFixture> fixtures;
  fixtures.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const std::size_t D = d_pick(rng);
    const std::size_t M = m_pick(rng);
    const std::size_t K = k_pick(rng);
    Vector b(D), c(M), d(K);
    for (double& v : b) v = unit(rng);
    for (double& v : c) v = unit(rng);
    for (double& v : d) v = unit(rng);
    Matrix w1(D, M), w2(M, K);
    for (double& v : w1.data()) v = gauss(rng);
    for (double& v : w2.data()) v = gauss(rng);
    ModelParameters model(std::move(b), std::move(c), std::move(d), std::move(w1),
                          std::move(w2));
    fixtures.push_back(make_oracle_fixture(model, rng));
  }
  return fixtures;
}

namespace detail {

inline json gradient_to_json(const GradientRecord& g) {
  json j;
  j["visible_bias"] = g.visible_bias;
  j["hidden_bias"] = g.hidden_bias;
  j["label_bias"] = g.label_bias;
  j["visible_hidden"] = g.visible_hidden.data();  // row-major
  j["hidden_label"] = g.hidden_label.data();      // row-major
  return j;
}

inline GradientRecord gradient_from_json(const json& j, std::size_t D, std::size_t M,
                                         std::size_t K, const std::string& context) {
  GradientRecord g = GradientRecord::zeros(D, M, K);
  g.visible_bias = json_field<Vector>(j, "visible_bias", context);
  g.hidden_bias = json_field<Vector>(j, "hidden_bias", context);
  g.label_bias = json_field<Vector>(j, "label_bias", context);
  g.visible_hidden.data() = json_field<Vector>(j, "visible_hidden", context);
  g.hidden_label.data() = json_field<Vector>(j, "hidden_label", context);
  if (g.visible_bias.size() != D || g.hidden_bias.size() != M || g.label_bias.size() != K ||
      g.visible_hidden.size() != D * M || g.hidden_label.size() != M * K) {
    throw data_error(context + ": gradient block sizes disagree with the model");
  }
  return g;
}

}  // namespace detail

inline json oracle_fixtures_to_json(const std::vector<OracleFixture>& fixtures) {
  json list = json::array();
  for (const OracleFixture& f : fixtures) {
    json jf;
    jf["model"] = model_to_json(f.model);
    jf["log_partition"] = f.log_partition;
    jf["joint"] = f.joint;
    jf["posterior"] = f.posterior;
    json dataset = json::array();
    for (const LabeledExample& ex : f.gradient_dataset) {
      dataset.push_back(json{{"x", ex.x.bits()}, {"y", ex.y.index()}});
    }
    jf["gradient_dataset"] = std::move(dataset);
    jf["gradient"] = detail::gradient_to_json(f.gradient);
    jf["relevance"] = f.relevance;
    list.push_back(std::move(jf));
  }
  json j;
  j["format"] = "classrbm-oracle-fixtures";
  j["format_version"] = 1;
  j["fixtures"] = std::move(list);
  return j;
}

inline std::vector<OracleFixture> oracle_fixtures_from_json(const json& j,
                                                            const std::string& context) {
  if (!j.contains("fixtures") || !j.at("fixtures").is_array()) {
    throw data_error(context + ": missing 'fixtures' array");
  }
  std::vector<OracleFixture> fixtures;
  std::size_t index = 0;
  for (const json& jf : j.at("fixtures")) {
    const std::string fcontext = context + ": fixture " + std::to_string(index + 1);
    if (!jf.contains("model")) {
      throw data_error(fcontext + ": missing model");
    }
    ModelParameters model = model_from_json(jf.at("model"), fcontext);
    const std::size_t D = model.num_visible();
    const std::size_t M = model.num_hidden();
    const std::size_t K = model.num_classes();

    OracleFixture f{std::move(model), 0.0, {}, {}, {}, GradientRecord{}, {}};
    f.log_partition = detail::json_field<double>(jf, "log_partition", fcontext);
    f.joint = detail::json_field<std::vector<Vector>>(jf, "joint", fcontext);
    f.posterior = detail::json_field<std::vector<Vector>>(jf, "posterior", fcontext);
    const std::uint64_t n_inputs = std::uint64_t{1} << D;
    if (f.joint.size() != n_inputs || f.posterior.size() != n_inputs) {
      throw data_error(fcontext + ": joint/posterior table sizes disagree with num_visible");
    }
    if (!jf.contains("gradient_dataset") || !jf.at("gradient_dataset").is_array()) {
      throw data_error(fcontext + ": missing 'gradient_dataset' array");
    }
    for (const json& je : jf.at("gradient_dataset")) {
      auto bits = detail::json_field<std::vector<std::uint8_t>>(je, "x", fcontext);
      const auto y = detail::json_field<std::size_t>(je, "y", fcontext);
      if (bits.size() != D || y < 1 || y > K) {
        throw data_error(fcontext + ": bad gradient dataset example");
      }
      f.gradient_dataset.push_back(LabeledExample{BinaryInput(std::move(bits)), Label(y)});
    }
    if (!jf.contains("gradient")) {
      throw data_error(fcontext + ": missing gradient");
    }
    f.gradient = detail::gradient_from_json(jf.at("gradient"), D, M, K, fcontext);
    f.relevance = detail::json_field<std::vector<Vector>>(jf, "relevance", fcontext);
    if (f.relevance.size() != K) {
      throw data_error(fcontext + ": relevance table size disagrees with num_classes");
    }
    for (const Vector& row : f.relevance) {
      if (row.size() != D) {
        throw data_error(fcontext + ": relevance row width disagrees with num_visible");
      }
    }
    fixtures.push_back(std::move(f));
    ++index;
  }
  return fixtures;
}

inline void save_oracle_fixtures(const std::vector<OracleFixture>& fixtures,
                                 const std::string& path) {
  save_json_file(path, oracle_fixtures_to_json(fixtures));
}

inline std::vector<OracleFixture> load_oracle_fixtures(const std::string& path) {
  return oracle_fixtures_from_json(detail::parse_json_file(path), path);
}

}  // namespace classrbm
