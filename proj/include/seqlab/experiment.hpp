#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqlab/corpus.hpp"
#include "seqlab/hmm.hpp"
#include "seqlab/hybrid.hpp"
#include "seqlab/lstm.hpp"

namespace seqlab {

enum class Method { lstm, discrete_hmm, continuous_hmm, hybrid, joint_hybrid };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct ExperimentConfig {
  std::string dataset;  // registry name or path
  Method method = Method::lstm;
  std::size_t hidden_dim = 5;
  std::size_t n_hmm = 10;
  std::size_t layers = 1;
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  std::size_t iters = 0;  // 0 = per-method default (100 discrete, 50 continuous)
  std::size_t bptt_len = 100;
  double valid_fraction = 0.05;
  std::string output_dir;        // empty = no checkpoint written
  std::string data_dir = "data";
  std::string lstm_checkpoint;   // continuous_hmm: reuse this source LSTM
};

struct ResultsRow {
  std::string dataset;
  std::string method;
  std::size_t parameter_count = 0;
  std::size_t hidden_dim = 0;  // 0 = not applicable
  std::size_t n_hmm = 0;       // 0 = not applicable
  double validation_ll = 0.0;  // nats per predicted position
  double training_ll = 0.0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  bool same_results(const ResultsRow& other) const;  // ignores wall_time_s
};

// Trainable-scalar counts of the implemented architectures.
std::size_t count_parameters(const LstmParams& p);
std::size_t count_parameters(const HybridParams& p);
std::size_t count_parameters(const JointHybridParams& p);
std::size_t count_parameters(const DiscreteHmmParams& p);  // simplex dof
std::size_t count_parameters(const ContinuousHmmParams& p);

// Checkpointable model, discriminated by kind.
struct Model {
  std::string kind;
  Vocab vocab;
  nlohmann::json config;
  std::string hmm_ref;       // sequential hybrid: content hash of the frozen HMM
  std::string content_hash;  // set by load_model
  std::optional<LstmParams> lstm;
  std::optional<DiscreteHmmParams> discrete_hmm;
  std::optional<ContinuousHmmParams> continuous_hmm;
  std::optional<HybridParams> hybrid;
  std::optional<JointHybridParams> joint_hybrid;
};

std::size_t count_parameters(const Model& model);

// Returns the checkpoint content hash.
std::string save_model(const Model& model, const std::string& dir);
Model load_model(const std::string& dir);

struct ExperimentOutput {
  ResultsRow row;
  Model model;
  std::optional<Model> hmm_model;  // sequential hybrid: the frozen HMM
};

// Dispatches to the right train/eval pipeline; deterministic given
// (config, seed, corpus bytes). Writes checkpoint + results.json into
// config.output_dir when set (hybrid adds an hmm/ subdirectory).
ExperimentOutput run_experiment(const ExperimentConfig& config);

// CSV with full-precision floats; parse(emit(rows)) == rows.
std::string emit_results_csv(const std::vector<ResultsRow>& rows);
// Table-1-style markdown: grouped by dataset (first-appearance order),
// ascending validation log-likelihood within a group, 2-decimal lls.
std::string emit_results_markdown(const std::vector<ResultsRow>& rows);
std::vector<ResultsRow> parse_results_csv(const std::string& csv);

nlohmann::json row_to_json(const ResultsRow& row);
ResultsRow row_from_json(const nlohmann::json& j);

}  // namespace seqlab
