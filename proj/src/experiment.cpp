#include "seqlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqlab/checkpoint.hpp"
#include "seqlab/datasets.hpp"
#include "seqlab/errors.hpp"

namespace fs = std::filesystem;

namespace seqlab {

std::string method_name(Method m) {
  switch (m) {
    case Method::lstm: return "lstm";
    case Method::discrete_hmm: return "discrete_hmm";
    case Method::continuous_hmm: return "continuous_hmm";
    case Method::hybrid: return "hybrid";
    case Method::joint_hybrid: return "joint_hybrid";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "lstm") return Method::lstm;
  if (name == "discrete_hmm") return Method::discrete_hmm;
  if (name == "continuous_hmm") return Method::continuous_hmm;
  if (name == "hybrid") return Method::hybrid;
  if (name == "joint_hybrid") return Method::joint_hybrid;
  throw DataError("unknown method '" + name + "'");
}

bool ResultsRow::same_results(const ResultsRow& other) const {
  return dataset == other.dataset && method == other.method &&
         parameter_count == other.parameter_count && hidden_dim == other.hidden_dim &&
         n_hmm == other.n_hmm && seed == other.seed &&
         std::memcmp(&validation_ll, &other.validation_ll, sizeof(double)) == 0 &&
         std::memcmp(&training_ll, &other.training_ll, sizeof(double)) == 0;
}

std::size_t count_parameters(const LstmParams& p) { return param_count(p); }

std::size_t count_parameters(const HybridParams& p) {
  return param_count(p.lstm) + p.lstm.vocab_size * p.n_hmm;
}

std::size_t count_parameters(const JointHybridParams& p) {
  return param_count(p.lstm) + p.lstm.vocab_size * p.n_hmm +
         p.n_hmm * p.n_hmm + p.n_hmm * p.lstm.vocab_size + p.n_hmm;
}

std::size_t count_parameters(const DiscreteHmmParams& p) {
  return p.n * (p.n - 1) + p.n * (p.vocab_size - 1);
}

std::size_t count_parameters(const ContinuousHmmParams& p) {
  return p.n * (p.n - 1) + p.n * p.dim + p.n * p.dim * (p.dim + 1) / 2;
}

std::size_t count_parameters(const Model& model) {
  if (model.lstm) return count_parameters(*model.lstm);
  if (model.discrete_hmm) return count_parameters(*model.discrete_hmm);
  if (model.continuous_hmm) return count_parameters(*model.continuous_hmm);
  if (model.hybrid) return count_parameters(*model.hybrid);
  if (model.joint_hybrid) return count_parameters(*model.joint_hybrid);
  throw DataError("count_parameters: empty model");
}

namespace {

void add_lstm_tensors(CheckpointWriter& w, const LstmParams& p) {
  w.add_tensor("embedding", {p.embedding.rows, p.embedding.cols}, p.embedding.data);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    w.add_tensor(prefix + "W_x", {p.layers[l].W_x.rows, p.layers[l].W_x.cols},
                 p.layers[l].W_x.data);
    w.add_tensor(prefix + "W_h", {p.layers[l].W_h.rows, p.layers[l].W_h.cols},
                 p.layers[l].W_h.data);
    w.add_tensor(prefix + "b", {p.layers[l].b.size()}, p.layers[l].b);
  }
  w.add_tensor("W_out", {p.W_out.rows, p.W_out.cols}, p.W_out.data);
  w.add_tensor("b_out", {p.b_out.size()}, p.b_out);
}

LstmParams lstm_from_checkpoint(const LoadedCheckpoint& cp) {
  LstmParams p;
  p.embedding = cp.matrix("embedding");
  p.vocab_size = p.embedding.rows;
  p.hidden_dim = p.embedding.cols;
  const std::size_t n_layers = cp.config.value("layers", 1);
  p.layers.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::string prefix = "layer" + std::to_string(l) + ".";
    p.layers[l].W_x = cp.matrix(prefix + "W_x");
    p.layers[l].W_h = cp.matrix(prefix + "W_h");
    p.layers[l].b = cp.tensor(prefix + "b").data;
  }
  p.W_out = cp.matrix("W_out");
  p.b_out = cp.tensor("b_out").data;
  return p;
}

DiscreteHmmParams discrete_hmm_from_checkpoint(const LoadedCheckpoint& cp) {
  DiscreteHmmParams p;
  p.T_mat = cp.matrix("T_mat");
  p.E = cp.matrix("E");
  p.pi0 = cp.tensor("pi0").data;
  p.n = p.T_mat.rows;
  p.vocab_size = p.E.cols;
  return p;
}

}  // namespace

std::string save_model(const Model& model, const std::string& dir) {
  CheckpointWriter w(dir, model.kind);
  w.set_config(model.config);
  w.set_vocab(model.vocab);
  if (!model.hmm_ref.empty()) w.set_hmm_ref(model.hmm_ref);
  if (model.kind == "lstm") {
    add_lstm_tensors(w, *model.lstm);
  } else if (model.kind == "discrete_hmm") {
    const auto& p = *model.discrete_hmm;
    w.add_tensor("T_mat", {p.T_mat.rows, p.T_mat.cols}, p.T_mat.data);
    w.add_tensor("E", {p.E.rows, p.E.cols}, p.E.data);
    w.add_tensor("pi0", {p.pi0.size()}, p.pi0);
  } else if (model.kind == "continuous_hmm") {
    const auto& p = *model.continuous_hmm;
    w.add_tensor("T_mat", {p.T_mat.rows, p.T_mat.cols}, p.T_mat.data);
    w.add_tensor("pi0", {p.pi0.size()}, p.pi0);
    DenseMatrix mu(p.n, p.dim);
    for (std::size_t j = 0; j < p.n; ++j)
      std::copy(p.mu[j].begin(), p.mu[j].end(), mu.row(j));
    w.add_tensor("mu", {p.n, p.dim}, mu.data);
    std::vector<double> sig;
    sig.reserve(p.n * p.dim * p.dim);
    for (std::size_t j = 0; j < p.n; ++j)
      sig.insert(sig.end(), p.sigma[j].data.begin(), p.sigma[j].data.end());
    w.add_tensor("sigma", {p.n, p.dim, p.dim}, sig);
  } else if (model.kind == "hybrid") {
    const auto& p = *model.hybrid;
    add_lstm_tensors(w, p.lstm);
    w.add_tensor("W_hmm", {p.W_hmm.rows, p.W_hmm.cols}, p.W_hmm.data);
  } else if (model.kind == "joint_hybrid") {
    const auto& p = *model.joint_hybrid;
    add_lstm_tensors(w, p.lstm);
    w.add_tensor("W_hmm", {p.W_hmm.rows, p.W_hmm.cols}, p.W_hmm.data);
    w.add_tensor("trans_logits", {p.trans_logits.rows, p.trans_logits.cols},
                 p.trans_logits.data);
    w.add_tensor("emis_logits", {p.emis_logits.rows, p.emis_logits.cols},
                 p.emis_logits.data);
    w.add_tensor("init_logits", {p.init_logits.size()}, p.init_logits);
  } else {
    throw DataError("save_model: unknown kind " + model.kind);
  }
  return w.finish();
}

Model load_model(const std::string& dir) {
  const LoadedCheckpoint cp = load_checkpoint_dir(dir);
  Model model;
  model.kind = cp.kind;
  model.vocab = cp.vocab;
  model.config = cp.config;
  model.hmm_ref = cp.hmm_ref;
  model.content_hash = cp.content_hash;
  if (cp.kind == "lstm") {
    model.lstm = lstm_from_checkpoint(cp);
  } else if (cp.kind == "discrete_hmm") {
    model.discrete_hmm = discrete_hmm_from_checkpoint(cp);
  } else if (cp.kind == "continuous_hmm") {
    ContinuousHmmParams p;
    p.T_mat = cp.matrix("T_mat");
    p.pi0 = cp.tensor("pi0").data;
    p.n = p.T_mat.rows;
    const LoadedTensor& mu = cp.tensor("mu");
    p.dim = mu.shape[1];
    p.mu.resize(p.n);
    for (std::size_t j = 0; j < p.n; ++j)
      p.mu[j].assign(mu.data.begin() + j * p.dim, mu.data.begin() + (j + 1) * p.dim);
    const LoadedTensor& sig = cp.tensor("sigma");
    p.sigma.assign(p.n, DenseMatrix(p.dim, p.dim));
    for (std::size_t j = 0; j < p.n; ++j)
      std::copy(sig.data.begin() + j * p.dim * p.dim,
                sig.data.begin() + (j + 1) * p.dim * p.dim, p.sigma[j].data.begin());
    model.continuous_hmm = std::move(p);
  } else if (cp.kind == "hybrid") {
    HybridParams p;
    p.lstm = lstm_from_checkpoint(cp);
    p.W_hmm = cp.matrix("W_hmm");
    p.n_hmm = p.W_hmm.cols;
    model.hybrid = std::move(p);
  } else if (cp.kind == "joint_hybrid") {
    JointHybridParams p;
    p.lstm = lstm_from_checkpoint(cp);
    p.W_hmm = cp.matrix("W_hmm");
    p.n_hmm = p.W_hmm.cols;
    p.trans_logits = cp.matrix("trans_logits");
    p.emis_logits = cp.matrix("emis_logits");
    p.init_logits = cp.tensor("init_logits").data;
    model.joint_hybrid = std::move(p);
  } else {
    throw CheckpointError(CheckpointError::Kind::bad_manifest,
                          "load_model: unknown kind " + cp.kind);
  }
  return model;
}

namespace {

std::span<const std::int32_t> range_span(const EncodedCorpus& corpus, Range r) {
  return {corpus.ids.data() + r.begin, r.length()};
}

nlohmann::json lstm_config_json(const LstmConfig& cfg, std::size_t vocab_size) {
  return {{"hidden_dim", cfg.hidden_dim}, {"layers", cfg.layers},
          {"bptt_len", cfg.bptt_len},     {"epochs", cfg.epochs},
          {"lr0", cfg.lr0},               {"clip_threshold", cfg.clip_threshold},
          {"vocab_size", vocab_size}};
}

}  // namespace

namespace {

void validate_config(const ExperimentConfig& config) {
  const bool needs_lstm = config.method == Method::lstm ||
                          config.method == Method::hybrid ||
                          config.method == Method::joint_hybrid ||
                          config.method == Method::continuous_hmm;
  const bool needs_hmm = config.method != Method::lstm;
  if (needs_lstm && config.hidden_dim < 1)
    throw DataError("config: method " + method_name(config.method) +
                    " requires hidden_dim >= 1");
  if (needs_hmm && config.n_hmm < 1)
    throw DataError("config: method " + method_name(config.method) +
                    " requires n_hmm >= 1");
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  EncodedCorpus corpus = load_dataset(config.dataset, config.valid_fraction,
                                      config.data_dir);
  const std::size_t v_size = corpus.vocab.size();
  RandomSource root(config.seed);

  LstmConfig lstm_cfg;
  lstm_cfg.hidden_dim = config.hidden_dim;
  lstm_cfg.layers = config.layers;
  lstm_cfg.bptt_len = config.bptt_len;
  lstm_cfg.epochs = config.epochs;

  ExperimentOutput out;
  ResultsRow& row = out.row;
  row.dataset = config.dataset;
  row.method = method_name(config.method);
  row.seed = config.seed;

  HmmHyper hyper;

  switch (config.method) {
    case Method::lstm: {
      RandomSource rng = root.substream("lstm");
      auto [params, trace] = train_lstm(lstm_cfg, corpus, rng);
      row.validation_ll = eval_loglik(params, corpus, corpus.valid_range);
      row.training_ll = eval_loglik(params, corpus, corpus.train_range);
      row.hidden_dim = config.hidden_dim;
      row.parameter_count = count_parameters(params);
      out.model.kind = "lstm";
      out.model.config = lstm_config_json(lstm_cfg, v_size);
      out.model.lstm = std::move(params);
      break;
    }
    case Method::discrete_hmm: {
      const std::size_t iters = config.iters > 0 ? config.iters : 100;
      RandomSource rng = root.substream("hmm");
      GibbsResult gibbs = gibbs_train_discrete(range_span(corpus, corpus.train_range),
                                               config.n_hmm, v_size, iters, hyper, rng);
      row.validation_ll =
          predictive_loglik(gibbs.params, range_span(corpus, corpus.valid_range));
      row.training_ll =
          predictive_loglik(gibbs.params, range_span(corpus, corpus.train_range));
      row.n_hmm = config.n_hmm;
      row.parameter_count = count_parameters(gibbs.params);
      out.model.kind = "discrete_hmm";
      out.model.config = {{"n", config.n_hmm}, {"vocab_size", v_size}, {"iters", iters}};
      out.model.discrete_hmm = std::move(gibbs.params);
      break;
    }
    case Method::continuous_hmm: {
      const std::size_t iters = config.iters > 0 ? config.iters : 50;
      LstmParams source;
      if (!config.lstm_checkpoint.empty()) {
        Model m = load_model(config.lstm_checkpoint);
        if (!m.lstm) throw DataError("continuous_hmm: checkpoint is not an LSTM");
        source = std::move(*m.lstm);
      } else {
        LstmConfig source_cfg = lstm_cfg;
        source_cfg.layers = std::max<std::size_t>(config.layers, 2);
        RandomSource rng = root.substream("source-lstm");
        source = train_lstm(source_cfg, corpus, rng).first;
      }
      const DenseMatrix hidden_train =
          extract_hidden_states(source, corpus, corpus.train_range);
      const DenseMatrix hidden_valid =
          extract_hidden_states(source, corpus, corpus.valid_range);
      RandomSource rng = root.substream("hmm");
      GibbsContinuousResult gibbs =
          gibbs_train_continuous(hidden_train, config.n_hmm, iters, hyper, rng);
      row.validation_ll = predictive_loglik(gibbs.params, hidden_valid);
      row.training_ll = predictive_loglik(gibbs.params, hidden_train);
      row.n_hmm = config.n_hmm;
      row.hidden_dim = source.hidden_dim;
      row.parameter_count = count_parameters(gibbs.params);
      out.model.kind = "continuous_hmm";
      out.model.config = {{"n", config.n_hmm},
                          {"dim", gibbs.params.dim},
                          {"iters", iters},
                          {"source_hidden_dim", source.hidden_dim}};
      out.model.continuous_hmm = std::move(gibbs.params);
      break;
    }
    case Method::hybrid: {
      const std::size_t iters = config.iters > 0 ? config.iters : 100;
      RandomSource hmm_rng = root.substream("hmm");
      GibbsResult gibbs =
          gibbs_train_discrete(range_span(corpus, corpus.train_range), config.n_hmm,
                               v_size, iters, hyper, hmm_rng);
      RandomSource rng = root.substream("hybrid");
      const HmmFeatureTrack track = precompute_hmm_track(gibbs.params, corpus);
      auto [params, trace] =
          train_sequential_hybrid(lstm_cfg, corpus, gibbs.params, rng, &track);
      row.validation_ll = eval_hybrid(params, corpus, corpus.valid_range, track);
      row.training_ll = eval_hybrid(params, corpus, corpus.train_range, track);
      row.hidden_dim = config.hidden_dim;
      row.n_hmm = config.n_hmm;
      row.parameter_count = count_parameters(params);
      out.model.kind = "hybrid";
      out.model.config = lstm_config_json(lstm_cfg, v_size);
      out.model.config["n_hmm"] = config.n_hmm;
      out.model.hybrid = std::move(params);
      Model hmm_model;
      hmm_model.kind = "discrete_hmm";
      hmm_model.vocab = corpus.vocab;
      hmm_model.config = {{"n", config.n_hmm}, {"vocab_size", v_size}, {"iters", iters}};
      hmm_model.discrete_hmm = std::move(gibbs.params);
      out.hmm_model = std::move(hmm_model);
      break;
    }
    case Method::joint_hybrid: {
      RandomSource rng = root.substream("joint");
      auto [params, trace] = train_joint_hybrid(lstm_cfg, corpus, config.n_hmm, rng);
      row.validation_ll = eval_joint_hybrid(params, corpus, corpus.valid_range);
      row.training_ll = eval_joint_hybrid(params, corpus, corpus.train_range);
      row.hidden_dim = config.hidden_dim;
      row.n_hmm = config.n_hmm;
      row.parameter_count = count_parameters(params);
      out.model.kind = "joint_hybrid";
      out.model.config = lstm_config_json(lstm_cfg, v_size);
      out.model.config["n_hmm"] = config.n_hmm;
      out.model.joint_hybrid = std::move(params);
      break;
    }
  }
  out.model.vocab = corpus.vocab;
  if (!std::isfinite(row.validation_ll) || !std::isfinite(row.training_ll))
    throw NumericError("run_experiment: non-finite log-likelihood for " +
                       method_name(config.method) + " on " + config.dataset);

  const auto end = std::chrono::steady_clock::now();
  row.wall_time_s = std::chrono::duration<double>(end - start).count();

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    if (out.hmm_model) {
      const std::string hmm_hash =
          save_model(*out.hmm_model, (fs::path(config.output_dir) / "hmm").string());
      out.model.hmm_ref = hmm_hash;
    }
    save_model(out.model, config.output_dir);
    std::ofstream rf(fs::path(config.output_dir) / "results.json");
    rf << row_to_json(row).dump(2) << "\n";
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::vector<ResultsRow>> group_rows(const std::vector<ResultsRow>& rows) {
  std::vector<std::string> order;
  std::vector<std::vector<ResultsRow>> groups;
  for (const auto& row : rows) {
    auto it = std::find(order.begin(), order.end(), row.dataset);
    if (it == order.end()) {
      order.push_back(row.dataset);
      groups.emplace_back();
      it = order.end() - 1;
    }
    groups[static_cast<std::size_t>(it - order.begin())].push_back(row);
  }
  for (auto& g : groups)
    std::stable_sort(g.begin(), g.end(), [](const ResultsRow& a, const ResultsRow& b) {
      return a.validation_ll < b.validation_ll;
    });
  return groups;
}

}  // namespace

std::string emit_results_csv(const std::vector<ResultsRow>& rows) {
  if (rows.empty()) throw DataError("emit_results_csv: no rows");
  std::string out =
      "dataset,method,parameter_count,hidden_dim,n_hmm,validation_ll,"
      "training_ll,seed,wall_time_s\n";
  for (const auto& groups = group_rows(rows); const auto& g : groups) {
    for (const auto& r : g) {
      out += r.dataset + "," + r.method + "," + std::to_string(r.parameter_count) +
             "," + std::to_string(r.hidden_dim) + "," + std::to_string(r.n_hmm) + "," +
             format_double(r.validation_ll) + "," + format_double(r.training_ll) +
             "," + std::to_string(r.seed) + "," + format_double(r.wall_time_s) + "\n";
    }
  }
  return out;
}

std::string emit_results_markdown(const std::vector<ResultsRow>& rows) {
  if (rows.empty()) throw DataError("emit_results_markdown: no rows");
  std::string out =
      "| Data | Method | Parameters | LSTM dims | HMM states | Validation | "
      "Training |\n|---|---|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& groups = group_rows(rows); const auto& g : groups) {
    for (const auto& r : g) {
      out += "| " + r.dataset + " | " + r.method + " | " +
             std::to_string(r.parameter_count) + " | " +
             (r.hidden_dim > 0 ? std::to_string(r.hidden_dim) : std::string()) +
             " | " + (r.n_hmm > 0 ? std::to_string(r.n_hmm) : std::string()) + " | ";
      std::snprintf(buf, sizeof(buf), "%.2f", r.validation_ll);
      out += buf;
      out += " | ";
      std::snprintf(buf, sizeof(buf), "%.2f", r.training_ll);
      out += buf;
      out += " |\n";
    }
  }
  return out;
}

std::vector<ResultsRow> parse_results_csv(const std::string& csv) {
  std::vector<ResultsRow> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw DataError("parse_results_csv: bad row: " + line);
    ResultsRow r;
    r.dataset = fields[0];
    r.method = fields[1];
    r.parameter_count = std::stoull(fields[2]);
    r.hidden_dim = std::stoull(fields[3]);
    r.n_hmm = std::stoull(fields[4]);
    r.validation_ll = std::stod(fields[5]);
    r.training_ll = std::stod(fields[6]);
    r.seed = std::stoull(fields[7]);
    r.wall_time_s = std::stod(fields[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json row_to_json(const ResultsRow& row) {
  return {{"dataset", row.dataset},
          {"method", row.method},
          {"parameter_count", row.parameter_count},
          {"hidden_dim", row.hidden_dim},
          {"n_hmm", row.n_hmm},
          {"validation_ll", row.validation_ll},
          {"training_ll", row.training_ll},
          {"seed", row.seed},
          {"wall_time_s", row.wall_time_s}};
}

ResultsRow row_from_json(const nlohmann::json& j) {
  ResultsRow r;
  r.dataset = j.at("dataset").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.parameter_count = j.at("parameter_count").get<std::size_t>();
  r.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  r.n_hmm = j.at("n_hmm").get<std::size_t>();
  r.validation_ll = j.at("validation_ll").get<double>();
  r.training_ll = j.at("training_ll").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

}  // namespace seqlab
