#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "seqlab/checkpoint.hpp"
#include "seqlab/datasets.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/experiment.hpp"
#include "seqlab/interpret.hpp"
#include "seqlab/sha256.hpp"

namespace fs = std::filesystem;
using namespace seqlab;

namespace {

void print_row(const ResultsRow& row) {
  std::cout << emit_results_markdown({row});
  std::cout << "wall time: " << row.wall_time_s << " s\n";
}

void add_experiment_flags(CLI::App* cmd, ExperimentConfig* cfg) {
  cmd->add_option("--dataset", cfg->dataset, "dataset name or file path")->required();
  cmd->add_option("--seed", cfg->seed, "experiment seed");
  cmd->add_option("--valid-fraction", cfg->valid_fraction,
                  "fraction of the corpus held out for validation");
  cmd->add_option("--data-dir", cfg->data_dir, "directory holding dataset files");
  cmd->add_option("--out", cfg->output_dir, "checkpoint output directory");
}

std::string rebuild_text(const EncodedCorpus& corpus, Range range) {
  std::string text;
  text.reserve(range.length());
  for (std::size_t t = range.begin; t < range.end; ++t)
    text += static_cast<char>(
        corpus.vocab.char_of(static_cast<std::size_t>(corpus.ids[t])));
  return text;
}

const LstmParams& lstm_of(const Model& model) {
  if (model.lstm) return *model.lstm;
  if (model.hybrid) return model.hybrid->lstm;
  if (model.joint_hybrid) return model.joint_hybrid->lstm;
  throw DataError("checkpoint does not contain an LSTM component");
}

DiscreteHmmParams load_hybrid_hmm(const Model& hybrid_model,
                                  const std::string& checkpoint_dir,
                                  const std::string& hmm_checkpoint) {
  const std::string dir = !hmm_checkpoint.empty()
                              ? hmm_checkpoint
                              : (fs::path(checkpoint_dir) / "hmm").string();
  Model hmm = load_model(dir);
  if (!hmm.discrete_hmm) throw DataError("HMM checkpoint is not a discrete HMM");
  if (!hybrid_model.hmm_ref.empty() && hmm.content_hash != hybrid_model.hmm_ref)
    throw CheckpointError(CheckpointError::Kind::hash_mismatch,
                          "HMM checkpoint hash " + hmm.content_hash +
                              " does not match hybrid reference " +
                              hybrid_model.hmm_ref);
  return *hmm.discrete_hmm;
}

int run_fetch(const std::string& name, const std::string& data_dir) {
  fs::create_directories(data_dir);
  const fs::path checksums_path = fs::path(data_dir) / "CHECKSUMS";
  std::map<std::string, std::string> checksums;
  {
    std::ifstream cf(checksums_path);
    std::string n, h;
    while (cf >> n >> h) checksums[n] = h;
  }
  bool any_failed = false;
  for (const auto& spec : dataset_registry()) {
    if (spec.url.empty()) continue;
    if (name != "all" && name != spec.name) continue;
    const fs::path path = fs::path(data_dir) / spec.filename;
    if (!fs::exists(path)) {
      std::cout << "fetching " << spec.name << " from " << spec.url << "\n";
      const std::string cmd = "curl -fsSL -o '" + path.string() + "' '" + spec.url +
                              "' || wget -q -O '" + path.string() + "' '" + spec.url +
                              "'";
      if (std::system(cmd.c_str()) != 0) {
        std::cerr << "fetch failed for " << spec.name
                  << " (need curl or wget and network access)\n";
        std::error_code ec;
        fs::remove(path, ec);
        any_failed = true;
        continue;
      }
    }
    if (spec.expected_bytes > 0 && fs::file_size(path) != spec.expected_bytes) {
      std::cerr << spec.name << ": unexpected size " << fs::file_size(path)
                << " (expected " << spec.expected_bytes << ")\n";
      any_failed = true;
      continue;
    }
    const std::string hash = sha256_file_hex(path.string());
    auto it = checksums.find(spec.name);
    if (it == checksums.end()) {
      checksums[spec.name] = hash;  // trust on first use
      std::cout << spec.name << ": recorded sha256 " << hash << "\n";
    } else if (it->second != hash) {
      std::cerr << spec.name << ": sha256 mismatch (recorded " << it->second
                << ", file " << hash << ")\n";
      any_failed = true;
      continue;
    } else {
      std::cout << spec.name << ": ok (" << hash << ")\n";
    }
  }
  std::ofstream cf(checksums_path);
  for (const auto& [n, h] : checksums) cf << n << " " << h << "\n";
  return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqlab: character-level LSTM, Bayesian HMM, and hybrid models"};
  app.require_subcommand(1);

  // train
  ExperimentConfig train_cfg;
  auto* train = app.add_subcommand("train", "train a character-level LSTM");
  add_experiment_flags(train, &train_cfg);
  train->add_option("--hidden-dim", train_cfg.hidden_dim, "LSTM hidden width");
  train->add_option("--layers", train_cfg.layers, "LSTM layer count");
  train->add_option("--epochs", train_cfg.epochs, "training epochs");
  train->add_option("--bptt-len", train_cfg.bptt_len, "BPTT window length");

  // gibbs
  ExperimentConfig gibbs_cfg;
  std::string gibbs_method = "discrete_hmm";
  std::string track_out;
  auto* gibbs = app.add_subcommand("gibbs", "train a Bayesian HMM by Gibbs sampling");
  add_experiment_flags(gibbs, &gibbs_cfg);
  gibbs->add_option("--method", gibbs_method, "discrete_hmm or continuous_hmm")
      ->check(CLI::IsMember({"discrete_hmm", "continuous_hmm"}));
  gibbs->add_option("--hmm-states", gibbs_cfg.n_hmm, "HMM state count");
  gibbs->add_option("--iters", gibbs_cfg.iters, "Gibbs iterations (0 = default)");
  gibbs->add_option("--hidden-dim", gibbs_cfg.hidden_dim,
                    "source LSTM width (continuous only)");
  gibbs->add_option("--epochs", gibbs_cfg.epochs,
                    "source LSTM epochs (continuous only)");
  gibbs->add_option("--lstm-checkpoint", gibbs_cfg.lstm_checkpoint,
                    "reuse this LSTM checkpoint as the hidden-state source");
  gibbs->add_option("--track-out", track_out,
                    "write the filtered state-distribution track (binary matrix)");

  // hybrid
  ExperimentConfig hybrid_cfg;
  std::string hybrid_method = "hybrid";
  auto* hybrid = app.add_subcommand("hybrid", "train a hybrid HMM-LSTM model");
  add_experiment_flags(hybrid, &hybrid_cfg);
  hybrid->add_option("--method", hybrid_method, "hybrid (sequential) or joint_hybrid")
      ->check(CLI::IsMember({"hybrid", "joint_hybrid"}));
  hybrid->add_option("--hidden-dim", hybrid_cfg.hidden_dim, "LSTM hidden width");
  hybrid->add_option("--hmm-states", hybrid_cfg.n_hmm, "HMM state count");
  hybrid->add_option("--epochs", hybrid_cfg.epochs, "training epochs");
  hybrid->add_option("--iters", hybrid_cfg.iters,
                     "Gibbs iterations for the frozen HMM (sequential only)");
  hybrid->add_option("--layers", hybrid_cfg.layers, "LSTM layer count");
  hybrid->add_option("--bptt-len", hybrid_cfg.bptt_len, "BPTT window length");

  // eval
  std::string eval_checkpoint, eval_dataset, eval_hmm_checkpoint;
  std::string eval_data_dir = "data";
  double eval_valid_fraction = 0.05;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval->add_option("--checkpoint", eval_checkpoint, "checkpoint directory")->required();
  eval->add_option("--dataset", eval_dataset, "dataset name or path")->required();
  eval->add_option("--valid-fraction", eval_valid_fraction, "validation split");
  eval->add_option("--data-dir", eval_data_dir, "dataset directory");
  eval->add_option("--hmm-checkpoint", eval_hmm_checkpoint,
                   "frozen-HMM checkpoint (sequential hybrid)");

  // visualize
  std::string viz_checkpoint, viz_dataset, viz_out = "report.html";
  std::string viz_hmm_checkpoint, viz_labels_out, viz_data_dir = "data";
  std::size_t viz_clusters = 10, viz_max_chars = 50000;
  std::uint64_t viz_seed = 1;
  double viz_valid_fraction = 0.05;
  auto* viz = app.add_subcommand(
      "visualize", "color-code a corpus with model states (HTML report)");
  viz->add_option("--checkpoint", viz_checkpoint, "checkpoint directory")->required();
  viz->add_option("--dataset", viz_dataset, "dataset name or path")->required();
  viz->add_option("--out", viz_out, "output HTML path");
  viz->add_option("--clusters", viz_clusters, "k-means cluster count");
  viz->add_option("--max-chars", viz_max_chars, "characters rendered (0 = whole train range)");
  viz->add_option("--seed", viz_seed, "k-means seed");
  viz->add_option("--hmm-checkpoint", viz_hmm_checkpoint,
                  "discrete HMM checkpoint for state coloring");
  viz->add_option("--labels-out", viz_labels_out, "binary label-array output path");
  viz->add_option("--data-dir", viz_data_dir, "dataset directory");
  viz->add_option("--valid-fraction", viz_valid_fraction, "validation split");

  // tree
  std::string tree_checkpoint, tree_dataset, tree_out, tree_dot_out;
  std::string tree_data_dir = "data";
  std::size_t tree_dim = 0, tree_window = 5, tree_max_depth = 4, tree_min_leaf = 50;
  std::size_t tree_max_chars = 100000;
  double tree_valid_fraction = 0.05;
  auto* tree_cmd = app.add_subcommand(
      "tree", "fit a decision tree predicting one hidden dimension from preceding chars");
  tree_cmd->add_option("--checkpoint", tree_checkpoint, "checkpoint directory")
      ->required();
  tree_cmd->add_option("--dataset", tree_dataset, "dataset name or path")->required();
  tree_cmd->add_option("--dim", tree_dim, "hidden dimension index");
  tree_cmd->add_option("--window", tree_window, "preceding-character window");
  tree_cmd->add_option("--max-depth", tree_max_depth, "tree depth limit");
  tree_cmd->add_option("--min-leaf", tree_min_leaf, "minimum samples per leaf");
  tree_cmd->add_option("--max-chars", tree_max_chars, "training positions used");
  tree_cmd->add_option("--out", tree_out, "text rendering output path");
  tree_cmd->add_option("--dot-out", tree_dot_out, "graphviz output path");
  tree_cmd->add_option("--data-dir", tree_data_dir, "dataset directory");
  tree_cmd->add_option("--valid-fraction", tree_valid_fraction, "validation split");

  // table
  std::string table_in, table_csv = "results.csv", table_md = "results.md";
  auto* table = app.add_subcommand(
      "table", "collect results.json files into CSV and markdown tables");
  table->add_option("--in", table_in, "directory scanned for results.json")->required();
  table->add_option("--out-csv", table_csv, "CSV output path");
  table->add_option("--out-md", table_md, "markdown output path");

  // fetch-data
  std::string fetch_name = "all";
  std::string fetch_dir = "data";
  auto* fetch = app.add_subcommand("fetch-data", "download the text corpora");
  fetch->add_option("--name", fetch_name, "dataset name or 'all'");
  fetch->add_option("--data-dir", fetch_dir, "target directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*train) {
      train_cfg.method = Method::lstm;
      print_row(run_experiment(train_cfg).row);
      return 0;
    }
    if (*gibbs) {
      gibbs_cfg.method = parse_method(gibbs_method);
      ExperimentOutput out = run_experiment(gibbs_cfg);
      print_row(out.row);
      if (!track_out.empty() && out.model.discrete_hmm) {
        EncodedCorpus corpus = load_dataset(gibbs_cfg.dataset, gibbs_cfg.valid_fraction,
                                            gibbs_cfg.data_dir);
        write_matrix_file(track_out,
                          precompute_hmm_track(*out.model.discrete_hmm, corpus).dists);
        std::cout << "track written to " << track_out << "\n";
      }
      return 0;
    }
    if (*hybrid) {
      hybrid_cfg.method = parse_method(hybrid_method);
      print_row(run_experiment(hybrid_cfg).row);
      return 0;
    }
    if (*eval) {
      const Model model = load_model(eval_checkpoint);
      EncodedCorpus corpus =
          load_dataset(eval_dataset, eval_valid_fraction, eval_data_dir);
      double train_ll = 0.0, valid_ll = 0.0;
      if (model.kind == "lstm") {
        train_ll = eval_loglik(*model.lstm, corpus, corpus.train_range);
        valid_ll = eval_loglik(*model.lstm, corpus, corpus.valid_range);
      } else if (model.kind == "discrete_hmm") {
        const auto& p = *model.discrete_hmm;
        train_ll = predictive_loglik(
            p, std::span<const std::int32_t>(corpus.ids.data() + corpus.train_range.begin,
                                             corpus.train_range.length()));
        valid_ll = predictive_loglik(
            p, std::span<const std::int32_t>(corpus.ids.data() + corpus.valid_range.begin,
                                             corpus.valid_range.length()));
      } else if (model.kind == "hybrid") {
        const DiscreteHmmParams hmm =
            load_hybrid_hmm(model, eval_checkpoint, eval_hmm_checkpoint);
        const HmmFeatureTrack track = precompute_hmm_track(hmm, corpus);
        train_ll = eval_hybrid(*model.hybrid, corpus, corpus.train_range, track);
        valid_ll = eval_hybrid(*model.hybrid, corpus, corpus.valid_range, track);
      } else if (model.kind == "joint_hybrid") {
        train_ll = eval_joint_hybrid(*model.joint_hybrid, corpus, corpus.train_range);
        valid_ll = eval_joint_hybrid(*model.joint_hybrid, corpus, corpus.valid_range);
      } else {
        throw DataError("eval: unsupported checkpoint kind " + model.kind);
      }
      std::cout << "train ll:      " << train_ll << " nats/char\n";
      std::cout << "validation ll: " << valid_ll << " nats/char\n";
      return 0;
    }
    if (*viz) {
      const Model model = load_model(viz_checkpoint);
      EncodedCorpus corpus = load_dataset(viz_dataset, viz_valid_fraction, viz_data_dir);
      Range range = corpus.train_range;
      if (viz_max_chars > 0 && range.length() > viz_max_chars)
        range.end = range.begin + viz_max_chars;
      const std::string text = rebuild_text(corpus, range);

      if (model.kind == "discrete_hmm") {
        const StateDistSeq track = forward_filter(
            *model.discrete_hmm,
            std::span<const std::int32_t>(corpus.ids.data() + range.begin,
                                          range.length()));
        const auto labels = hmm_state_labels(track);
        ColoredText ct{text, labels, default_palette(model.discrete_hmm->n)};
        std::ofstream(viz_out) << render_colored_text(ct, RenderFormat::html);
        std::cout << "HMM state coloring written to " << viz_out << "\n";
        if (!viz_labels_out.empty()) write_label_file(viz_labels_out, labels);
        return 0;
      }

      const LstmParams& lstm = lstm_of(model);
      const DenseMatrix hidden = extract_hidden_states(lstm, corpus, range);
      RandomSource rng = RandomSource(viz_seed).substream("kmeans");
      const auto labels = cluster_states(hidden, viz_clusters, rng);
      ColoredText ct{text, labels, default_palette(viz_clusters)};
      std::ofstream(viz_out) << render_colored_text(ct, RenderFormat::html);
      std::cout << "k-means cluster coloring written to " << viz_out << "\n";
      if (!viz_labels_out.empty()) write_label_file(viz_labels_out, labels);

      // hybrid checkpoints also carry an HMM view
      if (model.kind == "hybrid" || !viz_hmm_checkpoint.empty()) {
        const DiscreteHmmParams hmm =
            load_hybrid_hmm(model, viz_checkpoint, viz_hmm_checkpoint);
        const StateDistSeq track = forward_filter(
            hmm, std::span<const std::int32_t>(corpus.ids.data() + range.begin,
                                               range.length()));
        const auto hmm_labels = hmm_state_labels(track);
        ColoredText hct{text, hmm_labels, default_palette(hmm.n)};
        const std::string hmm_out =
            (fs::path(viz_out).parent_path() /
             (fs::path(viz_out).stem().string() + "_hmm.html"))
                .string();
        std::ofstream(hmm_out) << render_colored_text(hct, RenderFormat::html);
        std::cout << "HMM state coloring written to " << hmm_out << "\n";
      }
      return 0;
    }
    if (*tree_cmd) {
      const Model model = load_model(tree_checkpoint);
      EncodedCorpus corpus =
          load_dataset(tree_dataset, tree_valid_fraction, tree_data_dir);
      Range range = corpus.train_range;
      if (tree_max_chars > 0 && range.length() > tree_max_chars)
        range.end = range.begin + tree_max_chars;
      const LstmParams& lstm = lstm_of(model);
      if (tree_dim >= lstm.hidden_dim)
        throw DataError("tree: --dim out of range (hidden width " +
                        std::to_string(lstm.hidden_dim) + ")");
      const DenseMatrix hidden = extract_hidden_states(lstm, corpus, range);
      const auto samples =
          build_char_window_samples(corpus.ids, range, hidden, tree_dim, tree_window);
      const RegressionTree tree =
          fit_state_dim_tree(samples, tree_max_depth, tree_min_leaf);
      const auto display = [&corpus](int c) -> std::string {
        if (c >= 0 && static_cast<std::size_t>(c) < corpus.vocab.size()) {
          const unsigned char ch = corpus.vocab.char_of(static_cast<std::size_t>(c));
          if (ch >= 0x20 && ch < 0x7f) return std::string("'") + char(ch) + "'";
          if (ch == '\n') return "'\\n'";
          if (ch == '\t') return "'\\t'";
          char buf[8];
          std::snprintf(buf, sizeof(buf), "0x%02x", ch);
          return buf;
        }
        return "<boundary>";
      };
      const std::string text_render = render_tree(tree, TreeFormat::text, display);
      std::cout << "dim " << tree_dim << ", train MSE " << tree.train_mse << "\n"
                << text_render;
      if (!tree_out.empty()) std::ofstream(tree_out) << text_render;
      if (!tree_dot_out.empty())
        std::ofstream(tree_dot_out) << render_tree(tree, TreeFormat::dot, display);
      return 0;
    }
    if (*table) {
      std::vector<ResultsRow> rows;
      for (const auto& entry : fs::recursive_directory_iterator(table_in)) {
        if (entry.is_regular_file() && entry.path().filename() == "results.json") {
          std::ifstream f(entry.path());
          nlohmann::json j;
          f >> j;
          rows.push_back(row_from_json(j));
        }
      }
      if (rows.empty()) throw DataError("table: no results.json files under " + table_in);
      const std::string csv = emit_results_csv(rows);
      const std::string md = emit_results_markdown(rows);
      std::ofstream(table_csv) << csv;
      std::ofstream(table_md) << md;
      std::cout << md;
      return 0;
    }
    if (*fetch) return run_fetch(fetch_name, fetch_dir);
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
