#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "seqlab/corpus.hpp"
#include "seqlab/hmm.hpp"
#include "seqlab/kmeans.hpp"
#include "seqlab/matrix.hpp"

namespace seqlab {

struct PaletteEntry {
  std::string background;  // "#rrggbb"
  std::string font;
};

// First 10 entries are a fixed distinguishable set; further entries walk the
// hue wheel. Palette is data handed to the renderer, not baked into it.
std::vector<PaletteEntry> default_palette(std::size_t k);

struct ColoredText {
  std::string chars;
  std::vector<std::int32_t> labels;  // same length as chars
  std::vector<PaletteEntry> palette;
};

// k-means labels over hidden-state rows.
std::vector<std::int32_t> cluster_states(const DenseMatrix& hidden, std::size_t k,
                                         RandomSource& rng);

// argmax of each filtered row; ties break toward the lowest state id.
std::vector<std::int32_t> hmm_state_labels(const StateDistSeq& track);

enum class RenderFormat { html, ansi };

// html: standalone document, one span per character keyed by label class,
// newlines left bare so stripping markup recovers the input byte for byte.
// ansi: 24-bit background/foreground escapes. Both byte-stable.
std::string render_colored_text(const ColoredText& ct, RenderFormat format);

struct CharWindowSample {
  double target;
  // (offset, char id) pairs for offsets -W..-1 in ascending offset order;
  // positions before the range start carry the boundary id (vocab size).
  std::vector<std::pair<int, int>> features;
};

// Samples for one hidden dimension: target = hidden(t, dim), features = the
// window preceding position range.begin + t.
std::vector<CharWindowSample> build_char_window_samples(
    const std::vector<std::int32_t>& ids, Range range, const DenseMatrix& hidden,
    std::size_t dim, std::size_t window);

struct TreeNode {
  int offset = 0;  // internal node test: char at offset == char_id
  int char_id = 0;
  int left = -1;  // "yes" branch; leaf when left == right == -1
  int right = -1;
  double value = 0.0;
  std::size_t count = 0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t total_samples = 0;
  double train_mse = 0.0;
};

// Greedy CART over boolean (offset, char) equality tests, maximizing variance
// reduction; stops at max_depth, min_leaf, or zero gain. Ties break toward
// the lowest offset, then the lowest char id. Requires >= 2*min_leaf samples.
RegressionTree fit_state_dim_tree(const std::vector<CharWindowSample>& samples,
                                  std::size_t max_depth, std::size_t min_leaf);

double tree_predict(const RegressionTree& tree, const CharWindowSample& sample);

std::size_t tree_leaf_count(const RegressionTree& tree);

enum class TreeFormat { text, dot };

// display maps a char id to a printable token; defaults to "#<id>".
std::string render_tree(const RegressionTree& tree, TreeFormat format,
                        const std::function<std::string(int)>& display = {});

struct PcaReport {
  std::vector<double> ratios;      // descending explained-variance ratios
  std::vector<double> cumulative;  // running sums of ratios
  std::size_t k99 = 0;             // smallest k with cumulative >= 0.99
};

PcaReport pca_report(const DenseMatrix& hidden);

// Binary id-array export: u64 LE count, then int32 LE labels.
void write_label_file(const std::string& path, const std::vector<std::int32_t>& labels);
std::vector<std::int32_t> read_label_file(const std::string& path);

}  // namespace seqlab
