#include "seqlab/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "seqlab/errors.hpp"
#include "seqlab/pca.hpp"

namespace seqlab {

namespace {

struct Rgb {
  int r, g, b;
};

Rgb parse_hex(const std::string& hex) {
  int r = 0, g = 0, b = 0;
  std::sscanf(hex.c_str(), "#%02x%02x%02x", &r, &g, &b);
  return {r, g, b};
}

std::string hsv_to_hex(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c; g = x;
  } else if (hp < 2) {
    r = x; g = c;
  } else if (hp < 3) {
    g = c; b = x;
  } else if (hp < 4) {
    g = x; b = c;
  } else if (hp < 5) {
    r = x; b = c;
  } else {
    r = c; b = x;
  }
  const double m = v - c;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround((r + m) * 255.0)),
                static_cast<int>(std::lround((g + m) * 255.0)),
                static_cast<int>(std::lround((b + m) * 255.0)));
  return buf;
}

void append_html_escaped(std::string& out, char c) {
  switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    default: out += c;
  }
}

}  // namespace

std::vector<PaletteEntry> default_palette(std::size_t k) {
  static const std::vector<PaletteEntry> fixed = {
      {"#4363d8", "#ffffff"},  // blue
      {"#3cb44b", "#ffffff"},  // green
      {"#ffe119", "#e6194b"},  // yellow, red font
      {"#e6194b", "#ffe119"},  // red, yellow font
      {"#911eb4", "#ffffff"},  // purple
      {"#f58231", "#000000"},  // orange
      {"#42d4f4", "#000000"},  // cyan
      {"#f032e6", "#000000"},  // magenta
      {"#bfef45", "#000000"},  // lime
      {"#a9a9a9", "#000000"},  // grey
  };
  std::vector<PaletteEntry> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (i < fixed.size()) {
      out.push_back(fixed[i]);
    } else {
      const double hue = std::fmod(0.618033988749895 * static_cast<double>(i), 1.0);
      out.push_back({hsv_to_hex(hue, 0.55, 0.85), "#000000"});
    }
  }
  return out;
}

std::vector<std::int32_t> cluster_states(const DenseMatrix& hidden, std::size_t k,
                                         RandomSource& rng) {
  return kmeans(hidden, k, rng).assignments;
}

std::vector<std::int32_t> hmm_state_labels(const StateDistSeq& track) {
  std::vector<std::int32_t> labels(track.dists.rows);
  for (std::size_t t = 0; t < track.dists.rows; ++t) {
    const double* row = track.dists.row(t);
    std::size_t best = 0;
    for (std::size_t j = 1; j < track.dists.cols; ++j)
      if (row[j] > row[best]) best = j;
    labels[t] = static_cast<std::int32_t>(best);
  }
  return labels;
}

std::string render_colored_text(const ColoredText& ct, RenderFormat format) {
  if (ct.labels.size() != ct.chars.size())
    throw DataError("render_colored_text: labels/chars length mismatch");
  for (std::int32_t l : ct.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= ct.palette.size())
      throw DataError("render_colored_text: label " + std::to_string(l) +
                      " has no palette entry");
  }

  std::string out;
  if (format == RenderFormat::html) {
    out.reserve(ct.chars.size() * 24 + 1024);
    out +=
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
        "<title>state coloring</title>\n<style>\n"
        "pre { font-family: monospace; white-space: pre-wrap; }\n";
    for (std::size_t i = 0; i < ct.palette.size(); ++i) {
      out += ".l" + std::to_string(i) + " { background-color: " +
             ct.palette[i].background + "; color: " + ct.palette[i].font + "; }\n";
    }
    out += "</style></head><body><pre>";
    for (std::size_t t = 0; t < ct.chars.size(); ++t) {
      const char c = ct.chars[t];
      if (c == '\n') {
        out += '\n';
        continue;
      }
      out += "<span class=\"l" + std::to_string(ct.labels[t]) + "\">";
      append_html_escaped(out, c);
      out += "</span>";
    }
    out += "</pre></body></html>\n";
    return out;
  }

  // ansi
  std::vector<Rgb> bg(ct.palette.size()), fg(ct.palette.size());
  for (std::size_t i = 0; i < ct.palette.size(); ++i) {
    bg[i] = parse_hex(ct.palette[i].background);
    fg[i] = parse_hex(ct.palette[i].font);
  }
  out.reserve(ct.chars.size() * 40);
  char buf[64];
  for (std::size_t t = 0; t < ct.chars.size(); ++t) {
    const char c = ct.chars[t];
    if (c == '\n') {
      out += "\x1b[0m\n";
      continue;
    }
    const std::size_t l = static_cast<std::size_t>(ct.labels[t]);
    std::snprintf(buf, sizeof(buf), "\x1b[48;2;%d;%d;%dm\x1b[38;2;%d;%d;%dm",
                  bg[l].r, bg[l].g, bg[l].b, fg[l].r, fg[l].g, fg[l].b);
    out += buf;
    out += c;
  }
  out += "\x1b[0m";
  return out;
}

std::vector<CharWindowSample> build_char_window_samples(
    const std::vector<std::int32_t>& ids, Range range, const DenseMatrix& hidden,
    std::size_t dim, std::size_t window) {
  if (hidden.rows != range.length())
    throw DataError("build_char_window_samples: hidden rows != range length");
  if (dim >= hidden.cols) throw DataError("build_char_window_samples: dim out of range");
  // boundary symbol = one past the largest id in play
  std::int32_t max_id = 0;
  for (std::size_t t = range.begin; t < range.end; ++t)
    max_id = std::max(max_id, ids[t]);
  const int boundary = max_id + 1;

  std::vector<CharWindowSample> samples(range.length());
  for (std::size_t t = 0; t < range.length(); ++t) {
    auto& s = samples[t];
    s.target = hidden(t, dim);
    s.features.reserve(window);
    for (std::size_t w = window; w >= 1; --w) {
      const int offset = -static_cast<int>(w);
      const std::ptrdiff_t pos =
          static_cast<std::ptrdiff_t>(range.begin + t) + offset;
      const int c = pos < static_cast<std::ptrdiff_t>(range.begin)
                        ? boundary
                        : ids[static_cast<std::size_t>(pos)];
      s.features.emplace_back(offset, c);
    }
  }
  return samples;
}

namespace {

struct SplitStats {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t m = 0;

  double sse() const { return m == 0 ? 0.0 : sumsq - sum * sum / static_cast<double>(m); }
};

}  // namespace

RegressionTree fit_state_dim_tree(const std::vector<CharWindowSample>& samples,
                                  std::size_t max_depth, std::size_t min_leaf) {
  if (min_leaf < 1) throw DataError("fit_state_dim_tree: min_leaf must be >= 1");
  if (samples.size() < 2 * min_leaf)
    throw DataError("fit_state_dim_tree: need at least 2*min_leaf samples");
  const std::size_t window = samples[0].features.size();
  int max_char = 0;
  for (const auto& s : samples)
    for (const auto& [off, c] : s.features) max_char = std::max(max_char, c);
  const std::size_t n_chars = static_cast<std::size_t>(max_char) + 1;

  RegressionTree tree;
  tree.total_samples = samples.size();

  struct Pending {
    std::vector<std::size_t> idx;
    std::size_t depth;
    int node;
  };

  std::vector<std::size_t> all(samples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({std::move(all), 0, 0});

  double leaf_sse_total = 0.0;

  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(cur.node)];

    SplitStats parent;
    for (std::size_t i : cur.idx) {
      parent.sum += samples[i].target;
      parent.sumsq += samples[i].target * samples[i].target;
      ++parent.m;
    }
    node.count = parent.m;
    node.value = parent.sum / static_cast<double>(parent.m);

    bool make_leaf = cur.depth >= max_depth || parent.m < 2 * min_leaf;
    int best_slot = -1, best_char = -1;
    double best_gain = 0.0;
    if (!make_leaf) {
      const double parent_sse = parent.sse();
      std::vector<SplitStats> per_char(n_chars);
      for (std::size_t slot = 0; slot < window; ++slot) {
        for (auto& st : per_char) st = SplitStats{};
        for (std::size_t i : cur.idx) {
          const int c = samples[i].features[slot].second;
          auto& st = per_char[static_cast<std::size_t>(c)];
          st.sum += samples[i].target;
          st.sumsq += samples[i].target * samples[i].target;
          ++st.m;
        }
        for (std::size_t c = 0; c < n_chars; ++c) {
          const SplitStats& eq = per_char[c];
          if (eq.m < min_leaf || parent.m - eq.m < min_leaf) continue;
          SplitStats ne;
          ne.sum = parent.sum - eq.sum;
          ne.sumsq = parent.sumsq - eq.sumsq;
          ne.m = parent.m - eq.m;
          const double gain = parent_sse - eq.sse() - ne.sse();
          if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_slot = static_cast<int>(slot);
            best_char = static_cast<int>(c);
          }
        }
      }
      if (best_slot < 0 || best_gain <= 1e-12) make_leaf = true;
    }

    if (make_leaf) {
      leaf_sse_total += parent.sse();
      continue;
    }

    node.offset = samples[0].features[static_cast<std::size_t>(best_slot)].first;
    node.char_id = best_char;
    std::vector<std::size_t> eq_idx, ne_idx;
    for (std::size_t i : cur.idx) {
      if (samples[i].features[static_cast<std::size_t>(best_slot)].second == best_char)
        eq_idx.push_back(i);
      else
        ne_idx.push_back(i);
    }
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    // re-fetch: emplace_back may have reallocated
    tree.nodes[static_cast<std::size_t>(cur.node)].left = left;
    tree.nodes[static_cast<std::size_t>(cur.node)].right = right;
    stack.push_back({std::move(ne_idx), cur.depth + 1, right});
    stack.push_back({std::move(eq_idx), cur.depth + 1, left});
  }

  tree.train_mse = leaf_sse_total / static_cast<double>(tree.total_samples);
  return tree;
}

double tree_predict(const RegressionTree& tree, const CharWindowSample& sample) {
  std::size_t cur = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[cur];
    if (node.left < 0) return node.value;
    bool matches = false;
    for (const auto& [off, c] : sample.features) {
      if (off == node.offset) {
        matches = c == node.char_id;
        break;
      }
    }
    cur = static_cast<std::size_t>(matches ? node.left : node.right);
  }
}

std::size_t tree_leaf_count(const RegressionTree& tree) {
  std::size_t n = 0;
  for (const auto& node : tree.nodes)
    if (node.left < 0) ++n;
  return n;
}

namespace {

std::string display_char(int c, const std::function<std::string(int)>& display) {
  if (display) return display(c);
  return "#" + std::to_string(c);
}

void render_text_node(const RegressionTree& tree, std::size_t idx, std::size_t depth,
                      const std::function<std::string(int)>& display,
                      std::string& out) {
  const TreeNode& node = tree.nodes[idx];
  const std::string indent(2 * depth, ' ');
  if (node.left < 0) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", node.value);
    out += indent + "leaf value=" + buf + " n=" + std::to_string(node.count) + "\n";
    return;
  }
  out += indent + "[t" + std::to_string(node.offset) + " == " +
         display_char(node.char_id, display) + "] n=" + std::to_string(node.count) +
         "\n";
  out += indent + "yes:\n";
  render_text_node(tree, static_cast<std::size_t>(node.left), depth + 1, display, out);
  out += indent + "no:\n";
  render_text_node(tree, static_cast<std::size_t>(node.right), depth + 1, display, out);
}

}  // namespace

std::string render_tree(const RegressionTree& tree, TreeFormat format,
                        const std::function<std::string(int)>& display) {
  std::string out;
  if (format == TreeFormat::text) {
    render_text_node(tree, 0, 0, display, out);
    return out;
  }
  out += "digraph tree {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.left < 0) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g", node.value);
      out += "  n" + std::to_string(i) + " [label=\"" + buf +
             "\\nn=" + std::to_string(node.count) + "\"];\n";
    } else {
      std::string label = "t" + std::to_string(node.offset) + " == " +
                          display_char(node.char_id, display);
      std::string escaped;
      for (char c : label) {
        if (c == '"' || c == '\\') escaped += '\\';
        escaped += c;
      }
      out += "  n" + std::to_string(i) + " [label=\"" + escaped + "\"];\n";
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(node.left) +
             " [label=\"yes\"];\n";
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(node.right) +
             " [label=\"no\"];\n";
    }
  }
  out += "}\n";
  return out;
}

PcaReport pca_report(const DenseMatrix& hidden) {
  PcaReport report;
  report.ratios = pca_explained_variance(hidden);
  report.cumulative.resize(report.ratios.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < report.ratios.size(); ++i) {
    acc += report.ratios[i];
    report.cumulative[i] = acc;
  }
  report.k99 = report.ratios.size();
  for (std::size_t i = 0; i < report.cumulative.size(); ++i) {
    if (report.cumulative[i] >= 0.99) {
      report.k99 = i + 1;
      break;
    }
  }
  return report;
}

void write_label_file(const std::string& path, const std::vector<std::int32_t>& labels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_label_file: cannot open " + path);
  const std::uint64_t count = labels.size();
  f.write(reinterpret_cast<const char*>(&count), sizeof(count));
  f.write(reinterpret_cast<const char*>(labels.data()),
          static_cast<std::streamsize>(labels.size() * sizeof(std::int32_t)));
}

std::vector<std::int32_t> read_label_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_label_file: cannot open " + path);
  std::uint64_t count = 0;
  f.read(reinterpret_cast<char*>(&count), sizeof(count));
  std::vector<std::int32_t> labels(count);
  f.read(reinterpret_cast<char*>(labels.data()),
         static_cast<std::streamsize>(count * sizeof(std::int32_t)));
  if (!f) throw DataError("read_label_file: truncated file " + path);
  return labels;
}

}  // namespace seqlab
