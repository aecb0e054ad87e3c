#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace seqlab {

// Character vocabulary over raw bytes, ids assigned in byte order.
struct Vocab {
  std::vector<unsigned char> chars;   // sorted distinct bytes
  std::array<int, 256> index{};       // byte -> id, -1 if absent

  Vocab() { index.fill(-1); }

  std::size_t size() const { return chars.size(); }
  int id_of(unsigned char c) const { return index[c]; }
  unsigned char char_of(std::size_t id) const { return chars[id]; }

  static Vocab from_chars(const std::vector<unsigned char>& sorted_chars);
};

// Half-open index interval [begin, end).
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - begin; }
};

struct EncodedCorpus {
  std::vector<std::int32_t> ids;
  Vocab vocab;
  Range train_range;
  Range valid_range;
};

// Vocab = sorted distinct bytes of text; the last ceil(valid_fraction * T)
// characters form the validation range. Requires nonempty text and
// 0 < valid_fraction < 1.
EncodedCorpus encode_corpus(std::string_view text, double valid_fraction);

}  // namespace seqlab
