#include "seqlab/corpus.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

Vocab Vocab::from_chars(const std::vector<unsigned char>& sorted_chars) {
  Vocab v;
  v.chars = sorted_chars;
  for (std::size_t i = 0; i < v.chars.size(); ++i)
    v.index[v.chars[i]] = static_cast<int>(i);
  return v;
}

EncodedCorpus encode_corpus(std::string_view text, double valid_fraction) {
  if (text.empty()) throw DataError("encode_corpus: empty text");
  if (!(valid_fraction > 0.0) || !(valid_fraction < 1.0))
    throw DataError("encode_corpus: valid_fraction must be in (0, 1)");

  std::array<bool, 256> seen{};
  for (unsigned char c : text) seen[c] = true;

  EncodedCorpus corpus;
  for (int b = 0; b < 256; ++b) {
    if (seen[b]) {
      corpus.vocab.index[b] = static_cast<int>(corpus.vocab.chars.size());
      corpus.vocab.chars.push_back(static_cast<unsigned char>(b));
    }
  }

  corpus.ids.reserve(text.size());
  for (unsigned char c : text)
    corpus.ids.push_back(corpus.vocab.index[c]);

  const std::size_t t_total = text.size();
  std::size_t valid_len = static_cast<std::size_t>(
      std::ceil(valid_fraction * static_cast<double>(t_total)));
  if (valid_len >= t_total) valid_len = t_total - 1;
  if (valid_len == 0) valid_len = 1;
  corpus.train_range = {0, t_total - valid_len};
  corpus.valid_range = {t_total - valid_len, t_total};
  return corpus;
}

}  // namespace seqlab
