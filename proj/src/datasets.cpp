#include "seqlab/datasets.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seqlab/errors.hpp"

namespace fs = std::filesystem;

namespace seqlab {

const std::vector<DatasetSpec>& dataset_registry() {
  static const std::vector<DatasetSpec> registry = {
      {"tinyshakespeare", "tinyshakespeare.txt",
       "https://raw.githubusercontent.com/karpathy/char-rnn/master/data/"
       "tinyshakespeare/input.txt",
       1115394},
      {"linux", "linux_input.txt",
       "https://cs.stanford.edu/people/karpathy/char-rnn/linux_input.txt", 0},
      {"ptb", "ptb.train.txt",
       "https://raw.githubusercontent.com/wojzaremba/lstm/master/data/ptb.train.txt",
       0},
      {"sample", "sample.txt", "", 0},
  };
  return registry;
}

std::string resolve_dataset_path(const std::string& source,
                                 const std::string& data_dir) {
  if (fs::exists(source) && fs::is_regular_file(source)) return source;
  for (const auto& spec : dataset_registry()) {
    if (spec.name == source) {
      const fs::path path = fs::path(data_dir) / spec.filename;
      if (fs::exists(path)) return path.string();
      std::string hint = spec.url.empty()
                             ? "bundled file expected at " + path.string()
                             : "run scripts/fetch_data.sh or `seqlab fetch-data --name " +
                                   spec.name + "` first";
      throw DataError("dataset '" + source + "' not found at " + path.string() +
                      " (" + hint + ")");
    }
  }
  throw DataError("dataset '" + source + "': no such file or registry name");
}

EncodedCorpus load_dataset(const std::string& source, double valid_fraction,
                           const std::string& data_dir) {
  const std::string path = resolve_dataset_path(source, data_dir);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("load_dataset: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) throw DataError("load_dataset: empty file " + path);
  return encode_corpus(text, valid_fraction);
}

}  // namespace seqlab
