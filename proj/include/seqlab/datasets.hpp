#pragma once

#include <string>
#include <vector>

#include "seqlab/corpus.hpp"

namespace seqlab {

struct DatasetSpec {
  std::string name;
  std::string filename;  // resolved against the data dir
  std::string url;       // empty for the bundled sample
  std::size_t expected_bytes;  // 0 = unknown
};

const std::vector<DatasetSpec>& dataset_registry();

// `source` is a path (used as-is when the file exists) or a registry name.
std::string resolve_dataset_path(const std::string& source, const std::string& data_dir);

// Reads the file as raw bytes and encodes it. Throws DataError on a missing
// or empty file, with a fetch hint for known dataset names.
EncodedCorpus load_dataset(const std::string& source, double valid_fraction,
                           const std::string& data_dir);

}  // namespace seqlab
