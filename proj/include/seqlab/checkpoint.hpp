#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqlab/corpus.hpp"
#include "seqlab/matrix.hpp"

namespace seqlab {

inline constexpr int kCheckpointFormatVersion = 1;

// Checkpoint directory layout: manifest.json plus one raw little-endian
// float64 blob per named tensor. The manifest carries kind, config echo,
// vocab (byte values), the tensor index, and a sha256 over all blob bytes in
// index order.
class CheckpointWriter {
 public:
  CheckpointWriter(std::string dir, std::string kind);
  ~CheckpointWriter();
  CheckpointWriter(const CheckpointWriter&) = delete;
  CheckpointWriter& operator=(const CheckpointWriter&) = delete;

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_vocab(const Vocab& vocab);
  void set_hmm_ref(std::string hash) { hmm_ref_ = std::move(hash); }

  void add_tensor(const std::string& name, std::vector<std::size_t> shape,
                  std::span<const double> data);

  // Writes manifest.json; returns the content hash.
  std::string finish();

 private:
  struct Entry {
    std::string name;
    std::vector<std::size_t> shape;
    std::string file;
    std::uint64_t byte_offset;
    std::uint64_t byte_size;
  };

  std::string dir_;
  std::string kind_;
  nlohmann::json config_;
  std::vector<int> vocab_bytes_;
  std::string hmm_ref_;
  std::vector<Entry> entries_;
  std::string running_hash_hex_;
  void* hasher_;  // incremental sha256
};

struct LoadedTensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

struct LoadedCheckpoint {
  std::string kind;
  nlohmann::json config;
  Vocab vocab;
  std::string content_hash;
  std::string hmm_ref;
  std::vector<std::string> tensor_order;
  std::map<std::string, LoadedTensor> tensors;

  const LoadedTensor& tensor(const std::string& name) const;
  DenseMatrix matrix(const std::string& name) const;  // rank-2 tensors
};

// Throws CheckpointError with a distinct kind on version mismatch, hash
// mismatch, truncated blobs, missing files, or a malformed manifest.
LoadedCheckpoint load_checkpoint_dir(const std::string& dir);

// Standalone dense-matrix blob (u64 rows, u64 cols, float64 data, all LE).
void write_matrix_file(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix_file(const std::string& path);

}  // namespace seqlab
