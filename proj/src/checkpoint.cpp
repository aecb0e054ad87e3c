#include "seqlab/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include "seqlab/errors.hpp"
#include "seqlab/sha256.hpp"

namespace fs = std::filesystem;

namespace seqlab {

namespace {

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return out;
}

}  // namespace

CheckpointWriter::CheckpointWriter(std::string dir, std::string kind)
    : dir_(std::move(dir)), kind_(std::move(kind)), hasher_(new Sha256()) {
  fs::create_directories(dir_);
}

CheckpointWriter::~CheckpointWriter() {
  delete static_cast<Sha256*>(hasher_);
}

void CheckpointWriter::set_vocab(const Vocab& vocab) {
  vocab_bytes_.clear();
  for (unsigned char c : vocab.chars) vocab_bytes_.push_back(static_cast<int>(c));
}

void CheckpointWriter::add_tensor(const std::string& name,
                                  std::vector<std::size_t> shape,
                                  std::span<const double> data) {
  std::size_t numel = 1;
  for (std::size_t s : shape) numel *= s;
  if (numel != data.size())
    throw DataError("checkpoint add_tensor: shape does not match data for " + name);
  const std::string file = sanitize(name) + ".bin";
  const fs::path path = fs::path(dir_) / file;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("checkpoint: cannot write " + path.string());
  const std::uint64_t bytes = data.size() * sizeof(double);
  f.write(reinterpret_cast<const char*>(data.data()),
          static_cast<std::streamsize>(bytes));
  static_cast<Sha256*>(hasher_)->update(data.data(), bytes);
  entries_.push_back({name, std::move(shape), file, 0, bytes});
}

std::string CheckpointWriter::finish() {
  Sha256* hasher = static_cast<Sha256*>(hasher_);
  const std::string hash = hasher->hex_digest();
  delete hasher;
  hasher_ = nullptr;

  nlohmann::json manifest;
  manifest["format_version"] = kCheckpointFormatVersion;
  manifest["kind"] = kind_;
  manifest["config"] = config_;
  manifest["vocab"] = vocab_bytes_;
  manifest["dtype"] = "float64-le";
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& e : entries_) {
    tensors.push_back({{"name", e.name},
                       {"shape", e.shape},
                       {"file", e.file},
                       {"byte_offset", e.byte_offset},
                       {"byte_size", e.byte_size}});
  }
  manifest["tensors"] = tensors;
  manifest["content_hash"] = hash;
  if (!hmm_ref_.empty()) manifest["hmm_ref"] = hmm_ref_;

  const fs::path path = fs::path(dir_) / "manifest.json";
  std::ofstream f(path);
  if (!f) throw DataError("checkpoint: cannot write " + path.string());
  f << manifest.dump(2) << "\n";
  return hash;
}

const LoadedTensor& LoadedCheckpoint::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end())
    throw CheckpointError(CheckpointError::Kind::bad_manifest,
                          "checkpoint: missing tensor " + name);
  return it->second;
}

DenseMatrix LoadedCheckpoint::matrix(const std::string& name) const {
  const LoadedTensor& t = tensor(name);
  if (t.shape.size() != 2)
    throw CheckpointError(CheckpointError::Kind::bad_manifest,
                          "checkpoint: tensor " + name + " is not rank 2");
  DenseMatrix m(t.shape[0], t.shape[1]);
  m.data = t.data;
  return m;
}

LoadedCheckpoint load_checkpoint_dir(const std::string& dir) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream mf(manifest_path);
  if (!mf)
    throw CheckpointError(CheckpointError::Kind::missing_file,
                          "checkpoint: missing " + manifest_path.string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::bad_manifest,
                          std::string("checkpoint: malformed manifest: ") + e.what());
  }

  LoadedCheckpoint out;
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion)
      throw CheckpointError(
          CheckpointError::Kind::version_mismatch,
          "checkpoint: format_version " + std::to_string(version) + " unsupported");
    out.kind = manifest.at("kind").get<std::string>();
    out.config = manifest.value("config", nlohmann::json::object());
    std::vector<unsigned char> chars;
    for (int b : manifest.at("vocab")) chars.push_back(static_cast<unsigned char>(b));
    out.vocab = Vocab::from_chars(chars);
    out.content_hash = manifest.at("content_hash").get<std::string>();
    out.hmm_ref = manifest.value("hmm_ref", "");

    Sha256 hasher;
    for (const auto& t : manifest.at("tensors")) {
      const std::string name = t.at("name").get<std::string>();
      LoadedTensor tensor;
      for (const auto& s : t.at("shape"))
        tensor.shape.push_back(s.get<std::size_t>());
      const std::string file = t.at("file").get<std::string>();
      const std::uint64_t offset = t.at("byte_offset").get<std::uint64_t>();
      const std::uint64_t size = t.at("byte_size").get<std::uint64_t>();
      std::size_t numel = 1;
      for (std::size_t s : tensor.shape) numel *= s;
      if (numel * sizeof(double) != size)
        throw CheckpointError(CheckpointError::Kind::bad_manifest,
                              "checkpoint: tensor " + name + " size/shape mismatch");

      const fs::path blob_path = fs::path(dir) / file;
      std::ifstream bf(blob_path, std::ios::binary);
      if (!bf)
        throw CheckpointError(CheckpointError::Kind::missing_file,
                              "checkpoint: missing blob " + blob_path.string());
      bf.seekg(0, std::ios::end);
      const std::uint64_t file_size = static_cast<std::uint64_t>(bf.tellg());
      if (offset + size > file_size)
        throw CheckpointError(CheckpointError::Kind::truncated_blob,
                              "checkpoint: blob " + file + " truncated");
      bf.seekg(static_cast<std::streamoff>(offset));
      tensor.data.resize(numel);
      bf.read(reinterpret_cast<char*>(tensor.data.data()),
              static_cast<std::streamsize>(size));
      if (!bf)
        throw CheckpointError(CheckpointError::Kind::truncated_blob,
                              "checkpoint: blob " + file + " read failed");
      hasher.update(tensor.data.data(), size);
      out.tensor_order.push_back(name);
      out.tensors.emplace(name, std::move(tensor));
    }
    const std::string actual = hasher.hex_digest();
    if (actual != out.content_hash)
      throw CheckpointError(CheckpointError::Kind::hash_mismatch,
                            "checkpoint: content hash mismatch (manifest " +
                                out.content_hash + ", blobs " + actual + ")");
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(CheckpointError::Kind::bad_manifest,
                          std::string("checkpoint: manifest field error: ") + e.what());
  }
  return out;
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_matrix_file: cannot open " + path);
  const std::uint64_t rows = m.rows, cols = m.cols;
  f.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  f.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  f.write(reinterpret_cast<const char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_matrix_file: cannot open " + path);
  std::uint64_t rows = 0, cols = 0;
  f.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  f.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  DenseMatrix m(rows, cols);
  f.read(reinterpret_cast<char*>(m.data.data()),
         static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!f) throw DataError("read_matrix_file: truncated " + path);
  return m;
}

}  // namespace seqlab
