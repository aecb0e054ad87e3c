#pragma once

#include <stdexcept>
#include <string>

namespace seqlab {

// Bad or missing input data (files, corpora, malformed configs).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-finite values, impossible observations, degenerate inputs.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Checkpoint load/store failures, with a machine-checkable kind.
class CheckpointError : public std::runtime_error {
 public:
  enum class Kind {
    version_mismatch,
    hash_mismatch,
    truncated_blob,
    missing_file,
    bad_manifest,
  };

  CheckpointError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace seqlab
