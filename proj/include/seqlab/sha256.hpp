#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace seqlab {

// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
 public:
  Sha256();
  void update(const void* data, std::size_t len);
  std::string hex_digest();  // finalizes; call once

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t state_[8];
  std::uint64_t bit_len_ = 0;
  std::uint8_t buffer_[64];
  std::size_t buffer_len_ = 0;
};

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file_hex(const std::string& path);

}  // namespace seqlab
