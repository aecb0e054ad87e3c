#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace seqlab {

// Reproducible PRNG: xoshiro256** seeded through splitmix64. Every draw is
// built from integer operations plus IEEE double arithmetic, so identical
// seeds give bitwise-identical sequences on any conforming platform.
//
// Substreams: substream(name) derives a child source from (base seed, name)
// only — never from the parent's draw position — so adding a consumer never
// perturbs the streams handed to existing consumers.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return base_seed_; }

  // Child stream keyed by consumer name (FNV-1a hash of name mixed into seed).
  RandomSource substream(std::string_view name) const;

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform on (0, 1), never exactly zero.
  double uniform_pos();
  // Uniform integer in [0, n), n >= 1. Lemire multiply-shift mapping.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Marsaglia polar method (one spare cached).
  double gaussian();
  // Gamma(shape, scale 1), shape > 0. Marsaglia-Tsang squeeze.
  double gamma(double shape);
  double chi_square(double dof);

  // Dirichlet draw: normalized independent gammas.
  std::vector<double> dirichlet(const std::vector<double>& alpha);

  // Index draw proportional to nonnegative weights (need not be normalized).
  std::size_t categorical(const double* weights, std::size_t n);

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t base_seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace seqlab
