#include "seqlab/rng.hpp"

#include <cmath>

#include "seqlab/errors.hpp"

namespace seqlab {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : base_seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

RandomSource RandomSource::substream(std::string_view name) const {
  std::uint64_t sm = base_seed_ ^ fnv1a64(name);
  return RandomSource(splitmix64(sm));
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomSource::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RandomSource::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) throw NumericError("uniform_index: n must be >= 1");
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double RandomSource::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RandomSource::gamma(double shape) {
  if (!(shape > 0.0)) throw NumericError("gamma: shape must be > 0");
  if (shape < 1.0) {
    const double u = uniform_pos();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

double RandomSource::chi_square(double dof) {
  return 2.0 * gamma(0.5 * dof);
}

std::vector<double> RandomSource::dirichlet(const std::vector<double>& alpha) {
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    total += out[i];
  }
  if (total <= 0.0) {
    // all gammas underflowed; fall back to uniform
    const double u = 1.0 / static_cast<double>(alpha.size());
    for (auto& v : out) v = u;
    return out;
  }
  for (auto& v : out) v /= total;
  return out;
}

std::size_t RandomSource::categorical(const double* weights, std::size_t n) {
  if (n == 0) throw NumericError("categorical: empty weight vector");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weights[i];
  if (!(total > 0.0))
    throw NumericError("categorical: weights sum to zero");
  const double r = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  // fp residue: return the last index with positive weight
  for (std::size_t i = n; i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return n - 1;
}

}  // namespace seqlab
