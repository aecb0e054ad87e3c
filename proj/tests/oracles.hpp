// Test-only reference implementations, independent of the library's
// filtering/sampling code paths: brute-force path enumeration for small
// discrete HMMs and a direct multivariate-normal log-density.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "seqlab/hmm.hpp"
#include "seqlab/matrix.hpp"
#include "seqlab/rng.hpp"

namespace oracles {

// All n^T state paths with P(path | y) by direct products.
struct EnumeratedPosterior {
  std::vector<std::vector<std::int32_t>> paths;
  std::vector<double> probs;  // normalized
};

inline EnumeratedPosterior enumerate_posterior(const seqlab::DiscreteHmmParams& params,
                                               const std::vector<std::int32_t>& obs) {
  const std::size_t n = params.n;
  const std::size_t t_len = obs.size();
  std::size_t total = 1;
  for (std::size_t t = 0; t < t_len; ++t) total *= n;

  EnumeratedPosterior out;
  out.paths.reserve(total);
  out.probs.reserve(total);
  double norm = 0.0;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::int32_t> path(t_len);
    std::size_t rem = code;
    for (std::size_t t = 0; t < t_len; ++t) {
      path[t] = static_cast<std::int32_t>(rem % n);
      rem /= n;
    }
    double p = params.pi0[static_cast<std::size_t>(path[0])] *
               params.E(static_cast<std::size_t>(path[0]),
                        static_cast<std::size_t>(obs[0]));
    for (std::size_t t = 1; t < t_len; ++t) {
      p *= params.T_mat(static_cast<std::size_t>(path[t - 1]),
                        static_cast<std::size_t>(path[t])) *
           params.E(static_cast<std::size_t>(path[t]),
                    static_cast<std::size_t>(obs[t]));
    }
    out.paths.push_back(std::move(path));
    out.probs.push_back(p);
    norm += p;
  }
  for (auto& p : out.probs) p /= norm;
  return out;
}

// Smoothing marginals P(x_t = j | y_{1:T}) from the enumeration.
inline seqlab::DenseMatrix enumerate_marginals(const seqlab::DiscreteHmmParams& params,
                                               const std::vector<std::int32_t>& obs) {
  const EnumeratedPosterior post = enumerate_posterior(params, obs);
  seqlab::DenseMatrix marg(obs.size(), params.n, 0.0);
  for (std::size_t k = 0; k < post.paths.size(); ++k)
    for (std::size_t t = 0; t < obs.size(); ++t)
      marg(t, static_cast<std::size_t>(post.paths[k][t])) += post.probs[k];
  return marg;
}

// Filtered P(x_t = j | y_{1:t}) by enumerating prefix paths.
inline seqlab::DenseMatrix enumerate_filtered(const seqlab::DiscreteHmmParams& params,
                                              const std::vector<std::int32_t>& obs) {
  seqlab::DenseMatrix filtered(obs.size(), params.n, 0.0);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    const std::vector<std::int32_t> prefix(obs.begin(), obs.begin() + t + 1);
    const EnumeratedPosterior post = enumerate_posterior(params, prefix);
    for (std::size_t k = 0; k < post.paths.size(); ++k)
      filtered(t, static_cast<std::size_t>(post.paths[k][t])) += post.probs[k];
  }
  return filtered;
}

inline seqlab::DenseMatrix random_stochastic(std::size_t rows, std::size_t cols,
                                             seqlab::RandomSource& rng) {
  seqlab::DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = 0.05 + rng.uniform();
      total += m(r, c);
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) /= total;
  }
  return m;
}

inline seqlab::DiscreteHmmParams random_hmm(std::size_t n, std::size_t v,
                                            seqlab::RandomSource& rng) {
  seqlab::DiscreteHmmParams p;
  p.n = n;
  p.vocab_size = v;
  p.T_mat = random_stochastic(n, n, rng);
  p.E = random_stochastic(n, v, rng);
  const seqlab::DenseMatrix pi = random_stochastic(1, n, rng);
  p.pi0.assign(pi.row(0), pi.row(0) + n);
  return p;
}

// Direct Gauss-Jordan inverse + cofactor-free determinant for the reference
// normal density (small d only).
inline double reference_mvn_logpdf(const std::vector<double>& y,
                                   const std::vector<double>& mu,
                                   const seqlab::DenseMatrix& sigma) {
  const std::size_t d = mu.size();
  // augmented Gauss-Jordan
  std::vector<std::vector<double>> a(d, std::vector<double>(2 * d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = sigma(i, j);
    a[i][d + i] = 1.0;
  }
  double det = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det *= a[col][col];
    const double inv_p = 1.0 / a[col][col];
    for (std::size_t j = 0; j < 2 * d; ++j) a[col][j] *= inv_p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < 2 * d; ++j) a[r][j] -= f * a[col][j];
    }
  }
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      quad += (y[i] - mu[i]) * a[i][d + j] * (y[j] - mu[j]);
  }
  return -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) -
         0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace oracles
