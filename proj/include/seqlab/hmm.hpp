#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seqlab/matrix.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

struct DiscreteHmmParams {
  std::size_t n = 0;           // states
  std::size_t vocab_size = 0;  // V
  DenseMatrix T_mat;           // n x n, row-stochastic
  DenseMatrix E;               // n x V, row-stochastic
  std::vector<double> pi0;     // n
};

// Normal-Inverse-Wishart parameters (prior or posterior).
struct NiwParams {
  std::vector<double> mu0;
  double kappa0 = 1.0;
  double nu0 = 0.0;
  DenseMatrix psi0;
};

// Weakly informative default: mu0 = 0, kappa0 = 1, nu0 = d + 2, psi0 = I.
NiwParams default_niw(std::size_t dim);

struct HmmHyper {
  double alpha = 1.0;  // Dirichlet concentration, transition rows
  double beta = 0.1;   // Dirichlet concentration, discrete emission rows
  NiwParams niw;       // continuous emissions; empty mu0 means "use default_niw(d)"
};

struct ContinuousHmmParams {
  std::size_t n = 0;
  std::size_t dim = 0;
  DenseMatrix T_mat;
  std::vector<double> pi0;
  std::vector<std::vector<double>> mu;  // n vectors of length dim
  std::vector<DenseMatrix> sigma;       // n PSD matrices dim x dim
};

using StateSequence = std::vector<std::int32_t>;

struct StateDistSeq {
  DenseMatrix dists;  // T x n, row t = P(x_t | y_{1:t})
};

// i.i.d. uniform states over 0..n-1.
StateSequence init_states_discrete(std::size_t t_len, std::size_t n, RandomSource& rng);
// k-means assignments over hidden-state rows (k = n).
StateSequence init_states_continuous(const DenseMatrix& hidden, std::size_t n,
                                     RandomSource& rng);

// Exact joint posterior draw of the state path via forward filtering (log
// space) / backward sampling. Throws NumericError naming t when an
// observation has zero probability under every state.
StateSequence ffbs_sample(const DiscreteHmmParams& params,
                          std::span<const std::int32_t> obs, RandomSource& rng);
StateSequence ffbs_sample(const ContinuousHmmParams& params, const DenseMatrix& obs,
                          RandomSource& rng);

// n_ij = #{t : x_t = i, x_{t+1} = j}.
DenseMatrix count_transitions(const StateSequence& states, std::size_t n);
// counts(i, v) = #{t : x_t = i, y_t = v}.
DenseMatrix emission_counts(const StateSequence& states,
                            std::span<const std::int32_t> obs, std::size_t n,
                            std::size_t vocab_size);

// Row i ~ Dirichlet(counts_i + alpha), rows independent.
DenseMatrix sample_dirichlet_rows(const DenseMatrix& counts, double alpha,
                                  RandomSource& rng);
inline DenseMatrix sample_transitions(const DenseMatrix& counts, double alpha,
                                      RandomSource& rng) {
  return sample_dirichlet_rows(counts, alpha, rng);
}
inline DenseMatrix sample_emissions_discrete(const DenseMatrix& counts, double beta,
                                             RandomSource& rng) {
  return sample_dirichlet_rows(counts, beta, rng);
}

// Standard conjugate update of (mu0, kappa0, nu0, psi0) with m observations.
NiwParams niw_posterior(const NiwParams& prior, const DenseMatrix& obs,
                        std::span<const std::size_t> row_indices);
// Draw Sigma ~ IW(nu, psi) (Bartlett), then mu ~ N(mu0, Sigma/kappa).
std::pair<std::vector<double>, DenseMatrix> sample_niw(const NiwParams& posterior,
                                                       RandomSource& rng);
// Per-state NIW posterior draws; states with no observations draw from the prior.
void sample_emissions_continuous(const DenseMatrix& obs, const StateSequence& states,
                                 std::size_t n, const NiwParams& prior,
                                 RandomSource& rng,
                                 std::vector<std::vector<double>>* mu_out,
                                 std::vector<DenseMatrix>* sigma_out);

// Multivariate normal log-density (reference-grade; factors sigma per call).
double mvn_logpdf(std::span<const double> y, std::span<const double> mu,
                  const DenseMatrix& sigma);

struct GibbsResult {
  DiscreteHmmParams params;
  std::vector<double> train_predictive_trace;  // per iteration, nats/char
  StateSequence final_states;
};

struct GibbsContinuousResult {
  ContinuousHmmParams params;
  std::vector<double> train_predictive_trace;
  StateSequence final_states;
};

// Blocked Gibbs: initialize states, then per iteration sample (transitions,
// emissions, pi0) from the current states and FFBS-resample the state path.
// The trace entry is the mean next-step predictive log-likelihood of the
// training sequence under that iteration's parameters. The optional observer
// sees each iteration's sampled parameters.
GibbsResult gibbs_train_discrete(
    std::span<const std::int32_t> obs, std::size_t n, std::size_t vocab_size,
    std::size_t iters, const HmmHyper& hyper, RandomSource& rng,
    const std::function<void(const DiscreteHmmParams&)>& observer = {});

GibbsContinuousResult gibbs_train_continuous(
    const DenseMatrix& obs, std::size_t n, std::size_t iters, const HmmHyper& hyper,
    RandomSource& rng,
    const std::function<void(const ContinuousHmmParams&)>& observer = {});

// Causal filtered distributions p_t = P(x_t | y_{1:t}), log-space recursion.
StateDistSeq forward_filter(const DiscreteHmmParams& params,
                            std::span<const std::int32_t> obs);
StateDistSeq forward_filter(const ContinuousHmmParams& params, const DenseMatrix& obs);

// Mean over t of ln P(y_{t+1} | p_t), nats per prediction. Requires >= 2 obs.
double predictive_loglik(const DiscreteHmmParams& params,
                         std::span<const std::int32_t> obs);
double predictive_loglik(const ContinuousHmmParams& params, const DenseMatrix& obs);

// P(y | p) for every symbol y: composes p through transitions and emissions.
std::vector<double> predictive_dist(const DiscreteHmmParams& params,
                                    std::span<const double> p);

}  // namespace seqlab
