#include "seqlab/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqlab/errors.hpp"
#include "seqlab/kmeans.hpp"
#include "seqlab/linalg.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

DenseMatrix log_matrix(const DenseMatrix& m) {
  DenseMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i)
    out.data[i] = m.data[i] > 0.0 ? std::log(m.data[i]) : kNegInf;
  return out;
}

// Log-space forward filter over a generic emission model.
// filtered (if non-null) receives normalized linear rows p_t.
// step_lognorm (if non-null) receives log P(y_t | y_{1:t-1}) per step.
void forward_filter_core(const DenseMatrix& t_mat, const std::vector<double>& pi0,
                         std::size_t t_len, std::size_t n,
                         const std::function<void(std::size_t, double*)>& log_emis_row,
                         DenseMatrix* filtered, std::vector<double>* step_lognorm) {
  const DenseMatrix log_t_cols = transpose(log_matrix(t_mat));  // row j = log T[:, j]
  std::vector<double> log_prev(n), log_cur(n), emis(n);
  for (std::size_t t = 0; t < t_len; ++t) {
    log_emis_row(t, emis.data());
    if (t == 0) {
      for (std::size_t j = 0; j < n; ++j)
        log_cur[j] = (pi0[j] > 0.0 ? std::log(pi0[j]) : kNegInf) + emis[j];
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        const double* lt = log_t_cols.row(j);
        double mx = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
          const double v = log_prev[i] + lt[i];
          if (v > mx) mx = v;
        }
        if (mx == kNegInf) {
          log_cur[j] = kNegInf;
          continue;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          total += std::exp(log_prev[i] + lt[i] - mx);
        log_cur[j] = emis[j] + mx + std::log(total);
      }
    }
    const double lz = logsumexp(log_cur);
    if (lz == kNegInf)
      throw NumericError("forward_filter: impossible observation at t = " +
                         std::to_string(t));
    if (step_lognorm) step_lognorm->push_back(lz);
    for (std::size_t j = 0; j < n; ++j) {
      log_prev[j] = log_cur[j] - lz;
      if (filtered) (*filtered)(t, j) = std::exp(log_prev[j]);
    }
  }
}

StateSequence backward_sample(const DenseMatrix& filtered, const DenseMatrix& t_mat,
                              RandomSource& rng) {
  const std::size_t t_len = filtered.rows;
  const std::size_t n = filtered.cols;
  StateSequence states(t_len);
  states[t_len - 1] =
      static_cast<std::int32_t>(rng.categorical(filtered.row(t_len - 1), n));
  std::vector<double> w(n);
  for (std::size_t t = t_len - 1; t-- > 0;) {
    const std::size_t next = static_cast<std::size_t>(states[t + 1]);
    const double* p = filtered.row(t);
    for (std::size_t i = 0; i < n; ++i) w[i] = p[i] * t_mat(i, next);
    states[t] = static_cast<std::int32_t>(rng.categorical(w.data(), n));
  }
  return states;
}

std::function<void(std::size_t, double*)> discrete_emitter(
    const DenseMatrix& log_e, std::span<const std::int32_t> obs) {
  return [&log_e, obs](std::size_t t, double* out) {
    const std::size_t y = static_cast<std::size_t>(obs[t]);
    for (std::size_t j = 0; j < log_e.rows; ++j) out[j] = log_e(j, y);
  };
}

void check_obs(std::span<const std::int32_t> obs, std::size_t vocab_size,
               const char* where) {
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 0 || static_cast<std::size_t>(obs[t]) >= vocab_size)
      throw DataError(std::string(where) + ": observation out of vocab range at t = " +
                      std::to_string(t));
  }
}

// Per-state Cholesky factors for Gaussian emission evaluation.
struct GaussianEval {
  std::vector<DenseMatrix> chol;
  std::vector<double> log_norm;  // -d/2 log(2pi) - 1/2 logdet
  std::vector<std::vector<double>> mu;
  std::size_t dim = 0;

  explicit GaussianEval(const ContinuousHmmParams& p) : mu(p.mu), dim(p.dim) {
    chol.reserve(p.n);
    log_norm.reserve(p.n);
    const double c = -0.5 * static_cast<double>(p.dim) * std::log(2.0 * M_PI);
    for (std::size_t j = 0; j < p.n; ++j) {
      chol.push_back(cholesky(p.sigma[j]));
      log_norm.push_back(c - 0.5 * chol_log_det(chol.back()));
    }
  }

  double logpdf(std::size_t j, const double* y, double* work) const {
    for (std::size_t k = 0; k < dim; ++k) work[k] = y[k] - mu[j][k];
    // solve L w = (y - mu); quad = |w|^2
    const DenseMatrix& l = chol[j];
    double quad = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = work[r];
      const double* lr = l.row(r);
      for (std::size_t k = 0; k < r; ++k) acc -= lr[k] * work[k];
      acc /= lr[r];
      work[r] = acc;
      quad += acc * acc;
    }
    return log_norm[j] - 0.5 * quad;
  }
};

std::vector<double> smoothed_initial(const StateSequence& states, std::size_t n,
                                     double alpha) {
  std::vector<double> pi0(n, alpha);
  pi0[static_cast<std::size_t>(states[0])] += 1.0;
  const double total = 1.0 + alpha * static_cast<double>(n);
  for (auto& v : pi0) v /= total;
  return pi0;
}

double trace_mean(const std::vector<double>& step_lognorm) {
  // predictive mean excludes the first observation (no prediction made for it)
  double acc = 0.0;
  for (std::size_t t = 1; t < step_lognorm.size(); ++t) acc += step_lognorm[t];
  return acc / static_cast<double>(step_lognorm.size() - 1);
}

}  // namespace

NiwParams default_niw(std::size_t dim) {
  NiwParams p;
  p.mu0.assign(dim, 0.0);
  p.kappa0 = 1.0;
  p.nu0 = static_cast<double>(dim) + 2.0;
  p.psi0 = DenseMatrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) p.psi0(i, i) = 1.0;
  return p;
}

StateSequence init_states_discrete(std::size_t t_len, std::size_t n,
                                   RandomSource& rng) {
  if (t_len < 1 || n < 1)
    throw NumericError("init_states_discrete: need t_len >= 1 and n >= 1");
  StateSequence states(t_len);
  for (auto& s : states) s = static_cast<std::int32_t>(rng.uniform_index(n));
  return states;
}

StateSequence init_states_continuous(const DenseMatrix& hidden, std::size_t n,
                                     RandomSource& rng) {
  return kmeans(hidden, n, rng).assignments;
}

DenseMatrix count_transitions(const StateSequence& states, std::size_t n) {
  DenseMatrix counts(n, n, 0.0);
  for (std::size_t t = 0; t + 1 < states.size(); ++t)
    counts(static_cast<std::size_t>(states[t]),
           static_cast<std::size_t>(states[t + 1])) += 1.0;
  return counts;
}

DenseMatrix emission_counts(const StateSequence& states,
                            std::span<const std::int32_t> obs, std::size_t n,
                            std::size_t vocab_size) {
  DenseMatrix counts(n, vocab_size, 0.0);
  for (std::size_t t = 0; t < states.size(); ++t)
    counts(static_cast<std::size_t>(states[t]),
           static_cast<std::size_t>(obs[t])) += 1.0;
  return counts;
}

DenseMatrix sample_dirichlet_rows(const DenseMatrix& counts, double alpha,
                                  RandomSource& rng) {
  if (!(alpha > 0.0)) throw NumericError("sample_dirichlet_rows: alpha must be > 0");
  DenseMatrix out(counts.rows, counts.cols);
  std::vector<double> conc(counts.cols);
  for (std::size_t r = 0; r < counts.rows; ++r) {
    for (std::size_t c = 0; c < counts.cols; ++c) conc[c] = counts(r, c) + alpha;
    const std::vector<double> row = rng.dirichlet(conc);
    std::copy(row.begin(), row.end(), out.row(r));
  }
  return out;
}

NiwParams niw_posterior(const NiwParams& prior, const DenseMatrix& obs,
                        std::span<const std::size_t> row_indices) {
  const std::size_t d = prior.mu0.size();
  const double m = static_cast<double>(row_indices.size());
  NiwParams post;
  post.kappa0 = prior.kappa0 + m;
  post.nu0 = prior.nu0 + m;
  post.mu0.assign(d, 0.0);
  post.psi0 = prior.psi0;
  if (row_indices.empty()) {
    post.mu0 = prior.mu0;
    return post;
  }
  std::vector<double> ybar(d, 0.0);
  for (std::size_t idx : row_indices) {
    const double* y = obs.row(idx);
    for (std::size_t k = 0; k < d; ++k) ybar[k] += y[k];
  }
  for (auto& v : ybar) v /= m;
  // scatter about the sample mean
  std::vector<double> diff(d);
  for (std::size_t idx : row_indices) {
    const double* y = obs.row(idx);
    for (std::size_t k = 0; k < d; ++k) diff[k] = y[k] - ybar[k];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) post.psi0(i, j) += diff[i] * diff[j];
  }
  const double shrink = prior.kappa0 * m / post.kappa0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      post.psi0(i, j) +=
          shrink * (ybar[i] - prior.mu0[i]) * (ybar[j] - prior.mu0[j]);
  for (std::size_t k = 0; k < d; ++k)
    post.mu0[k] = (prior.kappa0 * prior.mu0[k] + m * ybar[k]) / post.kappa0;
  return post;
}

std::pair<std::vector<double>, DenseMatrix> sample_niw(const NiwParams& posterior,
                                                       RandomSource& rng) {
  const std::size_t d = posterior.mu0.size();
  if (posterior.nu0 <= static_cast<double>(d) - 1.0)
    throw NumericError("sample_niw: nu must exceed d - 1");
  // Sigma ~ IW(nu, psi): draw X ~ Wishart(nu, psi^{-1}) by Bartlett, invert.
  const DenseMatrix scale = spd_inverse(posterior.psi0);
  const DenseMatrix lv = cholesky(scale);
  DenseMatrix a(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    a(i, i) = std::sqrt(rng.chi_square(posterior.nu0 - static_cast<double>(i)));
  for (std::size_t i = 1; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = rng.gaussian();
  // M = Lv * A (both lower-triangular)
  DenseMatrix m(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = j; k <= i; ++k) acc += lv(i, k) * a(k, j);
      m(i, j) = acc;
    }
  DenseMatrix x(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) acc += m(i, k) * m(j, k);
      x(i, j) = acc;
      x(j, i) = acc;
    }
  DenseMatrix sigma = spd_inverse(x);
  // mu ~ N(mu_n, Sigma / kappa_n)
  const DenseMatrix ls = cholesky(sigma);
  std::vector<double> z(d);
  for (auto& v : z) v = rng.gaussian();
  std::vector<double> mu(posterior.mu0);
  const double inv_sqrt_kappa = 1.0 / std::sqrt(posterior.kappa0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k <= i; ++k) acc += ls(i, k) * z[k];
    mu[i] += acc * inv_sqrt_kappa;
  }
  return {std::move(mu), std::move(sigma)};
}

void sample_emissions_continuous(const DenseMatrix& obs, const StateSequence& states,
                                 std::size_t n, const NiwParams& prior,
                                 RandomSource& rng,
                                 std::vector<std::vector<double>>* mu_out,
                                 std::vector<DenseMatrix>* sigma_out) {
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t t = 0; t < states.size(); ++t)
    groups[static_cast<std::size_t>(states[t])].push_back(t);
  mu_out->resize(n);
  sigma_out->resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const NiwParams post = niw_posterior(prior, obs, groups[j]);
    auto [mu, sigma] = sample_niw(post, rng);
    (*mu_out)[j] = std::move(mu);
    (*sigma_out)[j] = std::move(sigma);
  }
}

double mvn_logpdf(std::span<const double> y, std::span<const double> mu,
                  const DenseMatrix& sigma) {
  const std::size_t d = mu.size();
  const DenseMatrix l = cholesky(sigma);
  std::vector<double> w(d);
  for (std::size_t k = 0; k < d; ++k) w[k] = y[k] - mu[k];
  std::vector<double> solved(d);
  forward_subst(l, w.data(), solved.data());
  double quad = 0.0;
  for (double v : solved) quad += v * v;
  return -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) -
         0.5 * chol_log_det(l) - 0.5 * quad;
}

StateSequence ffbs_sample(const DiscreteHmmParams& params,
                          std::span<const std::int32_t> obs, RandomSource& rng) {
  if (obs.empty()) throw DataError("ffbs_sample: empty observation sequence");
  check_obs(obs, params.vocab_size, "ffbs_sample");
  const DenseMatrix log_e = log_matrix(params.E);
  DenseMatrix filtered(obs.size(), params.n);
  forward_filter_core(params.T_mat, params.pi0, obs.size(), params.n,
                      discrete_emitter(log_e, obs), &filtered, nullptr);
  return backward_sample(filtered, params.T_mat, rng);
}

StateSequence ffbs_sample(const ContinuousHmmParams& params, const DenseMatrix& obs,
                          RandomSource& rng) {
  if (obs.rows == 0) throw DataError("ffbs_sample: empty observation sequence");
  if (obs.cols != params.dim) throw DataError("ffbs_sample: dimension mismatch");
  const GaussianEval ge(params);
  DenseMatrix filtered(obs.rows, params.n);
  std::vector<double> work(params.dim);
  forward_filter_core(
      params.T_mat, params.pi0, obs.rows, params.n,
      [&](std::size_t t, double* out) {
        for (std::size_t j = 0; j < params.n; ++j)
          out[j] = ge.logpdf(j, obs.row(t), work.data());
      },
      &filtered, nullptr);
  return backward_sample(filtered, params.T_mat, rng);
}

GibbsResult gibbs_train_discrete(
    std::span<const std::int32_t> obs, std::size_t n, std::size_t vocab_size,
    std::size_t iters, const HmmHyper& hyper, RandomSource& rng,
    const std::function<void(const DiscreteHmmParams&)>& observer) {
  if (iters < 1) throw DataError("gibbs_train_discrete: iters must be >= 1");
  if (obs.size() < 2) throw DataError("gibbs_train_discrete: need >= 2 observations");
  for (auto y : obs) {
    if (y < 0 || static_cast<std::size_t>(y) >= vocab_size)
      throw DataError("gibbs_train_discrete: observation out of vocab range");
  }

  // one substream per consumer, so adding a draw in one stage never
  // perturbs the others
  RandomSource rng_init = rng.substream("init-states");
  RandomSource rng_rows = rng.substream("dirichlet");
  RandomSource rng_ffbs = rng.substream("ffbs");

  GibbsResult res;
  res.params.n = n;
  res.params.vocab_size = vocab_size;
  StateSequence states = init_states_discrete(obs.size(), n, rng_init);
  for (std::size_t it = 0; it < iters; ++it) {
    res.params.T_mat =
        sample_transitions(count_transitions(states, n), hyper.alpha, rng_rows);
    res.params.E = sample_emissions_discrete(emission_counts(states, obs, n, vocab_size),
                                             hyper.beta, rng_rows);
    res.params.pi0 = smoothed_initial(states, n, hyper.alpha);
    if (observer) observer(res.params);

    const DenseMatrix log_e = log_matrix(res.params.E);
    DenseMatrix filtered(obs.size(), n);
    std::vector<double> lognorm;
    lognorm.reserve(obs.size());
    forward_filter_core(res.params.T_mat, res.params.pi0, obs.size(), n,
                        discrete_emitter(log_e, obs), &filtered, &lognorm);
    res.train_predictive_trace.push_back(trace_mean(lognorm));
    states = backward_sample(filtered, res.params.T_mat, rng_ffbs);
  }
  res.final_states = std::move(states);
  return res;
}

GibbsContinuousResult gibbs_train_continuous(
    const DenseMatrix& obs, std::size_t n, std::size_t iters, const HmmHyper& hyper,
    RandomSource& rng,
    const std::function<void(const ContinuousHmmParams&)>& observer) {
  if (iters < 1) throw DataError("gibbs_train_continuous: iters must be >= 1");
  if (obs.rows < 2) throw DataError("gibbs_train_continuous: need >= 2 observations");
  const std::size_t d = obs.cols;
  const NiwParams prior = hyper.niw.mu0.empty() ? default_niw(d) : hyper.niw;

  RandomSource rng_init = rng.substream("kmeans-init");
  RandomSource rng_rows = rng.substream("dirichlet");
  RandomSource rng_niw = rng.substream("niw");
  RandomSource rng_ffbs = rng.substream("ffbs");

  GibbsContinuousResult res;
  res.params.n = n;
  res.params.dim = d;
  StateSequence states = init_states_continuous(obs, n, rng_init);
  for (std::size_t it = 0; it < iters; ++it) {
    res.params.T_mat =
        sample_transitions(count_transitions(states, n), hyper.alpha, rng_rows);
    sample_emissions_continuous(obs, states, n, prior, rng_niw, &res.params.mu,
                                &res.params.sigma);
    res.params.pi0 = smoothed_initial(states, n, hyper.alpha);
    if (observer) observer(res.params);

    const GaussianEval ge(res.params);
    DenseMatrix filtered(obs.rows, n);
    std::vector<double> work(d);
    std::vector<double> lognorm;
    lognorm.reserve(obs.rows);
    forward_filter_core(
        res.params.T_mat, res.params.pi0, obs.rows, n,
        [&](std::size_t t, double* out) {
          for (std::size_t j = 0; j < n; ++j)
            out[j] = ge.logpdf(j, obs.row(t), work.data());
        },
        &filtered, &lognorm);
    res.train_predictive_trace.push_back(trace_mean(lognorm));
    states = backward_sample(filtered, res.params.T_mat, rng_ffbs);
  }
  res.final_states = std::move(states);
  return res;
}

StateDistSeq forward_filter(const DiscreteHmmParams& params,
                            std::span<const std::int32_t> obs) {
  if (obs.empty()) throw DataError("forward_filter: empty observation sequence");
  check_obs(obs, params.vocab_size, "forward_filter");
  const DenseMatrix log_e = log_matrix(params.E);
  StateDistSeq out;
  out.dists = DenseMatrix(obs.size(), params.n);
  forward_filter_core(params.T_mat, params.pi0, obs.size(), params.n,
                      discrete_emitter(log_e, obs), &out.dists, nullptr);
  return out;
}

StateDistSeq forward_filter(const ContinuousHmmParams& params, const DenseMatrix& obs) {
  if (obs.rows == 0) throw DataError("forward_filter: empty observation sequence");
  if (obs.cols != params.dim) throw DataError("forward_filter: dimension mismatch");
  const GaussianEval ge(params);
  StateDistSeq out;
  out.dists = DenseMatrix(obs.rows, params.n);
  std::vector<double> work(params.dim);
  forward_filter_core(
      params.T_mat, params.pi0, obs.rows, params.n,
      [&](std::size_t t, double* o) {
        for (std::size_t j = 0; j < params.n; ++j)
          o[j] = ge.logpdf(j, obs.row(t), work.data());
      },
      &out.dists, nullptr);
  return out;
}

double predictive_loglik(const DiscreteHmmParams& params,
                         std::span<const std::int32_t> obs) {
  if (obs.size() < 2) throw DataError("predictive_loglik: need >= 2 observations");
  check_obs(obs, params.vocab_size, "predictive_loglik");
  const DenseMatrix log_e = log_matrix(params.E);
  std::vector<double> lognorm;
  lognorm.reserve(obs.size());
  forward_filter_core(params.T_mat, params.pi0, obs.size(), params.n,
                      discrete_emitter(log_e, obs), nullptr, &lognorm);
  return trace_mean(lognorm);
}

double predictive_loglik(const ContinuousHmmParams& params, const DenseMatrix& obs) {
  if (obs.rows < 2) throw DataError("predictive_loglik: need >= 2 observations");
  const GaussianEval ge(params);
  std::vector<double> work(params.dim);
  std::vector<double> lognorm;
  lognorm.reserve(obs.rows);
  forward_filter_core(
      params.T_mat, params.pi0, obs.rows, params.n,
      [&](std::size_t t, double* o) {
        for (std::size_t j = 0; j < params.n; ++j)
          o[j] = ge.logpdf(j, obs.row(t), work.data());
      },
      nullptr, &lognorm);
  return trace_mean(lognorm);
}

std::vector<double> predictive_dist(const DiscreteHmmParams& params,
                                    std::span<const double> p) {
  std::vector<double> q(params.n, 0.0);
  for (std::size_t i = 0; i < params.n; ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    const double* row = params.T_mat.row(i);
    for (std::size_t j = 0; j < params.n; ++j) q[j] += pi * row[j];
  }
  std::vector<double> out(params.vocab_size, 0.0);
  for (std::size_t j = 0; j < params.n; ++j) {
    const double qj = q[j];
    if (qj == 0.0) continue;
    const double* row = params.E.row(j);
    for (std::size_t v = 0; v < params.vocab_size; ++v) out[v] += qj * row[v];
  }
  return out;
}

}  // namespace seqlab
