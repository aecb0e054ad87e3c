#include "seqlab/hybrid.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab {

namespace {

// dz += s * (ds - <ds, s>) for one softmax row.
void softmax_backward_row(const double* s, const double* ds, double* dz,
                          std::size_t n) {
  double dot = 0.0;
  for (std::size_t k = 0; k < n; ++k) dot += ds[k] * s[k];
  for (std::size_t k = 0; k < n; ++k) dz[k] += s[k] * (ds[k] - dot);
}

std::vector<double> softmax_vector(const std::vector<double>& z) {
  std::vector<double> s(z);
  softmax_inplace(s.data(), s.size());
  return s;
}

double log_prob_of(const double* logits, std::size_t n, std::size_t target) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < n; ++v) mx = std::max(mx, logits[v]);
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) total += std::exp(logits[v] - mx);
  return logits[target] - mx - std::log(total);
}

}  // namespace

DenseMatrix augmented_output(const HybridParams& params) {
  const std::size_t v_size = params.lstm.vocab_size;
  const std::size_t h = params.lstm.hidden_dim;
  DenseMatrix out(v_size, h + params.n_hmm);
  for (std::size_t r = 0; r < v_size; ++r) {
    double* row = out.row(r);
    std::memcpy(row, params.lstm.W_out.row(r), h * sizeof(double));
    std::memcpy(row + h, params.W_hmm.row(r), params.n_hmm * sizeof(double));
  }
  return out;
}

HmmFeatureTrack precompute_hmm_track(const DiscreteHmmParams& hmm,
                                     const EncodedCorpus& corpus) {
  HmmFeatureTrack track;
  track.dists = forward_filter(hmm, corpus.ids).dists;
  return track;
}

DenseMatrix hybrid_forward(const HybridParams& params,
                           std::span<const std::int32_t> ids,
                           const HmmFeatureTrack& track, std::size_t pos0,
                           const LstmState& state0) {
  if (pos0 + ids.size() > track.dists.rows)
    throw DataError("hybrid_forward: track does not cover the requested positions");
  if (track.dists.cols != params.n_hmm)
    throw DataError("hybrid_forward: track width != n_hmm");
  const std::size_t v_size = params.lstm.vocab_size;
  DenseMatrix logits(ids.size(), v_size);
  LstmState state = state0;
  std::vector<double> scratch;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double* h_top = lstm_step_inplace(params.lstm, ids[t], state, scratch);
    double* lg = logits.row(t);
    matvec(params.lstm.W_out, h_top, lg);
    const double* p = track.dists.row(pos0 + t);
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = params.lstm.b_out[v];
      for (std::size_t j = 0; j < params.n_hmm; ++j) acc += wrow[j] * p[j];
      lg[v] += acc;
    }
  }
  return logits;
}

HybridLossGrad hybrid_loss_grad(const HybridParams& params,
                                std::span<const std::int32_t> window,
                                const HmmFeatureTrack& track, std::size_t pos0,
                                const LstmState& state0) {
  if (window.size() < 2) throw DataError("hybrid_loss_grad: window length < 2");
  if (pos0 + window.size() - 1 > track.dists.rows)
    throw DataError("hybrid_loss_grad: track does not cover the window");
  const std::size_t v_size = params.lstm.vocab_size;
  const std::size_t n = params.n_hmm;

  HybridLossGrad out;
  out.grads.W_hmm = DenseMatrix(v_size, n);

  BpttHooks hooks;
  hooks.augment_logits = [&](std::size_t t, double* logits) {
    const double* p = track.dists.row(pos0 + t);
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * p[j];
      logits[v] += acc;
    }
  };
  hooks.backprop_logits = [&](std::size_t t, const double* dlogits) {
    const double* p = track.dists.row(pos0 + t);
    outer_add(out.grads.W_hmm, dlogits, p);
  };

  LstmLossGrad base = lstm_loss_grad_hooked(params.lstm, window, state0, hooks);
  out.nll = base.nll;
  out.grads.lstm = std::move(base.grads);
  out.state = std::move(base.state);
  return out;
}

HybridParams init_hybrid_params(std::size_t vocab_size, const LstmConfig& config,
                                std::size_t n_hmm, RandomSource& rng) {
  HybridParams p;
  p.lstm = init_lstm_params(vocab_size, config, rng);
  p.n_hmm = n_hmm;
  p.W_hmm = DenseMatrix(vocab_size, n_hmm);
  for (auto& v : p.W_hmm.data) v = rng.uniform(-0.08, 0.08);
  return p;
}

std::vector<std::span<double>> param_tensors(HybridParams& p) {
  auto out = param_tensors(p.lstm);
  out.emplace_back(p.W_hmm.data);
  return out;
}

std::vector<double> flatten_params(const HybridParams& p) {
  std::vector<double> flat = flatten_params(p.lstm);
  flat.insert(flat.end(), p.W_hmm.data.begin(), p.W_hmm.data.end());
  return flat;
}

void unflatten_params(HybridParams& p, std::span<const double> flat) {
  std::size_t off = 0;
  for (auto& t : param_tensors(p)) {
    std::copy(flat.begin() + off, flat.begin() + off + t.size(), t.begin());
    off += t.size();
  }
  if (off != flat.size()) throw NumericError("unflatten_params: size mismatch");
}

std::pair<HybridParams, TrainTrace> train_sequential_hybrid(
    const LstmConfig& config, const EncodedCorpus& corpus,
    const DiscreteHmmParams& hmm, RandomSource& rng,
    const HmmFeatureTrack* cached_track) {
  const Range train = corpus.train_range;
  if (train.length() < 2) throw DataError("train_sequential_hybrid: train range too short");
  if (hmm.vocab_size < corpus.vocab.size())
    throw DataError("train_sequential_hybrid: HMM emission table is narrower than the corpus vocab");

  const HmmFeatureTrack track =
      cached_track ? *cached_track : precompute_hmm_track(hmm, corpus);
  RandomSource rng_init = rng.substream("hybrid-init");
  HybridParams params = init_hybrid_params(corpus.vocab.size(), config, hmm.n, rng_init);
  TrainTrace trace;
  double lr = config.lr0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    LstmState state = zero_state(params.lstm);
    std::size_t pos = train.begin;
    double ll_sum = 0.0;
    std::size_t preds = 0;
    while (pos + 1 < train.end) {
      const std::size_t len = std::min(config.bptt_len, train.end - 1 - pos);
      std::span<const std::int32_t> window(corpus.ids.data() + pos, len + 1);
      HybridLossGrad res = hybrid_loss_grad(params, window, track, pos, state);
      auto tensors = param_tensors(res.grads.lstm);
      tensors.emplace_back(res.grads.W_hmm.data);
      clip_tensor_list(tensors, config.clip_threshold);
      axpy_params(params.lstm, res.grads.lstm, -lr);
      for (std::size_t i = 0; i < params.W_hmm.data.size(); ++i)
        params.W_hmm.data[i] -= lr * res.grads.W_hmm.data[i];
      state = std::move(res.state);
      ll_sum += -res.nll * static_cast<double>(len);
      preds += len;
      pos += len;
    }
    const double l_t = ll_sum / static_cast<double>(preds);
    trace.epoch_loglik.push_back(l_t);
    trace.epoch_lr.push_back(lr);
    if (epoch >= 1 && lr_should_halve(trace.epoch_loglik[epoch - 1], l_t)) lr *= 0.5;
  }
  trace.final_valid_loglik =
      corpus.valid_range.length() >= 2
          ? eval_hybrid(params, corpus, corpus.valid_range, track)
          : std::numeric_limits<double>::quiet_NaN();
  return {std::move(params), std::move(trace)};
}

double eval_hybrid(const HybridParams& params, const EncodedCorpus& corpus,
                   Range range, const HmmFeatureTrack& track) {
  if (range.length() < 2) throw DataError("eval_hybrid: range too short");
  if (range.end > track.dists.rows + 1)
    throw DataError("eval_hybrid: track does not cover the range");
  const std::size_t v_size = params.lstm.vocab_size;
  LstmState state = zero_state(params.lstm);
  std::vector<double> scratch, logits(v_size);
  double ll = 0.0;
  for (std::size_t pos = range.begin; pos + 1 < range.end; ++pos) {
    const double* h_top = lstm_step_inplace(params.lstm, corpus.ids[pos], state, scratch);
    matvec(params.lstm.W_out, h_top, logits.data());
    const double* p = track.dists.row(pos);
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = params.lstm.b_out[v];
      for (std::size_t j = 0; j < params.n_hmm; ++j) acc += wrow[j] * p[j];
      logits[v] += acc;
    }
    ll += log_prob_of(logits.data(), v_size,
                      static_cast<std::size_t>(corpus.ids[pos + 1]));
  }
  return ll / static_cast<double>(range.length() - 1);
}

JointHybridState joint_zero_state(const JointHybridParams& params) {
  JointHybridState s;
  s.lstm = zero_state(params.lstm);
  s.filter.assign(params.n_hmm, 0.0);
  s.fresh = true;
  return s;
}

JointHybridParams init_joint_hybrid_params(std::size_t vocab_size,
                                           const LstmConfig& config,
                                           std::size_t n_hmm, RandomSource& rng) {
  JointHybridParams p;
  p.lstm = init_lstm_params(vocab_size, config, rng);
  p.n_hmm = n_hmm;
  p.W_hmm = DenseMatrix(vocab_size, n_hmm);
  for (auto& v : p.W_hmm.data) v = rng.uniform(-0.08, 0.08);
  p.trans_logits = DenseMatrix(n_hmm, n_hmm);
  for (auto& v : p.trans_logits.data) v = rng.uniform(-0.08, 0.08);
  p.emis_logits = DenseMatrix(n_hmm, vocab_size);
  for (auto& v : p.emis_logits.data) v = rng.uniform(-0.08, 0.08);
  p.init_logits.resize(n_hmm);
  for (auto& v : p.init_logits) v = rng.uniform(-0.08, 0.08);
  return p;
}

namespace {

struct JointFilterCache {
  DenseMatrix u;  // L x n, pre-emission predictive weights
  DenseMatrix p;  // L x n, normalized filtered distributions
  std::vector<double> s;  // L, normalizers
  std::vector<double> entry_filter;  // p_{-1} carried into the window
  bool entry_fresh = false;
};

// Runs the linear-space filter over inputs obs[0..len-1].
JointFilterCache joint_filter_forward(const DenseMatrix& t_lin, const DenseMatrix& e_lin,
                                      const std::vector<double>& pi_lin,
                                      std::span<const std::int32_t> obs,
                                      std::size_t len, const JointHybridState& state) {
  const std::size_t n = pi_lin.size();
  JointFilterCache cache;
  cache.u = DenseMatrix(len, n);
  cache.p = DenseMatrix(len, n);
  cache.s.resize(len);
  cache.entry_filter = state.filter;
  cache.entry_fresh = state.fresh;
  std::vector<double> prev = state.filter;
  for (std::size_t t = 0; t < len; ++t) {
    double* u = cache.u.row(t);
    if (t == 0 && state.fresh) {
      std::copy(pi_lin.begin(), pi_lin.end(), u);
    } else {
      const double* src = t == 0 ? prev.data() : cache.p.row(t - 1);
      for (std::size_t j = 0; j < n; ++j) u[j] = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double pi_val = src[i];
        if (pi_val == 0.0) continue;
        const double* trow = t_lin.row(i);
        for (std::size_t j = 0; j < n; ++j) u[j] += pi_val * trow[j];
      }
    }
    const std::size_t y = static_cast<std::size_t>(obs[t]);
    double* p = cache.p.row(t);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = u[j] * e_lin(j, y);
      total += p[j];
    }
    if (!(total > 0.0))
      throw NumericError("joint filter: zero normalizer at step " + std::to_string(t));
    cache.s[t] = total;
    for (std::size_t j = 0; j < n; ++j) p[j] /= total;
  }
  return cache;
}

}  // namespace

DenseMatrix joint_hybrid_forward(const JointHybridParams& params,
                                 std::span<const std::int32_t> ids,
                                 JointHybridState* state) {
  const std::size_t v_size = params.lstm.vocab_size;
  const std::size_t n = params.n_hmm;
  const DenseMatrix t_lin = softmax_rows(params.trans_logits);
  const DenseMatrix e_lin = softmax_rows(params.emis_logits);
  const std::vector<double> pi_lin = softmax_vector(params.init_logits);

  const JointFilterCache cache =
      joint_filter_forward(t_lin, e_lin, pi_lin, ids, ids.size(), *state);

  DenseMatrix logits(ids.size(), v_size);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double* h_top = lstm_step_inplace(params.lstm, ids[t], state->lstm, scratch);
    double* lg = logits.row(t);
    matvec(params.lstm.W_out, h_top, lg);
    const double* p = cache.p.row(t);
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = params.lstm.b_out[v];
      for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * p[j];
      lg[v] += acc;
    }
  }
  state->filter.assign(cache.p.row(ids.size() - 1), cache.p.row(ids.size() - 1) + n);
  state->fresh = false;
  return logits;
}

JointLossGrad joint_hybrid_loss_grad(const JointHybridParams& params,
                                     std::span<const std::int32_t> window,
                                     JointHybridState* state) {
  if (window.size() < 2) throw DataError("joint_hybrid_loss_grad: window length < 2");
  const std::size_t steps = window.size() - 1;
  const std::size_t v_size = params.lstm.vocab_size;
  const std::size_t n = params.n_hmm;

  const DenseMatrix t_lin = softmax_rows(params.trans_logits);
  const DenseMatrix e_lin = softmax_rows(params.emis_logits);
  const std::vector<double> pi_lin = softmax_vector(params.init_logits);

  const JointFilterCache cache =
      joint_filter_forward(t_lin, e_lin, pi_lin, window, steps, *state);

  JointLossGrad out;
  out.grads.W_hmm = DenseMatrix(v_size, n);
  DenseMatrix dt_lin(n, n);
  DenseMatrix de_lin(n, v_size);
  std::vector<double> dpi_lin(n, 0.0);
  std::vector<double> dp_carry(n, 0.0);
  std::vector<double> dp(n), dv(n), du(n);

  BpttHooks hooks;
  hooks.augment_logits = [&](std::size_t t, double* logits) {
    const double* p = cache.p.row(t);
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * p[j];
      logits[v] += acc;
    }
  };
  // reverse-time filter backward, interleaved with the LSTM BPTT
  hooks.backprop_logits = [&](std::size_t t, const double* dlogits) {
    const double* p = cache.p.row(t);
    outer_add(out.grads.W_hmm, dlogits, p);
    std::fill(dp.begin(), dp.end(), 0.0);
    matTvec_add(params.W_hmm, dlogits, dp.data());
    for (std::size_t j = 0; j < n; ++j) dp[j] += dp_carry[j];

    const double* u = cache.u.row(t);
    const std::size_t y = static_cast<std::size_t>(window[t]);
    double dot = 0.0;
    for (std::size_t j = 0; j < n; ++j) dot += dp[j] * p[j];
    const double inv_s = 1.0 / cache.s[t];
    for (std::size_t j = 0; j < n; ++j) {
      dv[j] = (dp[j] - dot) * inv_s;
      de_lin(j, y) += dv[j] * u[j];
      du[j] = dv[j] * e_lin(j, y);
    }
    const double* prev =
        t == 0 ? (cache.entry_fresh ? nullptr : cache.entry_filter.data())
               : cache.p.row(t - 1);
    if (prev == nullptr) {
      for (std::size_t j = 0; j < n; ++j) dpi_lin[j] += du[j];
      std::fill(dp_carry.begin(), dp_carry.end(), 0.0);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double pv = prev[i];
        if (pv != 0.0) {
          double* trow = dt_lin.row(i);
          for (std::size_t j = 0; j < n; ++j) trow[j] += pv * du[j];
        }
      }
      if (t == 0) {
        // gradient stops at the carried filter value
        std::fill(dp_carry.begin(), dp_carry.end(), 0.0);
      } else {
        std::fill(dp_carry.begin(), dp_carry.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          const double* trow = t_lin.row(i);
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += trow[j] * du[j];
          dp_carry[i] = acc;
        }
      }
    }
  };

  LstmLossGrad base = lstm_loss_grad_hooked(params.lstm, window, state->lstm, hooks);
  out.nll = base.nll;
  out.grads.lstm = std::move(base.grads);

  // chain through the softmax parameterizations
  out.grads.trans_logits = DenseMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r)
    softmax_backward_row(t_lin.row(r), dt_lin.row(r), out.grads.trans_logits.row(r), n);
  out.grads.emis_logits = DenseMatrix(n, v_size);
  for (std::size_t r = 0; r < n; ++r)
    softmax_backward_row(e_lin.row(r), de_lin.row(r), out.grads.emis_logits.row(r),
                         v_size);
  out.grads.init_logits.assign(n, 0.0);
  softmax_backward_row(pi_lin.data(), dpi_lin.data(), out.grads.init_logits.data(), n);

  state->lstm = std::move(base.state);
  state->filter.assign(cache.p.row(steps - 1), cache.p.row(steps - 1) + n);
  state->fresh = false;
  return out;
}

std::vector<std::span<double>> param_tensors(JointHybridParams& p) {
  auto out = param_tensors(p.lstm);
  out.emplace_back(p.W_hmm.data);
  out.emplace_back(p.trans_logits.data);
  out.emplace_back(p.emis_logits.data);
  out.emplace_back(p.init_logits);
  return out;
}

std::vector<double> flatten_params(const JointHybridParams& p) {
  std::vector<double> flat = flatten_params(p.lstm);
  flat.insert(flat.end(), p.W_hmm.data.begin(), p.W_hmm.data.end());
  flat.insert(flat.end(), p.trans_logits.data.begin(), p.trans_logits.data.end());
  flat.insert(flat.end(), p.emis_logits.data.begin(), p.emis_logits.data.end());
  flat.insert(flat.end(), p.init_logits.begin(), p.init_logits.end());
  return flat;
}

void unflatten_params(JointHybridParams& p, std::span<const double> flat) {
  std::size_t off = 0;
  for (auto& t : param_tensors(p)) {
    std::copy(flat.begin() + off, flat.begin() + off + t.size(), t.begin());
    off += t.size();
  }
  if (off != flat.size()) throw NumericError("unflatten_params: size mismatch");
}

std::pair<JointHybridParams, TrainTrace> train_joint_hybrid(
    const LstmConfig& config, const EncodedCorpus& corpus, std::size_t n_hmm,
    RandomSource& rng) {
  const Range train = corpus.train_range;
  if (train.length() < 2) throw DataError("train_joint_hybrid: train range too short");
  RandomSource rng_init = rng.substream("joint-init");
  JointHybridParams params =
      init_joint_hybrid_params(corpus.vocab.size(), config, n_hmm, rng_init);
  TrainTrace trace;
  double lr = config.lr0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    JointHybridState state = joint_zero_state(params);
    std::size_t pos = train.begin;
    double ll_sum = 0.0;
    std::size_t preds = 0;
    while (pos + 1 < train.end) {
      const std::size_t len = std::min(config.bptt_len, train.end - 1 - pos);
      std::span<const std::int32_t> window(corpus.ids.data() + pos, len + 1);
      JointLossGrad res = joint_hybrid_loss_grad(params, window, &state);
      auto tensors = param_tensors(res.grads.lstm);
      tensors.emplace_back(res.grads.W_hmm.data);
      tensors.emplace_back(res.grads.trans_logits.data);
      tensors.emplace_back(res.grads.emis_logits.data);
      tensors.emplace_back(res.grads.init_logits);
      clip_tensor_list(tensors, config.clip_threshold);
      axpy_params(params.lstm, res.grads.lstm, -lr);
      for (std::size_t i = 0; i < params.W_hmm.data.size(); ++i)
        params.W_hmm.data[i] -= lr * res.grads.W_hmm.data[i];
      for (std::size_t i = 0; i < params.trans_logits.data.size(); ++i)
        params.trans_logits.data[i] -= lr * res.grads.trans_logits.data[i];
      for (std::size_t i = 0; i < params.emis_logits.data.size(); ++i)
        params.emis_logits.data[i] -= lr * res.grads.emis_logits.data[i];
      for (std::size_t i = 0; i < params.init_logits.size(); ++i)
        params.init_logits[i] -= lr * res.grads.init_logits[i];
      ll_sum += -res.nll * static_cast<double>(len);
      preds += len;
      pos += len;
    }
    const double l_t = ll_sum / static_cast<double>(preds);
    trace.epoch_loglik.push_back(l_t);
    trace.epoch_lr.push_back(lr);
    if (epoch >= 1 && lr_should_halve(trace.epoch_loglik[epoch - 1], l_t)) lr *= 0.5;
  }
  trace.final_valid_loglik =
      corpus.valid_range.length() >= 2
          ? eval_joint_hybrid(params, corpus, corpus.valid_range)
          : std::numeric_limits<double>::quiet_NaN();
  return {std::move(params), std::move(trace)};
}

double eval_joint_hybrid(const JointHybridParams& params, const EncodedCorpus& corpus,
                         Range range) {
  if (range.length() < 2) throw DataError("eval_joint_hybrid: range too short");
  const std::size_t v_size = params.lstm.vocab_size;
  const std::size_t n = params.n_hmm;
  const DenseMatrix t_lin = softmax_rows(params.trans_logits);
  const DenseMatrix e_lin = softmax_rows(params.emis_logits);
  const std::vector<double> pi_lin = softmax_vector(params.init_logits);

  JointHybridState state = joint_zero_state(params);
  std::vector<double> scratch, logits(v_size), u(n), p(n);
  double ll = 0.0;
  for (std::size_t pos = range.begin; pos + 1 < range.end; ++pos) {
    const std::int32_t id = corpus.ids[pos];
    // filter step
    if (state.fresh) {
      std::copy(pi_lin.begin(), pi_lin.end(), u.begin());
      state.fresh = false;
    } else {
      std::fill(u.begin(), u.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double pv = state.filter[i];
        if (pv == 0.0) continue;
        const double* trow = t_lin.row(i);
        for (std::size_t j = 0; j < n; ++j) u[j] += pv * trow[j];
      }
    }
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      p[j] = u[j] * e_lin(j, static_cast<std::size_t>(id));
      total += p[j];
    }
    for (std::size_t j = 0; j < n; ++j) p[j] /= total;
    state.filter = p;

    const double* h_top = lstm_step_inplace(params.lstm, id, state.lstm, scratch);
    matvec(params.lstm.W_out, h_top, logits.data());
    for (std::size_t v = 0; v < v_size; ++v) {
      const double* wrow = params.W_hmm.row(v);
      double acc = params.lstm.b_out[v];
      for (std::size_t j = 0; j < n; ++j) acc += wrow[j] * p[j];
      logits[v] += acc;
    }
    ll += log_prob_of(logits.data(), v_size,
                      static_cast<std::size_t>(corpus.ids[pos + 1]));
  }
  return ll / static_cast<double>(range.length() - 1);
}

}  // namespace seqlab
