#include "seqlab/lstm.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "seqlab/errors.hpp"
#include "seqlab/numeric.hpp"

namespace seqlab {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_ids(std::span<const std::int32_t> ids, std::size_t vocab_size) {
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || static_cast<std::size_t>(ids[t]) >= vocab_size)
      throw DataError("lstm: id out of vocab range at position " + std::to_string(t));
  }
}

// One step of one layer. gates holds the post-nonlinearity (i, f, g, o)
// blocks on output. h_out may alias h_prev (h_prev is fully consumed before
// h_out is written); c_out must not alias c_prev.
void layer_step(const LstmLayerParams& lp, std::size_t h, const double* x,
                const double* h_prev, const double* c_prev, double* gates,
                double* c_out, double* tc_out, double* h_out) {
  const std::size_t gh = 4 * h;
  for (std::size_t r = 0; r < gh; ++r) {
    const double* wx = lp.W_x.row(r);
    const double* wh = lp.W_h.row(r);
    double acc = lp.b[r];
    for (std::size_t k = 0; k < h; ++k) acc += wx[k] * x[k] + wh[k] * h_prev[k];
    gates[r] = acc;
  }
  for (std::size_t j = 0; j < h; ++j) {
    const double i = sigmoid(gates[j]);
    const double f = sigmoid(gates[h + j]);
    const double g = std::tanh(gates[2 * h + j]);
    const double o = sigmoid(gates[3 * h + j]);
    gates[j] = i;
    gates[h + j] = f;
    gates[2 * h + j] = g;
    gates[3 * h + j] = o;
    const double c = f * c_prev[j] + i * g;
    const double tc = std::tanh(c);
    c_out[j] = c;
    tc_out[j] = tc;
    h_out[j] = o * tc;
  }
}

LstmParams zero_like(const LstmParams& p) {
  LstmParams z;
  z.vocab_size = p.vocab_size;
  z.hidden_dim = p.hidden_dim;
  z.embedding = DenseMatrix(p.embedding.rows, p.embedding.cols);
  z.layers.resize(p.layers.size());
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    z.layers[l].W_x = DenseMatrix(p.layers[l].W_x.rows, p.layers[l].W_x.cols);
    z.layers[l].W_h = DenseMatrix(p.layers[l].W_h.rows, p.layers[l].W_h.cols);
    z.layers[l].b.assign(p.layers[l].b.size(), 0.0);
  }
  z.W_out = DenseMatrix(p.W_out.rows, p.W_out.cols);
  z.b_out.assign(p.b_out.size(), 0.0);
  return z;
}

}  // namespace

LstmState zero_state(const LstmParams& params) {
  LstmState s;
  s.h.assign(params.layers.size(), std::vector<double>(params.hidden_dim, 0.0));
  s.c.assign(params.layers.size(), std::vector<double>(params.hidden_dim, 0.0));
  return s;
}

LstmParams init_lstm_params(std::size_t vocab_size, const LstmConfig& config,
                            RandomSource& rng) {
  const std::size_t h = config.hidden_dim;
  if (h < 1) throw DataError("init_lstm_params: hidden_dim must be >= 1");
  if (config.layers < 1) throw DataError("init_lstm_params: layers must be >= 1");
  LstmParams p;
  p.vocab_size = vocab_size;
  p.hidden_dim = h;
  p.embedding = DenseMatrix(vocab_size, h);
  for (auto& v : p.embedding.data) v = rng.uniform(-0.08, 0.08);
  p.layers.resize(config.layers);
  for (auto& lp : p.layers) {
    lp.W_x = DenseMatrix(4 * h, h);
    lp.W_h = DenseMatrix(4 * h, h);
    for (auto& v : lp.W_x.data) v = rng.uniform(-0.08, 0.08);
    for (auto& v : lp.W_h.data) v = rng.uniform(-0.08, 0.08);
    lp.b.assign(4 * h, 0.0);
    for (std::size_t j = 0; j < h; ++j) lp.b[h + j] = 1.0;  // forget gate
  }
  p.W_out = DenseMatrix(vocab_size, h);
  for (auto& v : p.W_out.data) v = rng.uniform(-0.08, 0.08);
  p.b_out.assign(vocab_size, 0.0);
  return p;
}

LstmForward lstm_forward(const LstmParams& params, std::span<const std::int32_t> ids,
                         const LstmState& state0) {
  check_ids(ids, params.vocab_size);
  const std::size_t t_len = ids.size();
  const std::size_t h = params.hidden_dim;
  LstmForward out;
  out.hidden = DenseMatrix(t_len, h);
  out.logits = DenseMatrix(t_len, params.vocab_size);
  out.state = state0;
  std::vector<double> scratch;
  for (std::size_t t = 0; t < t_len; ++t) {
    const double* h_top = lstm_step_inplace(params, ids[t], out.state, scratch);
    double* hid = out.hidden.row(t);
    std::memcpy(hid, h_top, h * sizeof(double));
    double* lg = out.logits.row(t);
    matvec(params.W_out, hid, lg);
    for (std::size_t v = 0; v < params.vocab_size; ++v) lg[v] += params.b_out[v];
  }
  return out;
}

LstmLossGrad lstm_loss_grad(const LstmParams& params,
                            std::span<const std::int32_t> window,
                            const LstmState& state0) {
  return lstm_loss_grad_hooked(params, window, state0, {});
}

LstmLossGrad lstm_loss_grad_hooked(const LstmParams& params,
                                   std::span<const std::int32_t> window,
                                   const LstmState& state0, const BpttHooks& hooks) {
  if (window.size() < 2) throw DataError("lstm_loss_grad: window length < 2");
  check_ids(window, params.vocab_size);
  const std::size_t steps = window.size() - 1;
  const std::size_t h = params.hidden_dim;
  const std::size_t v_size = params.vocab_size;
  const std::size_t n_layers = params.layers.size();

  // forward caches
  std::vector<DenseMatrix> gate_cache(n_layers), c_cache(n_layers), tc_cache(n_layers),
      h_cache(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    gate_cache[l] = DenseMatrix(steps, 4 * h);
    c_cache[l] = DenseMatrix(steps, h);
    tc_cache[l] = DenseMatrix(steps, h);
    h_cache[l] = DenseMatrix(steps, h);
  }

  for (std::size_t t = 0; t < steps; ++t) {
    const double* x = params.embedding.row(static_cast<std::size_t>(window[t]));
    for (std::size_t l = 0; l < n_layers; ++l) {
      const double* h_prev = t > 0 ? h_cache[l].row(t - 1) : state0.h[l].data();
      const double* c_prev = t > 0 ? c_cache[l].row(t - 1) : state0.c[l].data();
      layer_step(params.layers[l], h, x, h_prev, c_prev, gate_cache[l].row(t),
                 c_cache[l].row(t), tc_cache[l].row(t), h_cache[l].row(t));
      x = h_cache[l].row(t);
    }
  }

  LstmLossGrad res;
  res.grads = zero_like(params);
  const double inv_steps = 1.0 / static_cast<double>(steps);

  std::vector<std::vector<double>> dh_carry(n_layers, std::vector<double>(h, 0.0));
  std::vector<std::vector<double>> dc_carry(n_layers, std::vector<double>(h, 0.0));
  std::vector<double> probs(v_size), dh(h), dc(h), da(4 * h), dx(h);
  double nll = 0.0;

  for (std::size_t t = steps; t-- > 0;) {
    // output layer + softmax cross-entropy
    const double* h_top = h_cache[n_layers - 1].row(t);
    matvec(params.W_out, h_top, probs.data());
    for (std::size_t v = 0; v < v_size; ++v) probs[v] += params.b_out[v];
    if (hooks.augment_logits) hooks.augment_logits(t, probs.data());
    softmax_inplace(probs.data(), v_size);
    const std::size_t target = static_cast<std::size_t>(window[t + 1]);
    nll -= std::log(probs[target]);
    probs[target] -= 1.0;
    for (std::size_t v = 0; v < v_size; ++v) probs[v] *= inv_steps;
    if (hooks.backprop_logits) hooks.backprop_logits(t, probs.data());

    outer_add(res.grads.W_out, probs.data(), h_top);
    for (std::size_t v = 0; v < v_size; ++v) res.grads.b_out[v] += probs[v];

    std::fill(dh.begin(), dh.end(), 0.0);
    matTvec_add(params.W_out, probs.data(), dh.data());

    for (std::size_t l = n_layers; l-- > 0;) {
      for (std::size_t j = 0; j < h; ++j) dh[j] += dh_carry[l][j];
      const double* gates = gate_cache[l].row(t);
      const double* tc = tc_cache[l].row(t);
      const double* c_prev = t > 0 ? c_cache[l].row(t - 1) : state0.c[l].data();
      const double* h_prev = t > 0 ? h_cache[l].row(t - 1) : state0.h[l].data();
      const double* x = l > 0 ? h_cache[l - 1].row(t)
                              : params.embedding.row(static_cast<std::size_t>(window[t]));
      for (std::size_t j = 0; j < h; ++j) {
        const double i = gates[j];
        const double f = gates[h + j];
        const double g = gates[2 * h + j];
        const double o = gates[3 * h + j];
        const double d_o = dh[j] * tc[j];
        const double dcj = dc_carry[l][j] + dh[j] * o * (1.0 - tc[j] * tc[j]);
        const double di = dcj * g;
        const double dg = dcj * i;
        const double df = dcj * c_prev[j];
        dc_carry[l][j] = dcj * f;
        da[j] = di * i * (1.0 - i);
        da[h + j] = df * f * (1.0 - f);
        da[2 * h + j] = dg * (1.0 - g * g);
        da[3 * h + j] = d_o * o * (1.0 - o);
      }
      auto& glayer = res.grads.layers[l];
      outer_add(glayer.W_x, da.data(), x);
      outer_add(glayer.W_h, da.data(), h_prev);
      for (std::size_t r = 0; r < 4 * h; ++r) glayer.b[r] += da[r];

      std::fill(dx.begin(), dx.end(), 0.0);
      matTvec_add(params.layers[l].W_x, da.data(), dx.data());
      std::fill(dh_carry[l].begin(), dh_carry[l].end(), 0.0);
      matTvec_add(params.layers[l].W_h, da.data(), dh_carry[l].data());

      if (l > 0) {
        dh = dx;  // feeds the layer below at the same t
      } else {
        double* ge = res.grads.embedding.row(static_cast<std::size_t>(window[t]));
        for (std::size_t j = 0; j < h; ++j) ge[j] += dx[j];
      }
    }
  }

  res.nll = nll * inv_steps;
  res.state.h.resize(n_layers);
  res.state.c.resize(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const double* hr = h_cache[l].row(steps - 1);
    const double* cr = c_cache[l].row(steps - 1);
    res.state.h[l].assign(hr, hr + h);
    res.state.c[l].assign(cr, cr + h);
  }
  return res;
}

double global_norm(const std::vector<std::span<const double>>& tensors) {
  double acc = 0.0;
  for (const auto& t : tensors)
    for (double v : t) acc += v * v;
  return std::sqrt(acc);
}

void clip_tensor_list(const std::vector<std::span<double>>& tensors, double threshold) {
  if (!(threshold > 0.0)) throw NumericError("clip: threshold must be > 0");
  std::vector<std::span<const double>> views(tensors.begin(), tensors.end());
  const double norm = global_norm(views);
  if (norm <= threshold) return;
  const double scale = threshold / norm;
  for (const auto& t : tensors)
    for (double& v : t) v *= scale;
}

std::vector<std::span<double>> param_tensors(LstmParams& p) {
  std::vector<std::span<double>> out;
  out.emplace_back(p.embedding.data);
  for (auto& l : p.layers) {
    out.emplace_back(l.W_x.data);
    out.emplace_back(l.W_h.data);
    out.emplace_back(l.b);
  }
  out.emplace_back(p.W_out.data);
  out.emplace_back(p.b_out);
  return out;
}

std::vector<std::span<const double>> param_tensors(const LstmParams& p) {
  std::vector<std::span<const double>> out;
  out.emplace_back(p.embedding.data);
  for (const auto& l : p.layers) {
    out.emplace_back(l.W_x.data);
    out.emplace_back(l.W_h.data);
    out.emplace_back(l.b);
  }
  out.emplace_back(p.W_out.data);
  out.emplace_back(p.b_out);
  return out;
}

void clip_gradients(LstmGrads& grads, double threshold) {
  clip_tensor_list(param_tensors(grads), threshold);
}

std::vector<double> flatten_params(const LstmParams& p) {
  std::vector<double> flat;
  for (const auto& t : param_tensors(p)) flat.insert(flat.end(), t.begin(), t.end());
  return flat;
}

void unflatten_params(LstmParams& p, std::span<const double> flat) {
  std::size_t off = 0;
  for (auto& t : param_tensors(p)) {
    std::copy(flat.begin() + off, flat.begin() + off + t.size(), t.begin());
    off += t.size();
  }
  if (off != flat.size()) throw NumericError("unflatten_params: size mismatch");
}

void axpy_params(LstmParams& dst, const LstmParams& src, double coef) {
  auto d = param_tensors(dst);
  auto s = param_tensors(src);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d[i].size(); ++j) d[i][j] += coef * s[i][j];
}

std::size_t param_count(const LstmParams& p) {
  std::size_t n = 0;
  for (const auto& t : param_tensors(p)) n += t.size();
  return n;
}

bool lr_should_halve(double prev_loglik, double curr_loglik) {
  return std::exp(-curr_loglik) > std::exp(-prev_loglik) + 1.0;
}

std::pair<LstmParams, TrainTrace> train_lstm(const LstmConfig& config,
                                             const EncodedCorpus& corpus,
                                             RandomSource& rng) {
  const Range train = corpus.train_range;
  if (train.length() < 2) throw DataError("train_lstm: train range too short");
  RandomSource rng_init = rng.substream("lstm-init");
  LstmParams params = init_lstm_params(corpus.vocab.size(), config, rng_init);
  TrainTrace trace;
  double lr = config.lr0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    LstmState state = zero_state(params);
    std::size_t pos = train.begin;
    double ll_sum = 0.0;
    std::size_t preds = 0;
    while (pos + 1 < train.end) {
      const std::size_t len = std::min(config.bptt_len, train.end - 1 - pos);
      std::span<const std::int32_t> window(corpus.ids.data() + pos, len + 1);
      LstmLossGrad res = lstm_loss_grad(params, window, state);
      clip_gradients(res.grads, config.clip_threshold);
      axpy_params(params, res.grads, -lr);
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
          ? eval_loglik(params, corpus, corpus.valid_range)
          : std::numeric_limits<double>::quiet_NaN();
  return {std::move(params), std::move(trace)};
}

const double* lstm_step_inplace(const LstmParams& params, std::int32_t id,
                                LstmState& state, std::vector<double>& scratch) {
  const std::size_t h = params.hidden_dim;
  const std::size_t n_layers = params.layers.size();
  if (scratch.size() < 6 * h) scratch.resize(6 * h);
  double* gates = scratch.data();
  double* tc = scratch.data() + 4 * h;
  double* c_new = scratch.data() + 5 * h;
  const double* x = params.embedding.row(static_cast<std::size_t>(id));
  for (std::size_t l = 0; l < n_layers; ++l) {
    layer_step(params.layers[l], h, x, state.h[l].data(), state.c[l].data(), gates,
               c_new, tc, state.h[l].data());
    std::memcpy(state.c[l].data(), c_new, h * sizeof(double));
    x = state.h[l].data();
  }
  return state.h[n_layers - 1].data();
}

std::pair<double, std::size_t> eval_range_stateful(const LstmParams& params,
                                                   std::span<const std::int32_t> ids,
                                                   LstmState& state) {
  if (ids.size() < 2) throw DataError("eval_range_stateful: need at least 2 ids");
  check_ids(ids, params.vocab_size);
  const std::size_t v_size = params.vocab_size;
  std::vector<double> scratch, logits(v_size);
  double ll = 0.0;
  for (std::size_t t = 0; t + 1 < ids.size(); ++t) {
    const double* h_top = lstm_step_inplace(params, ids[t], state, scratch);
    matvec(params.W_out, h_top, logits.data());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < v_size; ++v) {
      logits[v] += params.b_out[v];
      mx = std::max(mx, logits[v]);
    }
    double total = 0.0;
    for (std::size_t v = 0; v < v_size; ++v) total += std::exp(logits[v] - mx);
    ll += logits[static_cast<std::size_t>(ids[t + 1])] - mx - std::log(total);
  }
  return {ll, ids.size() - 1};
}

double eval_loglik(const LstmParams& params, const EncodedCorpus& corpus, Range range) {
  if (range.length() < 2) throw DataError("eval_loglik: range too short");
  LstmState state = zero_state(params);
  std::span<const std::int32_t> ids(corpus.ids.data() + range.begin, range.length());
  auto [ll, preds] = eval_range_stateful(params, ids, state);
  return ll / static_cast<double>(preds);
}

DenseMatrix extract_hidden_states(const LstmParams& params, const EncodedCorpus& corpus,
                                  Range range) {
  std::span<const std::int32_t> ids(corpus.ids.data() + range.begin, range.length());
  check_ids(ids, params.vocab_size);
  const std::size_t h = params.hidden_dim;
  LstmState state = zero_state(params);
  DenseMatrix out(ids.size(), h);
  std::vector<double> scratch;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double* h_top = lstm_step_inplace(params, ids[t], state, scratch);
    std::memcpy(out.row(t), h_top, h * sizeof(double));
  }
  return out;
}

}  // namespace seqlab
