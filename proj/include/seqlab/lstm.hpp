#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "seqlab/corpus.hpp"
#include "seqlab/matrix.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

struct LstmConfig {
  std::size_t hidden_dim = 0;
  std::size_t layers = 1;
  std::size_t bptt_len = 100;
  std::size_t epochs = 10;
  double lr0 = 1.0;
  double clip_threshold = 5.0;
};

struct LstmLayerParams {
  DenseMatrix W_x;        // 4h x h, gate block order (i, f, g, o)
  DenseMatrix W_h;        // 4h x h
  std::vector<double> b;  // 4h
};

struct LstmParams {
  std::size_t vocab_size = 0;
  std::size_t hidden_dim = 0;
  DenseMatrix embedding;  // V x h
  std::vector<LstmLayerParams> layers;
  DenseMatrix W_out;          // V x h
  std::vector<double> b_out;  // V
};

struct LstmState {
  std::vector<std::vector<double>> h, c;  // per layer, each length hidden_dim
};

LstmState zero_state(const LstmParams& params);

// uniform(-0.08, 0.08) weights, zero biases, forget-gate bias +1
LstmParams init_lstm_params(std::size_t vocab_size, const LstmConfig& config,
                            RandomSource& rng);

struct LstmForward {
  DenseMatrix hidden;  // T x h, top layer, row t after consuming ids[t]
  DenseMatrix logits;  // T x V, row t predicts ids[t+1]
  LstmState state;
};

LstmForward lstm_forward(const LstmParams& params, std::span<const std::int32_t> ids,
                         const LstmState& state0);

// Gradients share the parameter layout.
using LstmGrads = LstmParams;

struct LstmLossGrad {
  double nll = 0.0;
  LstmGrads grads;
  LstmState state;
};

// window holds L+1 ids: inputs window[0..L-1], targets window[1..L].
// nll is the mean next-char negative log-likelihood over the L predictions;
// grads are its exact gradients with truncation at state0 (values used,
// no gradient flows in). The returned state has consumed window[0..L-1].
LstmLossGrad lstm_loss_grad(const LstmParams& params,
                            std::span<const std::int32_t> window,
                            const LstmState& state0);

// Extension points for models that augment the output layer (hybrids).
// augment_logits runs on the pre-softmax logits of step t; backprop_logits
// receives the loss gradient w.r.t. those logits (already scaled by 1/L),
// invoked in reverse time order.
struct BpttHooks {
  std::function<void(std::size_t, double*)> augment_logits;
  std::function<void(std::size_t, const double*)> backprop_logits;
};

LstmLossGrad lstm_loss_grad_hooked(const LstmParams& params,
                                   std::span<const std::int32_t> window,
                                   const LstmState& state0, const BpttHooks& hooks);

double global_norm(const std::vector<std::span<const double>>& tensors);
// Scales all tensors by threshold/norm when the global L2 norm exceeds threshold.
void clip_tensor_list(const std::vector<std::span<double>>& tensors, double threshold);
void clip_gradients(LstmGrads& grads, double threshold);

std::vector<std::span<double>> param_tensors(LstmParams& p);
std::vector<std::span<const double>> param_tensors(const LstmParams& p);
std::vector<double> flatten_params(const LstmParams& p);
void unflatten_params(LstmParams& p, std::span<const double> flat);
void axpy_params(LstmParams& dst, const LstmParams& src, double coef);  // dst += coef*src
std::size_t param_count(const LstmParams& p);

struct TrainTrace {
  std::vector<double> epoch_loglik;  // mean train log-likelihood per epoch (nats/char)
  std::vector<double> epoch_lr;      // learning rate used during that epoch
  double final_valid_loglik = 0.0;
};

// Halving predicate: perplexity worsened by more than 1 versus the previous epoch.
bool lr_should_halve(double prev_loglik, double curr_loglik);

// Plain SGD over successive BPTT windows, state carried across windows and
// reset at epoch boundaries; gradient clipping on every update; learning rate
// halved per lr_should_halve.
std::pair<LstmParams, TrainTrace> train_lstm(const LstmConfig& config,
                                             const EncodedCorpus& corpus,
                                             RandomSource& rng);

// Mean log P(next char) in nats/char over the range, one causal pass with
// state starting from zero at range.begin. Requires range length >= 2.
double eval_loglik(const LstmParams& params, const EncodedCorpus& corpus, Range range);

// Streaming evaluation that carries state in/out: consumes ids[0..n-2],
// scores targets ids[1..n-1]. Returns (summed log-likelihood, predictions).
std::pair<double, std::size_t> eval_range_stateful(const LstmParams& params,
                                                   std::span<const std::int32_t> ids,
                                                   LstmState& state);

// Advance the state by one input id through all layers. scratch must hold at
// least 6h doubles. Returns the top-layer hidden vector (owned by state).
const double* lstm_step_inplace(const LstmParams& params, std::int32_t id,
                                LstmState& state, std::vector<double>& scratch);

// Row t = top-layer hidden state at range.begin + t; T = range length.
DenseMatrix extract_hidden_states(const LstmParams& params, const EncodedCorpus& corpus,
                                  Range range);

}  // namespace seqlab
