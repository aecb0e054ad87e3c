#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "seqlab/corpus.hpp"
#include "seqlab/hmm.hpp"
#include "seqlab/lstm.hpp"
#include "seqlab/matrix.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

// Sequential hybrid: LSTM whose output projection is augmented with one
// column per HMM state. Stored as the two blocks [lstm.W_out | W_hmm];
// logits = W_out h + W_hmm p + b_out.
struct HybridParams {
  LstmParams lstm;
  std::size_t n_hmm = 0;
  DenseMatrix W_hmm;  // V x n_hmm
};

// Materialized V x (h + n_hmm) view of the augmented projection.
DenseMatrix augmented_output(const HybridParams& params);

// Filtered HMM state distributions aligned to corpus positions: row t is
// p_t = P(x_t | y_{0..t}) over the whole corpus (train + validation, one
// causal pass).
struct HmmFeatureTrack {
  DenseMatrix dists;  // T_total x n
};

HmmFeatureTrack precompute_hmm_track(const DiscreteHmmParams& hmm,
                                     const EncodedCorpus& corpus);

// Logits for ids at corpus positions [pos0, pos0 + ids.size()); row t predicts
// ids[t+1]. Throws DataError when the track does not cover those positions.
DenseMatrix hybrid_forward(const HybridParams& params,
                           std::span<const std::int32_t> ids,
                           const HmmFeatureTrack& track, std::size_t pos0,
                           const LstmState& state0);

struct HybridGrads {
  LstmGrads lstm;
  DenseMatrix W_hmm;
};

struct HybridLossGrad {
  double nll = 0.0;
  HybridGrads grads;
  LstmState state;
};

HybridLossGrad hybrid_loss_grad(const HybridParams& params,
                                std::span<const std::int32_t> window,
                                const HmmFeatureTrack& track, std::size_t pos0,
                                const LstmState& state0);

HybridParams init_hybrid_params(std::size_t vocab_size, const LstmConfig& config,
                                std::size_t n_hmm, RandomSource& rng);

// HMM frozen; LSTM + augmented output trained with the train_lstm recipe,
// consuming the precomputed track. When cached_track is non-null it must be
// the track of `hmm` over `corpus` and is used instead of refiltering.
std::pair<HybridParams, TrainTrace> train_sequential_hybrid(
    const LstmConfig& config, const EncodedCorpus& corpus,
    const DiscreteHmmParams& hmm, RandomSource& rng,
    const HmmFeatureTrack* cached_track = nullptr);

double eval_hybrid(const HybridParams& params, const EncodedCorpus& corpus,
                   Range range, const HmmFeatureTrack& track);

// Joint hybrid: LSTM plus a differentiable forward-filter HMM parameterized
// through softmax logits, trained end to end by SGD.
struct JointHybridParams {
  LstmParams lstm;
  std::size_t n_hmm = 0;
  DenseMatrix W_hmm;         // V x n
  DenseMatrix trans_logits;  // n x n
  DenseMatrix emis_logits;   // n x V
  std::vector<double> init_logits;  // n
};

struct JointHybridState {
  LstmState lstm;
  std::vector<double> filter;  // carried p_{t-1}
  bool fresh = true;           // next step starts from softmax(init_logits)
};

JointHybridState joint_zero_state(const JointHybridParams& params);

// Forward over ids carrying state; row t predicts ids[t+1]. The filter is
// advanced with values carried across calls (fresh state uses the initial
// distribution).
DenseMatrix joint_hybrid_forward(const JointHybridParams& params,
                                 std::span<const std::int32_t> ids,
                                 JointHybridState* state);

struct JointHybridGrads {
  LstmGrads lstm;
  DenseMatrix W_hmm;
  DenseMatrix trans_logits;
  DenseMatrix emis_logits;
  std::vector<double> init_logits;
};

struct JointLossGrad {
  double nll = 0.0;
  JointHybridGrads grads;
};

// BPTT over the window with the differentiable filter; filter values carry
// across window boundaries, gradients stop there (mirrors LSTM truncation).
JointLossGrad joint_hybrid_loss_grad(const JointHybridParams& params,
                                     std::span<const std::int32_t> window,
                                     JointHybridState* state);

JointHybridParams init_joint_hybrid_params(std::size_t vocab_size,
                                           const LstmConfig& config,
                                           std::size_t n_hmm, RandomSource& rng);

std::pair<JointHybridParams, TrainTrace> train_joint_hybrid(
    const LstmConfig& config, const EncodedCorpus& corpus, std::size_t n_hmm,
    RandomSource& rng);

double eval_joint_hybrid(const JointHybridParams& params, const EncodedCorpus& corpus,
                         Range range);

std::vector<std::span<double>> param_tensors(HybridParams& p);
std::vector<std::span<double>> param_tensors(JointHybridParams& p);
std::vector<double> flatten_params(const HybridParams& p);
std::vector<double> flatten_params(const JointHybridParams& p);
void unflatten_params(HybridParams& p, std::span<const double> flat);
void unflatten_params(JointHybridParams& p, std::span<const double> flat);

}  // namespace seqlab
