// include/asrtk/model.h
// Copyright 2026 The asrtk authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ASRTK_MODEL_H_
#define ASRTK_MODEL_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "asrtk/matrix.h"
#include "asrtk/rng.h"

namespace asrtk {

enum class LayerKind { kTdnn, kLstmp };

struct LayerSpec {
  LayerKind kind = LayerKind::kTdnn;
  std::vector<int> context;  // tdnn: frame offsets, e.g. {-2,-1,0,1,2}
  int out_dim = 0;           // tdnn output dimension
  int cell_dim = 0;          // lstmp
  int proj_dim = 0;          // lstmp; also the layer output dimension

  int output_dim() const {
    return kind == LayerKind::kTdnn ? out_dim : proj_dim;
  }
};

struct ModelConfig {
  int input_dim = 300;
  std::vector<LayerSpec> layers;
  int num_outputs = 40;
  double scale_factor = 1.0;
};

// The seven-TDNN / three-LSTMP hidden stack with widths 1024 (tdnn), 1024
// (cell) and 256 (projection) scaled by scale_factor.
ModelConfig make_model_config(double scale_factor, int num_outputs);

std::string model_config_json(const ModelConfig &config);
std::string model_config_hash(const ModelConfig &config);

// Piecewise-linear dropout rate over training progress. Breakpoints must
// start at progress 0, end at 1, and be strictly increasing.
struct DropoutSchedule {
  std::vector<std::pair<double, double>> breakpoints;  // (progress, rate)

  static DropoutSchedule constant(double rate) {
    return DropoutSchedule{{{0.0, rate}, {1.0, rate}}};
  }
  // The stage-1 default: 0, 0@0.2, 0.3@0.5, 0.
  static DropoutSchedule stage1_default() {
    return DropoutSchedule{{{0.0, 0.0}, {0.2, 0.0}, {0.5, 0.3}, {1.0, 0.0}}};
  }
};

double dropout_rate(const DropoutSchedule &schedule, double progress);

struct TdnnParams {
  Matrix w;  // out_dim x (in_dim * context.size())
  Vector b;
};

struct LstmpParams {
  Matrix w_ix, w_fx, w_cx, w_ox;  // cell x in
  Matrix w_ir, w_fr, w_cr, w_or;  // cell x proj
  Vector p_ic, p_fc, p_oc;        // peepholes into input/forget/output gates
  Vector b_i, b_f, b_c, b_o;
  Matrix w_rm;  // proj x cell
};

using LayerParams = std::variant<TdnnParams, LstmpParams>;

struct OutputParams {
  Matrix w;  // num_outputs x last_hidden_dim
  Vector b;
};

struct CheckpointMeta {
  std::string stage = "init";
  int epoch = 0;
  uint64_t seed = 0;
  std::string config_hash;
};

// Model weights plus training metadata. This is both the in-memory model and
// the unit of serialization.
struct Checkpoint {
  ModelConfig config;
  std::vector<LayerParams> layers;
  OutputParams output;
  CheckpointMeta meta;
};

// Uniform fan-in-scaled initialization, deterministic per seed.
Checkpoint build_model(const ModelConfig &config, uint64_t seed);

// A checkpoint of identical shapes with all tensors zeroed; the gradient
// container.
Checkpoint zeros_like(const Checkpoint &model);

// Named view of every tensor in canonical order. The order defines the
// serialization layout and the RNG draw order at initialization.
struct TensorRef {
  std::string name;
  double *data;
  size_t size;
  std::vector<size_t> shape;
};
std::vector<TensorRef> tensor_refs(Checkpoint *model);

size_t num_parameters(const Checkpoint &model);

// --- single-layer forwards (also the building blocks of the test oracles)

// Per frame: concat inputs at t+offset for each context offset (edges
// replicated), affine transform, ReLU.
Matrix tdnn_forward(const LayerSpec &spec, const TdnnParams &params,
                    const Matrix &inputs);

struct LstmCache {
  Matrix i, f, g, o, c, tanh_c, m;  // T x cell each
};

// LSTM with forget gates, peepholes and output projection; the recurrent
// input is the projected output r. Returns the projected sequence (T x proj).
Matrix lstmp_forward(const LayerSpec &spec, const LstmpParams &params,
                     const Matrix &inputs, LstmCache *cache = nullptr);

Matrix layer_forward(const LayerSpec &spec, const LayerParams &params,
                     const Matrix &inputs, LstmCache *cache = nullptr);

// --- full network

enum class RunMode { kTrain, kEval };

struct ForwardCache {
  Matrix input;
  std::vector<Matrix> spliced;       // per layer; tdnn only
  std::vector<Matrix> pre_dropout;   // per hidden layer output
  std::vector<Matrix> post_dropout;  // per hidden layer output after mask
  std::vector<Vector> mask_scale;    // per hidden layer, one factor per frame
  std::vector<LstmCache> lstm;       // per layer; lstmp only
  Matrix log_probs;                  // T x num_outputs
};

// Per-frame dropout: one Bernoulli(1-rate) mask per frame per hidden layer
// output, scaled by 1/(1-rate) when kept. Eval mode ignores rate and rng.
// Output rows are log-posteriors (logsumexp 0).
Matrix forward(const Checkpoint &model, const Matrix &inputs, RunMode mode,
               double rate = 0.0, Rng *rng = nullptr,
               ForwardCache *cache = nullptr);

// Forward with caller-supplied per-frame mask scales (outer index: hidden
// layer). Used to replay an exact stochastic pass.
Matrix forward_with_masks(const Checkpoint &model, const Matrix &inputs,
                          const std::vector<Vector> &mask_scale,
                          ForwardCache *cache = nullptr);

struct BackwardResult {
  Checkpoint grads;
  double loss = 0.0;
};

// Mean per-frame cross-entropy and gradients for every parameter. Requires
// the cache of the corresponding forward pass.
BackwardResult backward(const Checkpoint &model, const ForwardCache &cache,
                        const std::vector<int> &targets);

double cross_entropy(const Matrix &log_probs, const std::vector<int> &targets);
double frame_accuracy(const Matrix &log_probs,
                      const std::vector<int> &targets);

struct ReceptiveField {
  int left = 0;
  int right = 0;
  bool recurrent = false;  // true when any lstmp layer is present
};

ReceptiveField receptive_field(const ModelConfig &config);

}  // namespace asrtk

#endif  // ASRTK_MODEL_H_
