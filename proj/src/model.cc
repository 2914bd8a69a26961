// src/model.cc
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

#include "asrtk/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "asrtk/error.h"

namespace asrtk {

using nlohmann::json;

namespace {

int scaled_dim(int paper_dim, double scale_factor) {
  return std::max(1, int(std::lround(paper_dim * scale_factor)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y[t] = W * x_spliced[t] + b for affine maps over spliced context windows.
void affine_forward(const Matrix &w, const Vector &b, const Matrix &x,
                    Matrix *y) {
  for (size_t t = 0; t < x.rows; t++) {
    const double *xr = x.row(t);
    double *yr = y->row(t);
    for (size_t i = 0; i < w.rows; i++) {
      const double *wr = w.row(i);
      double acc = b[i];
      for (size_t j = 0; j < w.cols; j++) acc += wr[j] * xr[j];
      yr[i] = acc;
    }
  }
}

Matrix splice_for_context(const std::vector<int> &context, const Matrix &in) {
  const size_t t_count = in.rows;
  const size_t d = in.cols;
  Matrix out(t_count, context.size() * d);
  for (size_t t = 0; t < t_count; t++) {
    double *dst = out.row(t);
    for (size_t c = 0; c < context.size(); c++) {
      const long src = std::clamp<long>(long(t) + context[c], 0,
                                        long(t_count) - 1);
      std::memcpy(dst + c * d, in.row(size_t(src)), d * sizeof(double));
    }
  }
  return out;
}

void check_finite(const Matrix &m, size_t layer_index) {
  for (double v : m.data)
    if (!std::isfinite(v))
      throw NumericError("non-finite activation in layer " +
                         std::to_string(layer_index));
}

}  // namespace

ModelConfig make_model_config(double scale_factor, int num_outputs) {
  if (scale_factor <= 0.0 || scale_factor > 1.0)
    throw ConfigError("scale_factor must be in (0, 1]");

  const int tdnn_dim = scaled_dim(1024, scale_factor);
  const int cell_dim = scaled_dim(1024, scale_factor);
  const int proj_dim = scaled_dim(256, scale_factor);

  auto tdnn = [&](std::vector<int> ctx) {
    LayerSpec s;
    s.kind = LayerKind::kTdnn;
    s.context = std::move(ctx);
    s.out_dim = tdnn_dim;
    return s;
  };
  auto lstmp = [&] {
    LayerSpec s;
    s.kind = LayerKind::kLstmp;
    s.cell_dim = cell_dim;
    s.proj_dim = proj_dim;
    return s;
  };

  ModelConfig config;
  config.input_dim = 300;
  config.num_outputs = num_outputs;
  config.scale_factor = scale_factor;
  config.layers = {
      tdnn({-2, -1, 0, 1, 2}), tdnn({-1, 0, 1}), tdnn({-1, 0, 1}),
      lstmp(),
      tdnn({-3, 0, 3}),        tdnn({-3, 0, 3}),
      lstmp(),
      tdnn({-3, 0, 3}),        tdnn({-3, 0, 3}),
      lstmp(),
  };
  return config;
}

std::string model_config_json(const ModelConfig &config) {
  json layers = json::array();
  for (const auto &l : config.layers) {
    json j;
    j["kind"] = l.kind == LayerKind::kTdnn ? "tdnn" : "lstmp";
    if (l.kind == LayerKind::kTdnn) {
      j["context"] = l.context;
      j["out_dim"] = l.out_dim;
    } else {
      j["cell_dim"] = l.cell_dim;
      j["proj_dim"] = l.proj_dim;
    }
    layers.push_back(j);
  }
  json j;
  j["input_dim"] = config.input_dim;
  j["num_outputs"] = config.num_outputs;
  j["scale_factor"] = config.scale_factor;
  j["layers"] = layers;
  return j.dump();
}

std::string model_config_hash(const ModelConfig &config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a64(model_config_json(config)));
  return buf;
}

double dropout_rate(const DropoutSchedule &schedule, double progress) {
  if (progress < 0.0 || progress > 1.0)
    throw DomainError("dropout_rate: progress out of [0,1]");
  const auto &bp = schedule.breakpoints;
  if (bp.size() < 2 || bp.front().first != 0.0 || bp.back().first != 1.0)
    throw ConfigError("dropout schedule must span progress 0..1");
  for (size_t i = 1; i < bp.size(); i++) {
    if (bp[i].first <= bp[i - 1].first)
      throw ConfigError("dropout schedule breakpoints must increase");
    if (progress <= bp[i].first) {
      const double t =
          (progress - bp[i - 1].first) / (bp[i].first - bp[i - 1].first);
      return bp[i - 1].second + t * (bp[i].second - bp[i - 1].second);
    }
  }
  return bp.back().second;
}

static void layer_in_out(const ModelConfig &config, size_t layer,
                         int *in_dim, int *out_dim) {
  *in_dim = (layer == 0) ? config.input_dim
                         : config.layers[layer - 1].output_dim();
  *out_dim = config.layers[layer].output_dim();
}

Checkpoint zeros_like(const Checkpoint &model) {
  Checkpoint z;
  z.config = model.config;
  z.meta = model.meta;
  z.output.w = Matrix(model.output.w.rows, model.output.w.cols);
  z.output.b.assign(model.output.b.size(), 0.0);
  for (const auto &layer : model.layers) {
    if (std::holds_alternative<TdnnParams>(layer)) {
      const auto &p = std::get<TdnnParams>(layer);
      TdnnParams q;
      q.w = Matrix(p.w.rows, p.w.cols);
      q.b.assign(p.b.size(), 0.0);
      z.layers.emplace_back(std::move(q));
    } else {
      const auto &p = std::get<LstmpParams>(layer);
      LstmpParams q;
      auto zero = [](const Matrix &m) { return Matrix(m.rows, m.cols); };
      q.w_ix = zero(p.w_ix), q.w_fx = zero(p.w_fx), q.w_cx = zero(p.w_cx),
      q.w_ox = zero(p.w_ox);
      q.w_ir = zero(p.w_ir), q.w_fr = zero(p.w_fr), q.w_cr = zero(p.w_cr),
      q.w_or = zero(p.w_or);
      q.p_ic.assign(p.p_ic.size(), 0.0);
      q.p_fc.assign(p.p_fc.size(), 0.0);
      q.p_oc.assign(p.p_oc.size(), 0.0);
      q.b_i.assign(p.b_i.size(), 0.0);
      q.b_f.assign(p.b_f.size(), 0.0);
      q.b_c.assign(p.b_c.size(), 0.0);
      q.b_o.assign(p.b_o.size(), 0.0);
      q.w_rm = zero(p.w_rm);
      z.layers.emplace_back(std::move(q));
    }
  }
  return z;
}

std::vector<TensorRef> tensor_refs(Checkpoint *model) {
  std::vector<TensorRef> refs;
  auto add_m = [&](const std::string &name, Matrix &m) {
    refs.push_back({name, m.data.data(), m.data.size(), {m.rows, m.cols}});
  };
  auto add_v = [&](const std::string &name, Vector &v) {
    refs.push_back({name, v.data(), v.size(), {v.size()}});
  };
  for (size_t l = 0; l < model->layers.size(); l++) {
    const std::string p = "layer" + std::to_string(l) + ".";
    if (std::holds_alternative<TdnnParams>(model->layers[l])) {
      auto &t = std::get<TdnnParams>(model->layers[l]);
      add_m(p + "w", t.w);
      add_v(p + "b", t.b);
    } else {
      auto &t = std::get<LstmpParams>(model->layers[l]);
      add_m(p + "w_ix", t.w_ix);
      add_m(p + "w_fx", t.w_fx);
      add_m(p + "w_cx", t.w_cx);
      add_m(p + "w_ox", t.w_ox);
      add_m(p + "w_ir", t.w_ir);
      add_m(p + "w_fr", t.w_fr);
      add_m(p + "w_cr", t.w_cr);
      add_m(p + "w_or", t.w_or);
      add_v(p + "p_ic", t.p_ic);
      add_v(p + "p_fc", t.p_fc);
      add_v(p + "p_oc", t.p_oc);
      add_v(p + "b_i", t.b_i);
      add_v(p + "b_f", t.b_f);
      add_v(p + "b_c", t.b_c);
      add_v(p + "b_o", t.b_o);
      add_m(p + "w_rm", t.w_rm);
    }
  }
  add_m("output.w", model->output.w);
  add_v("output.b", model->output.b);
  return refs;
}

size_t num_parameters(const Checkpoint &model) {
  size_t n = 0;
  auto refs = tensor_refs(const_cast<Checkpoint *>(&model));
  for (const auto &r : refs) n += r.size;
  return n;
}

Checkpoint build_model(const ModelConfig &config, uint64_t seed) {
  if (config.layers.empty()) throw ConfigError("model has no hidden layers");
  if (config.input_dim <= 0 || config.num_outputs <= 0)
    throw ConfigError("model dims must be positive");

  Checkpoint m;
  m.config = config;
  m.meta.seed = seed;
  m.meta.config_hash = model_config_hash(config);

  for (size_t l = 0; l < config.layers.size(); l++) {
    const LayerSpec &spec = config.layers[l];
    int in_dim, out_dim;
    layer_in_out(config, l, &in_dim, &out_dim);
    if (spec.kind == LayerKind::kTdnn) {
      if (spec.context.empty() || spec.out_dim <= 0)
        throw ConfigError("tdnn layer " + std::to_string(l) +
                          " needs context and out_dim");
      TdnnParams p;
      p.w = Matrix(size_t(spec.out_dim), spec.context.size() * size_t(in_dim));
      p.b.assign(size_t(spec.out_dim), 0.0);
      m.layers.emplace_back(std::move(p));
    } else {
      if (spec.cell_dim <= 0 || spec.proj_dim <= 0)
        throw ConfigError("lstmp layer " + std::to_string(l) +
                          " needs cell_dim and proj_dim");
      const size_t cell = size_t(spec.cell_dim);
      const size_t proj = size_t(spec.proj_dim);
      LstmpParams p;
      p.w_ix = p.w_fx = p.w_cx = p.w_ox = Matrix(cell, size_t(in_dim));
      p.w_ir = p.w_fr = p.w_cr = p.w_or = Matrix(cell, proj);
      p.p_ic.assign(cell, 0.0);
      p.p_fc.assign(cell, 0.0);
      p.p_oc.assign(cell, 0.0);
      p.b_i.assign(cell, 0.0);
      p.b_f.assign(cell, 0.0);
      p.b_c.assign(cell, 0.0);
      p.b_o.assign(cell, 0.0);
      p.w_rm = Matrix(proj, cell);
      m.layers.emplace_back(std::move(p));
    }
    (void)out_dim;
  }
  const int last_dim = config.layers.back().output_dim();
  m.output.w = Matrix(size_t(config.num_outputs), size_t(last_dim));
  m.output.b.assign(size_t(config.num_outputs), 0.0);

  // Uniform fan-in-scaled draws in canonical tensor order. ReLU layers use
  // the variance-preserving bound sqrt(6/fan_in); gate/projection matrices
  // use sqrt(3/fan_in). The forget-gate bias starts at 1 so early gradients
  // reach back through the recurrence.
  Rng rng(seed);
  auto fill = [&rng](Matrix *w, double bound) {
    for (auto &v : w->data) v = rng.uniform(-bound, bound);
  };
  auto fill_v = [&rng](Vector *v, double bound) {
    for (auto &x : *v) x = rng.uniform(-bound, bound);
  };
  for (size_t l = 0; l < config.layers.size(); l++) {
    if (std::holds_alternative<TdnnParams>(m.layers[l])) {
      auto &p = std::get<TdnnParams>(m.layers[l]);
      fill(&p.w, std::sqrt(6.0 / double(p.w.cols)));
      std::fill(p.b.begin(), p.b.end(), 0.0);
    } else {
      auto &p = std::get<LstmpParams>(m.layers[l]);
      const double ax = std::sqrt(3.0 / double(p.w_ix.cols));
      const double ar = std::sqrt(3.0 / double(p.w_ir.cols));
      fill(&p.w_ix, ax), fill(&p.w_fx, ax), fill(&p.w_cx, ax), fill(&p.w_ox, ax);
      fill(&p.w_ir, ar), fill(&p.w_fr, ar), fill(&p.w_cr, ar), fill(&p.w_or, ar);
      const double ap = 1.0 / std::sqrt(double(p.p_ic.size()));
      fill_v(&p.p_ic, ap), fill_v(&p.p_fc, ap), fill_v(&p.p_oc, ap);
      std::fill(p.b_i.begin(), p.b_i.end(), 0.0);
      std::fill(p.b_f.begin(), p.b_f.end(), 1.0);
      std::fill(p.b_c.begin(), p.b_c.end(), 0.0);
      std::fill(p.b_o.begin(), p.b_o.end(), 0.0);
      // m = o * tanh(c) has variance well below 1 at init; the larger bound
      // keeps the projected output from shrinking the forward signal.
      fill(&p.w_rm, std::sqrt(12.0 / double(p.w_rm.cols)));
    }
  }
  fill(&m.output.w, std::sqrt(6.0 / double(m.output.w.cols)));
  return m;
}

Matrix tdnn_forward(const LayerSpec &spec, const TdnnParams &params,
                    const Matrix &inputs) {
  const Matrix spliced = splice_for_context(spec.context, inputs);
  Matrix out(inputs.rows, size_t(spec.out_dim));
  affine_forward(params.w, params.b, spliced, &out);
  for (double &v : out.data) v = std::max(0.0, v);
  return out;
}

Matrix lstmp_forward(const LayerSpec &spec, const LstmpParams &params,
                     const Matrix &inputs, LstmCache *cache) {
  const size_t t_count = inputs.rows;
  const size_t cell = size_t(spec.cell_dim);
  const size_t proj = size_t(spec.proj_dim);
  const size_t in_dim = inputs.cols;

  Matrix r(t_count, proj);
  LstmCache local;
  LstmCache &cc = cache ? *cache : local;
  cc.i = cc.f = cc.g = cc.o = cc.c = cc.tanh_c = Matrix(t_count, cell);
  cc.m = Matrix(t_count, cell);

  Vector r_prev(proj, 0.0), c_prev(cell, 0.0);
  Vector a_i(cell), a_f(cell), a_g(cell), a_o(cell);

  for (size_t t = 0; t < t_count; t++) {
    const double *x = inputs.row(t);
    auto gate_pre = [&](const Matrix &wx, const Matrix &wr, const Vector &b,
                        Vector *out) {
      for (size_t k = 0; k < cell; k++) {
        const double *wxr = wx.row(k);
        double acc = b[k];
        for (size_t j = 0; j < in_dim; j++) acc += wxr[j] * x[j];
        const double *wrr = wr.row(k);
        for (size_t j = 0; j < proj; j++) acc += wrr[j] * r_prev[j];
        (*out)[k] = acc;
      }
    };
    gate_pre(params.w_ix, params.w_ir, params.b_i, &a_i);
    gate_pre(params.w_fx, params.w_fr, params.b_f, &a_f);
    gate_pre(params.w_cx, params.w_cr, params.b_c, &a_g);
    gate_pre(params.w_ox, params.w_or, params.b_o, &a_o);

    double *it = cc.i.row(t), *ft = cc.f.row(t), *gt = cc.g.row(t),
           *ot = cc.o.row(t), *ct = cc.c.row(t), *tc = cc.tanh_c.row(t),
           *mt = cc.m.row(t);
    for (size_t k = 0; k < cell; k++) {
      it[k] = sigmoid(a_i[k] + params.p_ic[k] * c_prev[k]);
      ft[k] = sigmoid(a_f[k] + params.p_fc[k] * c_prev[k]);
      gt[k] = std::tanh(a_g[k]);
      ct[k] = ft[k] * c_prev[k] + it[k] * gt[k];
      ot[k] = sigmoid(a_o[k] + params.p_oc[k] * ct[k]);
      tc[k] = std::tanh(ct[k]);
      mt[k] = ot[k] * tc[k];
    }

    double *rt = r.row(t);
    for (size_t j = 0; j < proj; j++) {
      const double *wr = params.w_rm.row(j);
      double acc = 0.0;
      for (size_t k = 0; k < cell; k++) acc += wr[k] * mt[k];
      rt[j] = acc;
    }
    std::memcpy(r_prev.data(), rt, proj * sizeof(double));
    std::memcpy(c_prev.data(), ct, cell * sizeof(double));
  }
  return r;
}

Matrix layer_forward(const LayerSpec &spec, const LayerParams &params,
                     const Matrix &inputs, LstmCache *cache) {
  if (spec.kind == LayerKind::kTdnn)
    return tdnn_forward(spec, std::get<TdnnParams>(params), inputs);
  return lstmp_forward(spec, std::get<LstmpParams>(params), inputs, cache);
}

static Matrix forward_impl(const Checkpoint &model, const Matrix &inputs,
                           const std::vector<Vector> *fixed_masks,
                           RunMode mode, double rate, Rng *rng,
                           ForwardCache *cache) {
  if (inputs.cols != size_t(model.config.input_dim))
    throw DomainError("forward: input dim " + std::to_string(inputs.cols) +
                      " != model input dim " +
                      std::to_string(model.config.input_dim));
  const size_t t_count = inputs.rows;
  const size_t num_layers = model.config.layers.size();

  ForwardCache local;
  ForwardCache &cc = cache ? *cache : local;
  cc.input = inputs;
  cc.spliced.assign(num_layers, Matrix());
  cc.pre_dropout.assign(num_layers, Matrix());
  cc.post_dropout.assign(num_layers, Matrix());
  cc.mask_scale.assign(num_layers, Vector());
  cc.lstm.assign(num_layers, LstmCache());

  const bool use_dropout =
      (fixed_masks != nullptr) || (mode == RunMode::kTrain && rate > 0.0);
  if (mode == RunMode::kTrain && rate > 0.0 && !fixed_masks && !rng)
    throw DomainError("forward: train-mode dropout needs an rng");

  const Matrix *cur = &cc.input;
  for (size_t l = 0; l < num_layers; l++) {
    const LayerSpec &spec = model.config.layers[l];
    if (spec.kind == LayerKind::kTdnn) {
      const auto &p = std::get<TdnnParams>(model.layers[l]);
      cc.spliced[l] = splice_for_context(spec.context, *cur);
      Matrix out(t_count, size_t(spec.out_dim));
      affine_forward(p.w, p.b, cc.spliced[l], &out);
      check_finite(out, l);  // before ReLU, which would mask a NaN
      for (double &v : out.data) v = std::max(0.0, v);
      cc.pre_dropout[l] = std::move(out);
    } else {
      const auto &p = std::get<LstmpParams>(model.layers[l]);
      cc.pre_dropout[l] = lstmp_forward(spec, p, *cur, &cc.lstm[l]);
      check_finite(cc.pre_dropout[l], l);
    }

    if (use_dropout) {
      Vector scale(t_count, 1.0);
      if (fixed_masks) {
        scale = (*fixed_masks)[l];
        if (scale.size() != t_count)
          throw DomainError("forward: mask length mismatch");
      } else {
        const double keep = 1.0 - rate;
        for (size_t t = 0; t < t_count; t++)
          scale[t] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
      }
      Matrix masked = cc.pre_dropout[l];
      for (size_t t = 0; t < t_count; t++) {
        double *row = masked.row(t);
        for (size_t c = 0; c < masked.cols; c++) row[c] *= scale[t];
      }
      cc.mask_scale[l] = std::move(scale);
      cc.post_dropout[l] = std::move(masked);
    } else {
      cc.mask_scale[l] = Vector(t_count, 1.0);
      cc.post_dropout[l] = cc.pre_dropout[l];
    }
    cur = &cc.post_dropout[l];
  }

  // Output affine + log-softmax.
  Matrix logits(t_count, size_t(model.config.num_outputs));
  affine_forward(model.output.w, model.output.b, *cur, &logits);
  check_finite(logits, num_layers);

  Matrix log_probs(t_count, logits.cols);
  for (size_t t = 0; t < t_count; t++) {
    const double *z = logits.row(t);
    double zmax = z[0];
    for (size_t k = 1; k < logits.cols; k++) zmax = std::max(zmax, z[k]);
    double sum = 0.0;
    for (size_t k = 0; k < logits.cols; k++) sum += std::exp(z[k] - zmax);
    const double lse = zmax + std::log(sum);
    double *out = log_probs.row(t);
    for (size_t k = 0; k < logits.cols; k++) out[k] = z[k] - lse;
  }
  cc.log_probs = log_probs;
  return log_probs;
}

Matrix forward(const Checkpoint &model, const Matrix &inputs, RunMode mode,
               double rate, Rng *rng, ForwardCache *cache) {
  return forward_impl(model, inputs, nullptr, mode, rate, rng, cache);
}

Matrix forward_with_masks(const Checkpoint &model, const Matrix &inputs,
                          const std::vector<Vector> &mask_scale,
                          ForwardCache *cache) {
  return forward_impl(model, inputs, &mask_scale, RunMode::kTrain, 0.0,
                      nullptr, cache);
}

double cross_entropy(const Matrix &log_probs,
                     const std::vector<int> &targets) {
  if (targets.size() != log_probs.rows)
    throw DomainError("cross_entropy: target length mismatch");
  double loss = 0.0;
  for (size_t t = 0; t < log_probs.rows; t++) {
    const int y = targets[t];
    if (y < 0 || size_t(y) >= log_probs.cols)
      throw DomainError("cross_entropy: target id " + std::to_string(y) +
                        " out of range");
    loss -= log_probs.at(t, size_t(y));
  }
  return loss / double(log_probs.rows);
}

double frame_accuracy(const Matrix &log_probs,
                      const std::vector<int> &targets) {
  if (targets.empty()) return 0.0;
  size_t correct = 0;
  for (size_t t = 0; t < log_probs.rows; t++) {
    const double *row = log_probs.row(t);
    size_t best = 0;
    for (size_t k = 1; k < log_probs.cols; k++)
      if (row[k] > row[best]) best = k;
    if (int(best) == targets[t]) correct++;
  }
  return double(correct) / double(log_probs.rows);
}

namespace {

// dW += dy^T x and db += dy accumulated over frames, dx = W^T dy.
void affine_backward(const Matrix &w, const Matrix &x, const Matrix &dy,
                     Matrix *dw, Vector *db, Matrix *dx) {
  for (size_t t = 0; t < x.rows; t++) {
    const double *xr = x.row(t);
    const double *dyr = dy.row(t);
    for (size_t i = 0; i < w.rows; i++) {
      const double d = dyr[i];
      if (d == 0.0) continue;
      double *dwr = dw->row(i);
      for (size_t j = 0; j < w.cols; j++) dwr[j] += d * xr[j];
      (*db)[i] += d;
    }
    if (dx) {
      double *dxr = dx->row(t);
      for (size_t i = 0; i < w.rows; i++) {
        const double d = dyr[i];
        if (d == 0.0) continue;
        const double *wr = w.row(i);
        for (size_t j = 0; j < w.cols; j++) dxr[j] += d * wr[j];
      }
    }
  }
}

// Scatter spliced-input gradients back onto frames (edges replicated).
void unsplice_accumulate(const std::vector<int> &context, const Matrix &dsp,
                         Matrix *dx) {
  const size_t t_count = dx->rows;
  const size_t d = dx->cols;
  for (size_t t = 0; t < t_count; t++) {
    const double *src = dsp.row(t);
    for (size_t c = 0; c < context.size(); c++) {
      const long tt = std::clamp<long>(long(t) + context[c], 0,
                                       long(t_count) - 1);
      double *dst = dx->row(size_t(tt));
      const double *s = src + c * d;
      for (size_t j = 0; j < d; j++) dst[j] += s[j];
    }
  }
}

void lstmp_backward(const LayerSpec &spec, const LstmpParams &p,
                    const Matrix &x, const LstmCache &cc, const Matrix &r,
                    const Matrix &d_r_ext, LstmpParams *g, Matrix *dx) {
  const size_t t_count = x.rows;
  const size_t cell = size_t(spec.cell_dim);
  const size_t proj = size_t(spec.proj_dim);
  const size_t in_dim = x.cols;

  Vector dr_next(proj, 0.0), dc_next(cell, 0.0);
  Vector dr(proj), dm(cell), dc(cell);
  Vector da_i(cell), da_f(cell), da_g(cell), da_o(cell);

  for (size_t t = t_count; t-- > 0;) {
    const double *it = cc.i.row(t), *ft = cc.f.row(t), *gt = cc.g.row(t),
                 *ot = cc.o.row(t), *ct = cc.c.row(t), *tc = cc.tanh_c.row(t),
                 *mt = cc.m.row(t);
    const double *c_prev = (t > 0) ? cc.c.row(t - 1) : nullptr;
    const double *r_prev = (t > 0) ? r.row(t - 1) : nullptr;

    for (size_t j = 0; j < proj; j++) dr[j] = d_r_ext.at(t, j) + dr_next[j];

    // Through the projection.
    for (size_t k = 0; k < cell; k++) dm[k] = 0.0;
    for (size_t j = 0; j < proj; j++) {
      const double d = dr[j];
      if (d == 0.0) continue;
      double *gw = g->w_rm.row(j);
      const double *wr = p.w_rm.row(j);
      for (size_t k = 0; k < cell; k++) {
        gw[k] += d * mt[k];
        dm[k] += d * wr[k];
      }
    }

    for (size_t k = 0; k < cell; k++) {
      const double do_k = dm[k] * tc[k];
      const double dtc_k = dm[k] * ot[k];
      da_o[k] = do_k * ot[k] * (1.0 - ot[k]);
      dc[k] = dtc_k * (1.0 - tc[k] * tc[k]) + dc_next[k] +
              da_o[k] * p.p_oc[k];
      g->p_oc[k] += da_o[k] * ct[k];

      const double cp = c_prev ? c_prev[k] : 0.0;
      const double df_k = dc[k] * cp;
      const double di_k = dc[k] * gt[k];
      const double dg_k = dc[k] * it[k];
      da_f[k] = df_k * ft[k] * (1.0 - ft[k]);
      da_i[k] = di_k * it[k] * (1.0 - it[k]);
      da_g[k] = dg_k * (1.0 - gt[k] * gt[k]);
      g->p_fc[k] += da_f[k] * cp;
      g->p_ic[k] += da_i[k] * cp;
      g->b_i[k] += da_i[k];
      g->b_f[k] += da_f[k];
      g->b_c[k] += da_g[k];
      g->b_o[k] += da_o[k];
      dc_next[k] = dc[k] * ft[k] + da_f[k] * p.p_fc[k] + da_i[k] * p.p_ic[k];
    }

    const double *x_t = x.row(t);
    double *dx_t = dx ? dx->row(t) : nullptr;
    std::fill(dr_next.begin(), dr_next.end(), 0.0);
    auto gate_acc = [&](const Vector &da, const Matrix &wx, const Matrix &wr,
                        Matrix *gwx, Matrix *gwr) {
      for (size_t k = 0; k < cell; k++) {
        const double d = da[k];
        if (d == 0.0) continue;
        double *gx = gwx->row(k);
        for (size_t j = 0; j < in_dim; j++) gx[j] += d * x_t[j];
        if (dx_t) {
          const double *wxr = wx.row(k);
          for (size_t j = 0; j < in_dim; j++) dx_t[j] += d * wxr[j];
        }
        if (r_prev) {
          double *gr = gwr->row(k);
          for (size_t j = 0; j < proj; j++) gr[j] += d * r_prev[j];
        }
        const double *wrr = wr.row(k);
        for (size_t j = 0; j < proj; j++) dr_next[j] += d * wrr[j];
      }
    };
    gate_acc(da_i, p.w_ix, p.w_ir, &g->w_ix, &g->w_ir);
    gate_acc(da_f, p.w_fx, p.w_fr, &g->w_fx, &g->w_fr);
    gate_acc(da_g, p.w_cx, p.w_cr, &g->w_cx, &g->w_cr);
    gate_acc(da_o, p.w_ox, p.w_or, &g->w_ox, &g->w_or);
    if (t == 0) std::fill(dr_next.begin(), dr_next.end(), 0.0);
  }
}

}  // namespace

BackwardResult backward(const Checkpoint &model, const ForwardCache &cache,
                        const std::vector<int> &targets) {
  const size_t t_count = cache.log_probs.rows;
  const size_t k_count = cache.log_probs.cols;
  if (targets.size() != t_count)
    throw DomainError("backward: target length mismatch");

  BackwardResult res;
  res.grads = zeros_like(model);
  res.loss = cross_entropy(cache.log_probs, targets);

  // d logits = (softmax - onehot) / T.
  Matrix dlogits(t_count, k_count);
  const double inv_t = 1.0 / double(t_count);
  for (size_t t = 0; t < t_count; t++) {
    const double *lp = cache.log_probs.row(t);
    double *d = dlogits.row(t);
    for (size_t k = 0; k < k_count; k++) d[k] = std::exp(lp[k]) * inv_t;
    d[size_t(targets[t])] -= inv_t;
  }

  const size_t num_layers = model.config.layers.size();
  const Matrix &last_out = cache.post_dropout[num_layers - 1];
  Matrix d_hidden(last_out.rows, last_out.cols);
  affine_backward(model.output.w, last_out, dlogits, &res.grads.output.w,
                  &res.grads.output.b, &d_hidden);

  for (size_t l = num_layers; l-- > 0;) {
    // Through the dropout mask.
    for (size_t t = 0; t < t_count; t++) {
      const double s = cache.mask_scale[l][t];
      double *row = d_hidden.row(t);
      for (size_t c = 0; c < d_hidden.cols; c++) row[c] *= s;
    }

    const Matrix &layer_in =
        (l == 0) ? cache.input : cache.post_dropout[l - 1];
    Matrix d_in(layer_in.rows, layer_in.cols);

    const LayerSpec &spec = model.config.layers[l];
    if (spec.kind == LayerKind::kTdnn) {
      const auto &p = std::get<TdnnParams>(model.layers[l]);
      auto &g = std::get<TdnnParams>(res.grads.layers[l]);
      // ReLU gate.
      for (size_t t = 0; t < t_count; t++) {
        const double *y = cache.pre_dropout[l].row(t);
        double *d = d_hidden.row(t);
        for (size_t c = 0; c < d_hidden.cols; c++)
          if (y[c] <= 0.0) d[c] = 0.0;
      }
      Matrix d_spliced(cache.spliced[l].rows, cache.spliced[l].cols);
      affine_backward(p.w, cache.spliced[l], d_hidden, &g.w, &g.b, &d_spliced);
      unsplice_accumulate(spec.context, d_spliced, &d_in);
    } else {
      const auto &p = std::get<LstmpParams>(model.layers[l]);
      auto &g = std::get<LstmpParams>(res.grads.layers[l]);
      lstmp_backward(spec, p, layer_in, cache.lstm[l], cache.pre_dropout[l],
                     d_hidden, &g, (l == 0) ? nullptr : &d_in);
    }
    if (l == 0) break;
    d_hidden = std::move(d_in);
  }
  return res;
}

ReceptiveField receptive_field(const ModelConfig &config) {
  ReceptiveField rf;
  for (const auto &l : config.layers) {
    if (l.kind == LayerKind::kTdnn) {
      int lo = 0, hi = 0;
      for (int o : l.context) {
        lo = std::min(lo, o);
        hi = std::max(hi, o);
      }
      rf.left += -lo;
      rf.right += hi;
    } else {
      rf.recurrent = true;
    }
  }
  return rf;
}

}  // namespace asrtk
