// src/trainer.cc
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

#include "asrtk/trainer.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "asrtk/error.h"
#include "asrtk/parallel.h"

namespace fs = std::filesystem;

namespace asrtk {

StageConfig StageConfig::stage1_defaults() {
  StageConfig c;
  c.stage = Stage::kStage1;
  c.lr_init = 1e-3;
  c.lr_final = 1e-4;
  c.epochs = 4;
  c.dropout = DropoutSchedule::stage1_default();
  return c;
}

StageConfig StageConfig::stage2_defaults() {
  StageConfig c;
  c.stage = Stage::kStage2;
  c.lr_init = 1e-6;
  c.lr_final = 1e-7;
  c.epochs = 4;
  c.dropout = DropoutSchedule::constant(0.0);
  return c;
}

double lr_at(const StageConfig &config, double progress) {
  if (progress < 0.0 || progress > 1.0)
    throw DomainError("lr_at: progress out of [0,1]");
  if (config.lr_init <= 0.0 || config.lr_final <= 0.0)
    throw ConfigError("lr_at: learning rates must be positive");
  return config.lr_init *
         std::pow(config.lr_final / config.lr_init, progress);
}

TrainResult train_stage(const Checkpoint &init, const TrainingSet &data,
                        const StageConfig &config,
                        const std::string &epoch_checkpoint_dir, int jobs) {
  TrainResult res;
  res.model = init;
  if (config.epochs <= 0 || data.utts.empty()) return res;

  for (const auto &u : data.utts) {
    if (u.features.rows != u.targets.size())
      throw DomainError("train_stage: " + u.utt_id + " has " +
                        std::to_string(u.features.rows) + " frames but " +
                        std::to_string(u.targets.size()) + " targets");
    if (u.features.cols != size_t(init.config.input_dim))
      throw DomainError("train_stage: " + u.utt_id + " feature dim " +
                        std::to_string(u.features.cols) +
                        " != model input dim " +
                        std::to_string(init.config.input_dim));
  }

  const size_t n = data.utts.size();
  const size_t batch = size_t(std::max(1, config.batch_utts));
  const size_t steps_per_epoch = (n + batch - 1) / batch;
  const size_t total_steps = size_t(config.epochs) * steps_per_epoch;

  Rng rng(config.seed);
  auto refs = tensor_refs(&res.model);

  size_t step = 0;
  for (int epoch = 0; epoch < config.epochs; epoch++) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; i++) order[i] = i;
    rng.shuffle(&order);

    for (size_t b = 0; b < steps_per_epoch; b++, step++) {
      const double progress =
          (total_steps > 1) ? double(step) / double(total_steps - 1) : 0.0;
      const double lr = lr_at(config, progress);
      const double rate = dropout_rate(config.dropout, progress);

      const size_t lo = b * batch;
      const size_t hi = std::min(n, lo + batch);
      const size_t batch_size = hi - lo;

      // Masks are drawn sequentially up front so that worker scheduling
      // cannot change the draws.
      const size_t num_layers = init.config.layers.size();
      std::vector<std::vector<Vector>> masks(batch_size);
      size_t batch_frames = 0;
      for (size_t k = 0; k < batch_size; k++) {
        const TrainingUtt &utt = data.utts[order[lo + k]];
        batch_frames += utt.targets.size();
        masks[k].assign(num_layers, Vector(utt.targets.size(), 1.0));
        if (rate > 0.0) {
          const double keep = 1.0 - rate;
          for (size_t l = 0; l < num_layers; l++)
            for (size_t t = 0; t < utt.targets.size(); t++)
              masks[k][l][t] = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
        }
      }

      std::vector<BackwardResult> partial(batch_size);
      std::vector<double> acc(batch_size, 0.0);
      parallel_for(batch_size, jobs, [&](size_t k) {
        const TrainingUtt &utt = data.utts[order[lo + k]];
        ForwardCache cache;
        forward_with_masks(res.model, utt.features, masks[k], &cache);
        partial[k] = backward(res.model, cache, utt.targets);
        acc[k] = frame_accuracy(cache.log_probs, utt.targets);
      });

      // Frame-weighted reduction in utterance order.
      double loss = 0.0, frame_acc_sum = 0.0;
      Checkpoint grad_sum = zeros_like(res.model);
      auto grad_refs = tensor_refs(&grad_sum);
      for (size_t k = 0; k < batch_size; k++) {
        const double w = double(data.utts[order[lo + k]].targets.size()) /
                         double(batch_frames);
        loss += partial[k].loss * w;
        frame_acc_sum += acc[k] * w;
        auto p_refs = tensor_refs(&partial[k].grads);
        for (size_t r = 0; r < grad_refs.size(); r++)
          for (size_t i = 0; i < grad_refs[r].size; i++)
            grad_refs[r].data[i] += w * p_refs[r].data[i];
      }

      if (!std::isfinite(loss))
        throw NumericError("train_stage: non-finite loss at step " +
                           std::to_string(step) +
                           (epoch_checkpoint_dir.empty()
                                ? ""
                                : "; last good checkpoint kept in " +
                                      epoch_checkpoint_dir));

      for (size_t r = 0; r < refs.size(); r++)
        for (size_t i = 0; i < refs[r].size; i++)
          refs[r].data[i] -= lr * grad_refs[r].data[i];

      StepRecord rec;
      rec.step = step;
      rec.epoch = epoch;
      rec.progress = progress;
      rec.lr = lr;
      rec.dropout = rate;
      rec.loss = loss;
      rec.frame_acc = frame_acc_sum;
      res.metrics.push_back(rec);
    }

    if (!epoch_checkpoint_dir.empty()) {
      fs::create_directories(epoch_checkpoint_dir);
      Checkpoint snap = res.model;
      snap.meta.epoch = epoch + 1;
      save_checkpoint(snap, (fs::path(epoch_checkpoint_dir) /
                             ("epoch_" + std::to_string(epoch + 1) + ".ckpt"))
                                .string());
    }
  }

  res.model.meta.stage =
      config.stage == Stage::kStage1 ? "stage1" : "stage2";
  res.model.meta.epoch = config.epochs;
  return res;
}

void write_metrics_csv(const std::vector<StepRecord> &metrics,
                       const std::string &config_hash,
                       const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open metrics csv for writing: " + path);
  out << "# config_hash=" << config_hash << '\n';
  out << "step,epoch,progress,lr,dropout,loss,frame_acc\n";
  for (const auto &r : metrics)
    out << r.step << ',' << r.epoch << ',' << r.progress << ',' << r.lr << ','
        << r.dropout << ',' << r.loss << ',' << r.frame_acc << '\n';
}

Checkpoint transfer_init(const Checkpoint &source,
                         const ModelConfig &target_config) {
  if (model_config_hash(source.config) != model_config_hash(target_config)) {
    // Name the differing tensors for the error message.
    Checkpoint probe = build_model(target_config, 0);
    auto src_refs = tensor_refs(const_cast<Checkpoint *>(&source));
    auto dst_refs = tensor_refs(&probe);
    std::string diff;
    const size_t common = std::min(src_refs.size(), dst_refs.size());
    for (size_t i = 0; i < common; i++) {
      if (src_refs[i].name != dst_refs[i].name ||
          src_refs[i].shape != dst_refs[i].shape) {
        if (!diff.empty()) diff += ", ";
        diff += dst_refs[i].name;
      }
    }
    if (src_refs.size() != dst_refs.size()) {
      if (!diff.empty()) diff += ", ";
      diff += "layer count " + std::to_string(src_refs.size()) + " vs " +
              std::to_string(dst_refs.size());
    }
    if (source.config.num_outputs != target_config.num_outputs) {
      if (!diff.empty()) diff += ", ";
      diff += "output.w (num_outputs " +
              std::to_string(source.config.num_outputs) + " vs " +
              std::to_string(target_config.num_outputs) + ")";
    }
    throw TransferError("transfer_init: architecture mismatch: " + diff);
  }

  Checkpoint target = source;
  target.meta.stage = "stage2-init";
  target.meta.epoch = 0;
  return target;
}

}  // namespace asrtk
