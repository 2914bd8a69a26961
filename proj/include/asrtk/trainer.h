// include/asrtk/trainer.h
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

#ifndef ASRTK_TRAINER_H_
#define ASRTK_TRAINER_H_

#include <string>
#include <vector>

#include "asrtk/checkpoint.h"
#include "asrtk/model.h"

namespace asrtk {

enum class Stage { kStage1, kStage2 };

struct StageConfig {
  Stage stage = Stage::kStage1;
  double lr_init = 1e-3;
  double lr_final = 1e-4;
  int epochs = 4;
  DropoutSchedule dropout = DropoutSchedule::stage1_default();
  int batch_utts = 4;
  uint64_t seed = 0;

  // Stage-1 column: lr 1e-3 -> 1e-4, dropout ramp 0, 0@0.2, 0.3@0.5, 0.
  static StageConfig stage1_defaults();
  // Stage-2 column: lr 1e-6 -> 1e-7, no dropout.
  static StageConfig stage2_defaults();
};

// Geometric interpolation lr_init * (lr_final/lr_init)^progress.
double lr_at(const StageConfig &config, double progress);

struct TrainingUtt {
  std::string utt_id;
  Matrix features;           // T x input_dim
  std::vector<int> targets;  // length T
};

struct TrainingSet {
  std::vector<TrainingUtt> utts;

  size_t total_frames() const {
    size_t n = 0;
    for (const auto &u : utts) n += u.targets.size();
    return n;
  }
};

struct StepRecord {
  size_t step = 0;
  int epoch = 0;
  double progress = 0.0;
  double lr = 0.0;
  double dropout = 0.0;
  double loss = 0.0;
  double frame_acc = 0.0;
};

struct TrainResult {
  Checkpoint model;
  std::vector<StepRecord> metrics;
};

// Plain SGD over epochs of seeded shuffled batches. Learning rate and
// dropout rate follow global progress. Gradients within a batch are reduced
// in utterance order, so the result does not depend on `jobs`. A NaN loss
// aborts with NumericError; when epoch_checkpoint_dir is set, per-epoch
// checkpoints are left behind so the last good state survives the abort.
TrainResult train_stage(const Checkpoint &init, const TrainingSet &data,
                        const StageConfig &config,
                        const std::string &epoch_checkpoint_dir = "",
                        int jobs = 1);

void write_metrics_csv(const std::vector<StepRecord> &metrics,
                       const std::string &config_hash,
                       const std::string &path);

// Full weight transfer: every tensor copied verbatim (including the output
// layer), nothing frozen. The architectures must match exactly; mismatches
// raise TransferError naming the differing tensors.
Checkpoint transfer_init(const Checkpoint &source,
                         const ModelConfig &target_config);

}  // namespace asrtk

#endif  // ASRTK_TRAINER_H_
