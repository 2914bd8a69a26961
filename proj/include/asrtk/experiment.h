// include/asrtk/experiment.h
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

#ifndef ASRTK_EXPERIMENT_H_
#define ASRTK_EXPERIMENT_H_

#include <map>
#include <string>
#include <vector>

#include "asrtk/augment.h"
#include "asrtk/config.h"
#include "asrtk/evaluation.h"
#include "asrtk/features.h"
#include "asrtk/manifest.h"
#include "asrtk/synth.h"
#include "asrtk/trainer.h"

namespace asrtk {

// Model-input features (MFCC -> +-2 splice -> recording embedding -> 300
// dim) for every manifest row, written as archives plus a JSONL index.
// Returns the index path.
std::string prepare_features(const Manifest &manifest,
                             const std::string &out_dir,
                             const FeatureConfig &feature_config, int jobs);

// Joins manifest rows with their feature archives and per-frame targets
// derived from the segment map. Ids with a _sp<factor> or condition suffix
// fall back to their source utterance's segments (scaled for speed copies).
TrainingSet load_training_set(const Manifest &manifest,
                              const std::string &feature_index_path,
                              const SegmentMap &segments,
                              int sample_rate_hz = 16000);

// Segment entries for every row of a derived manifest (condition copies
// reuse the source segments, speed copies scale them).
SegmentMap derive_segments(const Manifest &manifest, const SegmentMap &base,
                           int sample_rate_hz = 16000);

struct FourSetups {
  Checkpoint baseline;
  Checkpoint stage1_only;
  Checkpoint stage2_only;
  Checkpoint two_staged;
};

// The four training setups: baseline (clean stage 1), stage1_only
// (multi-condition stage 1), stage2_only (transfer from baseline),
// two_staged (transfer from stage1_only). All four share the model
// initialization seed and the per-stage batch-order seeds.
FourSetups run_two_staged(const Manifest &clean_manifest,
                          const SegmentMap &clean_segments,
                          const Manifest &target_train_manifest,
                          const SegmentMap &target_segments,
                          const std::vector<RoomGroup> &rirs,
                          const NoisePool &pool, const ExperimentConfig &config,
                          const std::string &workdir);

struct EvalResult {
  double frame_accuracy = 0.0;
  WerReport report;
  std::vector<WordsEntry> hyps;
};

// Eval-mode forward, greedy decode and WER scoring over a manifest.
EvalResult evaluate_checkpoint(const Checkpoint &model,
                               const Manifest &eval_manifest,
                               const std::string &feature_index_path,
                               const SegmentMap &segments,
                               const SymbolTable &symbols, int jobs = 1);

struct LosoOutcome {
  std::map<std::string, WerReport> reports;  // per setup
  std::string report_dir;
};

// The leave-one-speaker-out protocol: stage 1 (and the baseline) trained
// once, stage 2 run per fold from the shared checkpoints, each fold scored
// on its held-out speaker. Folds are resumable; a config-hash mismatch
// against an existing workdir is refused.
LosoOutcome run_loso(const ExperimentConfig &config);

// Rebuilds the report tables from the per-fold score files of a completed
// (or partially completed) run_loso workdir.
LosoOutcome aggregate_loso_reports(const ExperimentConfig &config);

}  // namespace asrtk

#endif  // ASRTK_EXPERIMENT_H_
