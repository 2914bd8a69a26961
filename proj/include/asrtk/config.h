// include/asrtk/config.h
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

#ifndef ASRTK_CONFIG_H_
#define ASRTK_CONFIG_H_

#include <string>

#include "asrtk/features.h"
#include "asrtk/trainer.h"

namespace asrtk {

struct ExperimentPaths {
  std::string clean_manifest;
  std::string clean_segments;
  std::string target_manifest;
  std::string target_segments;
  std::string rir_dir;
  std::string noise_dir;
  std::string symbols;
  std::string workdir;
};

struct AugmentationConfig {
  double snr_db_min = 10.0;
  double snr_db_max = 20.0;
  int max_superposed_noises = 3;
  bool speed_perturb = true;
};

struct ModelSizeConfig {
  double scale_factor = 1.0 / 16.0;
  int num_outputs = 40;
};

struct ScoringConfig {
  bool normalize_case = false;  // scoring is case sensitive by default
};

// One JSON document describing a full experiment. Unknown keys anywhere in
// the document are rejected; the canonical hash of the parsed config is
// embedded in every derived artifact and checked on resume.
struct ExperimentConfig {
  uint64_t seed = 0;
  int jobs = 1;
  ExperimentPaths paths;
  AugmentationConfig augmentation;
  FeatureConfig features;
  ModelSizeConfig model;
  StageConfig stage1 = StageConfig::stage1_defaults();
  StageConfig stage2 = StageConfig::stage2_defaults();
  ScoringConfig scoring;
};

ExperimentConfig parse_experiment_config(const std::string &path);
ExperimentConfig parse_experiment_config_text(const std::string &text);

// Canonical serialization and its FNV-1a hash (16 hex digits).
std::string experiment_config_canonical(const ExperimentConfig &config);
std::string experiment_config_hash(const ExperimentConfig &config);

}  // namespace asrtk

#endif  // ASRTK_CONFIG_H_
