// src/config.cc
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

#include "asrtk/config.h"

#include <fstream>
#include <set>

#include <json.hpp>

#include "asrtk/error.h"
#include "asrtk/rng.h"

namespace asrtk {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json &j, const std::set<std::string> &known,
                         const std::string &where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config key \"" + it.key() + "\" in " + where);
}

DropoutSchedule schedule_from_json(const json &j, const std::string &where) {
  DropoutSchedule s;
  s.breakpoints.clear();
  for (const auto &bp : j) {
    if (!bp.is_array() || bp.size() != 2)
      throw ConfigError(where + ": dropout_schedule entries must be "
                        "[progress, rate] pairs");
    s.breakpoints.emplace_back(bp[0].get<double>(), bp[1].get<double>());
  }
  if (s.breakpoints.size() < 2 || s.breakpoints.front().first != 0.0 ||
      s.breakpoints.back().first != 1.0)
    throw ConfigError(where + ": dropout_schedule must span progress 0..1");
  for (size_t i = 1; i < s.breakpoints.size(); i++)
    if (s.breakpoints[i].first <= s.breakpoints[i - 1].first)
      throw ConfigError(where + ": dropout_schedule progress must increase");
  for (const auto &[p, r] : s.breakpoints)
    if (r < 0.0 || r >= 1.0)
      throw ConfigError(where + ": dropout rates must be in [0, 1)");
  return s;
}

StageConfig stage_from_json(const json &j, StageConfig defaults,
                            const std::string &where) {
  reject_unknown_keys(
      j, {"lr_init", "lr_final", "epochs", "batch_utts", "dropout_schedule"},
      where);
  StageConfig c = defaults;
  if (j.contains("lr_init")) c.lr_init = j["lr_init"].get<double>();
  if (j.contains("lr_final")) c.lr_final = j["lr_final"].get<double>();
  if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
  if (j.contains("batch_utts")) c.batch_utts = j["batch_utts"].get<int>();
  if (j.contains("dropout_schedule"))
    c.dropout = schedule_from_json(j["dropout_schedule"], where);
  if (c.lr_init <= 0.0 || c.lr_final <= 0.0)
    throw ConfigError(where + ": learning rates must be positive");
  if (c.lr_final >= c.lr_init)
    throw ConfigError(where + ": lr_final must be below lr_init");
  if (c.epochs < 0) throw ConfigError(where + ": epochs must be >= 0");
  if (c.batch_utts < 1) throw ConfigError(where + ": batch_utts must be >= 1");
  return c;
}

json schedule_to_json(const DropoutSchedule &s) {
  json arr = json::array();
  for (const auto &[p, r] : s.breakpoints) arr.push_back({p, r});
  return arr;
}

json stage_to_json(const StageConfig &c) {
  json j;
  j["lr_init"] = c.lr_init;
  j["lr_final"] = c.lr_final;
  j["epochs"] = c.epochs;
  j["batch_utts"] = c.batch_utts;
  j["dropout_schedule"] = schedule_to_json(c.dropout);
  return j;
}

}  // namespace

ExperimentConfig parse_experiment_config_text(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j,
                      {"seed", "jobs", "paths", "augmentation", "features",
                       "model", "stage1", "stage2", "scoring"},
                      "config root");

  ExperimentConfig c;
  try {
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");

    if (j.contains("paths")) {
      const json &p = j["paths"];
      reject_unknown_keys(p,
                          {"clean_manifest", "clean_segments",
                           "target_manifest", "target_segments", "rir_dir",
                           "noise_dir", "symbols", "workdir"},
                          "paths");
      auto get = [&](const char *key, std::string *dst) {
        if (p.contains(key)) *dst = p[key].get<std::string>();
      };
      get("clean_manifest", &c.paths.clean_manifest);
      get("clean_segments", &c.paths.clean_segments);
      get("target_manifest", &c.paths.target_manifest);
      get("target_segments", &c.paths.target_segments);
      get("rir_dir", &c.paths.rir_dir);
      get("noise_dir", &c.paths.noise_dir);
      get("symbols", &c.paths.symbols);
      get("workdir", &c.paths.workdir);
    }

    if (j.contains("augmentation")) {
      const json &a = j["augmentation"];
      reject_unknown_keys(a,
                          {"snr_db_min", "snr_db_max",
                           "max_superposed_noises", "speed_perturb"},
                          "augmentation");
      if (a.contains("snr_db_min"))
        c.augmentation.snr_db_min = a["snr_db_min"].get<double>();
      if (a.contains("snr_db_max"))
        c.augmentation.snr_db_max = a["snr_db_max"].get<double>();
      if (a.contains("max_superposed_noises"))
        c.augmentation.max_superposed_noises =
            a["max_superposed_noises"].get<int>();
      if (a.contains("speed_perturb"))
        c.augmentation.speed_perturb = a["speed_perturb"].get<bool>();
      if (c.augmentation.snr_db_max < c.augmentation.snr_db_min)
        throw ConfigError("augmentation: snr_db_max below snr_db_min");
      if (c.augmentation.max_superposed_noises < 1)
        throw ConfigError("augmentation: max_superposed_noises must be >= 1");
    }

    if (j.contains("features")) {
      const json &f = j["features"];
      reject_unknown_keys(f, {"cepstral_mean_norm"}, "features");
      if (f.contains("cepstral_mean_norm"))
        c.features.cepstral_mean_norm = f["cepstral_mean_norm"].get<bool>();
    }

    if (j.contains("model")) {
      const json &m = j["model"];
      reject_unknown_keys(m, {"scale_factor", "num_outputs"}, "model");
      if (m.contains("scale_factor"))
        c.model.scale_factor = m["scale_factor"].get<double>();
      if (m.contains("num_outputs"))
        c.model.num_outputs = m["num_outputs"].get<int>();
      if (c.model.scale_factor <= 0.0 || c.model.scale_factor > 1.0)
        throw ConfigError("model: scale_factor must be in (0, 1]");
      if (c.model.num_outputs < 2)
        throw ConfigError("model: num_outputs must be >= 2");
    }

    if (j.contains("stage1"))
      c.stage1 = stage_from_json(j["stage1"], StageConfig::stage1_defaults(),
                                 "stage1");
    if (j.contains("stage2"))
      c.stage2 = stage_from_json(j["stage2"], StageConfig::stage2_defaults(),
                                 "stage2");

    if (j.contains("scoring")) {
      const json &s = j["scoring"];
      reject_unknown_keys(s, {"normalize_case"}, "scoring");
      if (s.contains("normalize_case"))
        c.scoring.normalize_case = s["normalize_case"].get<bool>();
    }
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return c;
}

ExperimentConfig parse_experiment_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_experiment_config_text(text);
}

std::string experiment_config_canonical(const ExperimentConfig &c) {
  json j;
  j["seed"] = c.seed;
  j["jobs"] = 1;  // parallelism must not change results, keep it out of the hash
  j["paths"] = {{"clean_manifest", c.paths.clean_manifest},
                {"clean_segments", c.paths.clean_segments},
                {"target_manifest", c.paths.target_manifest},
                {"target_segments", c.paths.target_segments},
                {"rir_dir", c.paths.rir_dir},
                {"noise_dir", c.paths.noise_dir},
                {"symbols", c.paths.symbols},
                {"workdir", c.paths.workdir}};
  j["augmentation"] = {
      {"snr_db_min", c.augmentation.snr_db_min},
      {"snr_db_max", c.augmentation.snr_db_max},
      {"max_superposed_noises", c.augmentation.max_superposed_noises},
      {"speed_perturb", c.augmentation.speed_perturb}};
  j["features"] = {{"cepstral_mean_norm", c.features.cepstral_mean_norm}};
  j["model"] = {{"scale_factor", c.model.scale_factor},
                {"num_outputs", c.model.num_outputs}};
  j["stage1"] = stage_to_json(c.stage1);
  j["stage2"] = stage_to_json(c.stage2);
  j["scoring"] = {{"normalize_case", c.scoring.normalize_case}};
  return j.dump();
}

std::string experiment_config_hash(const ExperimentConfig &config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                (unsigned long long)fnv1a64(
                    experiment_config_canonical(config)));
  return buf;
}

}  // namespace asrtk
