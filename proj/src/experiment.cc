// src/experiment.cc
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

#include "asrtk/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "asrtk/checkpoint.h"
#include "asrtk/error.h"
#include "asrtk/parallel.h"

namespace fs = std::filesystem;

namespace asrtk {

using nlohmann::json;

std::string prepare_features(const Manifest &manifest,
                             const std::string &out_dir,
                             const FeatureConfig &feature_config, int jobs) {
  fs::create_directories(out_dir);
  std::vector<FeatureIndexEntry> entries(manifest.size());
  parallel_for(manifest.size(), jobs, [&](size_t i) {
    const Utterance &u = manifest.utterances[i];
    AudioSignal audio = read_wav(u.audio_path);
    FeatureMatrix mfcc = compute_mfcc(audio, feature_config);
    FeatureMatrix spliced = splice(mfcc, 2, 2);
    RecordingEmbedding emb = recording_embedding(mfcc, u.utt_id);
    Matrix input = assemble_input(spliced, emb);

    FeatureIndexEntry e;
    e.utt_id = u.utt_id;
    e.path = (fs::path(out_dir) / (u.utt_id + ".fea")).string();
    e.num_frames = uint32_t(input.rows);
    e.dim = uint32_t(input.cols);
    write_feature_archive(input, e.path);
    entries[i] = std::move(e);
  });
  const std::string index_path = (fs::path(out_dir) / "index.jsonl").string();
  write_feature_index(entries, index_path);
  return index_path;
}

SegmentMap derive_segments(const Manifest &manifest, const SegmentMap &base,
                           int sample_rate_hz) {
  SegmentMap out;
  for (const auto &u : manifest.utterances) {
    std::string id = u.utt_id;
    if (auto it = base.find(id); it != base.end()) {
      out[u.utt_id] = it->second;
      continue;
    }
    // Speed suffix is outermost: <id>[_<condition>][_sp<factor>].
    double factor = 1.0;
    const size_t sp = id.rfind("_sp");
    if (sp != std::string::npos) {
      try {
        factor = std::stod(id.substr(sp + 3));
        id = id.substr(0, sp);
      } catch (const std::exception &) {
        // not a speed suffix after all
      }
    }
    auto it = base.find(id);
    if (it == base.end()) {
      for (const char *suffix : {"_reverb_real_noise", "_reverb"}) {
        const size_t pos = id.rfind(suffix);
        if (pos != std::string::npos &&
            pos + std::strlen(suffix) == id.size()) {
          it = base.find(id.substr(0, pos));
          break;
        }
      }
    }
    if (it == base.end())
      throw DataError("derive_segments: no segments for " + u.utt_id);
    if (factor == 1.0) {
      out[u.utt_id] = it->second;
    } else {
      const int64_t new_len =
          int64_t(std::llround(u.duration_s * sample_rate_hz));
      out[u.utt_id] = scale_segments(it->second, factor, new_len);
    }
  }
  return out;
}

TrainingSet load_training_set(const Manifest &manifest,
                              const std::string &feature_index_path,
                              const SegmentMap &segments,
                              int sample_rate_hz) {
  std::map<std::string, FeatureIndexEntry> index;
  for (auto &e : read_feature_index(feature_index_path))
    index[e.utt_id] = e;

  const SegmentMap derived = derive_segments(manifest, segments,
                                             sample_rate_hz);
  const size_t window = size_t(std::lround(25.0 * sample_rate_hz / 1000.0));
  const size_t shift = size_t(std::lround(10.0 * sample_rate_hz / 1000.0));

  TrainingSet set;
  set.utts.reserve(manifest.size());
  for (const auto &u : manifest.utterances) {
    auto it = index.find(u.utt_id);
    if (it == index.end())
      throw DataError("load_training_set: no features for " + u.utt_id);
    TrainingUtt tu;
    tu.utt_id = u.utt_id;
    tu.features = read_feature_archive(it->second.path);
    tu.targets = targets_from_segments(derived.at(u.utt_id),
                                       tu.features.rows, window, shift);
    set.utts.push_back(std::move(tu));
  }
  return set;
}

namespace {

AugmentationSpec spec_from_config(const ExperimentConfig &config) {
  AugmentationSpec spec;
  spec.snr_db_min = config.augmentation.snr_db_min;
  spec.snr_db_max = config.augmentation.snr_db_max;
  spec.max_superposed_noises = config.augmentation.max_superposed_noises;
  return spec;
}

Manifest maybe_speed_perturb(const Manifest &manifest, bool enabled,
                             const std::string &out_dir, int jobs) {
  if (!enabled) return manifest;
  return expand_speed_perturb(manifest, out_dir, {0.9, 1.0, 1.1}, jobs);
}

struct ScoredSetup {
  std::vector<UttScore> scores;
  double frame_acc = 0.0;
  size_t frames = 0;
};

}  // namespace

FourSetups run_two_staged(const Manifest &clean_manifest,
                          const SegmentMap &clean_segments,
                          const Manifest &target_train_manifest,
                          const SegmentMap &target_segments,
                          const std::vector<RoomGroup> &rirs,
                          const NoisePool &pool,
                          const ExperimentConfig &config,
                          const std::string &workdir) {
  const int jobs = config.jobs;
  fs::create_directories(workdir);
  const std::string hash = experiment_config_hash(config);

  // Stage-1 data: 3-fold multi-condition merge of the clean corpus.
  const fs::path aug_dir = fs::path(workdir) / "aug";
  MulticonditionResult multi =
      build_multicondition(clean_manifest, rirs, pool, config.seed,
                           spec_from_config(config),
                           (aug_dir / "audio").string(), jobs);
  write_manifest(multi.manifest, (aug_dir / "manifest.jsonl").string());
  write_provenance(multi.provenance, (aug_dir / "provenance.jsonl").string());

  // Speed perturbation runs in every setup.
  const bool sp = config.augmentation.speed_perturb;
  const fs::path sp_dir = fs::path(workdir) / "sp";
  Manifest clean_tr =
      maybe_speed_perturb(clean_manifest, sp, (sp_dir / "clean").string(), jobs);
  Manifest multi_tr =
      maybe_speed_perturb(multi.manifest, sp, (sp_dir / "multi").string(), jobs);
  Manifest target_tr = maybe_speed_perturb(target_train_manifest, sp,
                                           (sp_dir / "target").string(), jobs);

  const fs::path feat_dir = fs::path(workdir) / "features";
  const FeatureConfig feature_config = config.features;
  const std::string clean_index =
      prepare_features(clean_tr, (feat_dir / "clean").string(),
                       feature_config, jobs);
  const std::string multi_index =
      prepare_features(multi_tr, (feat_dir / "multi").string(),
                       feature_config, jobs);
  const std::string target_index =
      prepare_features(target_tr, (feat_dir / "target").string(),
                       feature_config, jobs);

  TrainingSet clean_set =
      load_training_set(clean_tr, clean_index, clean_segments);
  TrainingSet multi_set =
      load_training_set(multi_tr, multi_index, clean_segments);
  TrainingSet target_set =
      load_training_set(target_tr, target_index, target_segments);

  const ModelConfig model_config =
      make_model_config(config.model.scale_factor, config.model.num_outputs);
  const Checkpoint init =
      build_model(model_config, derive_seed(config.seed, "model", "init"));

  StageConfig s1 = config.stage1;
  s1.stage = Stage::kStage1;
  s1.seed = derive_seed(config.seed, "stage1", "batches");
  StageConfig s2 = config.stage2;
  s2.stage = Stage::kStage2;
  s2.seed = derive_seed(config.seed, "stage2", "batches");

  const fs::path ckpt_dir = fs::path(workdir) / "checkpoints";
  fs::create_directories(ckpt_dir);
  auto finish = [&](TrainResult result, const std::string &tag) {
    result.model.meta.stage = tag;
    save_checkpoint(result.model, (ckpt_dir / (tag + ".ckpt")).string());
    write_metrics_csv(result.metrics, hash,
                      (ckpt_dir / (tag + "_metrics.csv")).string());
    return result.model;
  };

  FourSetups setups;
  setups.baseline = finish(train_stage(init, clean_set, s1, "", jobs),
                           "baseline");
  setups.stage1_only = finish(train_stage(init, multi_set, s1, "", jobs),
                              "stage1_only");
  setups.stage2_only =
      finish(train_stage(transfer_init(setups.baseline, model_config),
                         target_set, s2, "", jobs),
             "stage2_only");
  setups.two_staged =
      finish(train_stage(transfer_init(setups.stage1_only, model_config),
                         target_set, s2, "", jobs),
             "two_staged");
  return setups;
}

EvalResult evaluate_checkpoint(const Checkpoint &model,
                               const Manifest &eval_manifest,
                               const std::string &feature_index_path,
                               const SegmentMap &segments,
                               const SymbolTable &symbols, int jobs) {
  std::map<std::string, FeatureIndexEntry> index;
  for (auto &e : read_feature_index(feature_index_path))
    index[e.utt_id] = e;
  const SegmentMap derived = derive_segments(eval_manifest, segments);
  const size_t window = 400, shift = 160;  // 25/10 ms at the 16 kHz corpus rate

  const size_t n = eval_manifest.size();
  std::vector<UttScore> scores(n);
  std::vector<WordsEntry> hyps(n);
  std::vector<size_t> correct(n, 0), frames(n, 0);
  parallel_for(n, jobs, [&](size_t i) {
    const Utterance &u = eval_manifest.utterances[i];
    auto it = index.find(u.utt_id);
    if (it == index.end())
      throw DataError("evaluate_checkpoint: no features for " + u.utt_id);
    const Matrix feats = read_feature_archive(it->second.path);
    const Matrix log_probs = forward(model, feats, RunMode::kEval);

    const std::vector<int> targets = targets_from_segments(
        derived.at(u.utt_id), log_probs.rows, window, shift);
    for (size_t t = 0; t < log_probs.rows; t++) {
      const double *row = log_probs.row(t);
      size_t best = 0;
      for (size_t k = 1; k < log_probs.cols; k++)
        if (row[k] > row[best]) best = k;
      if (int(best) == targets[t]) correct[i]++;
    }
    frames[i] = log_probs.rows;

    hyps[i].utt_id = u.utt_id;
    hyps[i].words = greedy_decode(log_probs, symbols);
    scores[i].utt_id = u.utt_id;
    scores[i].alignment = align_words(u.transcript, hyps[i].words);
  });

  std::map<std::string, std::string> utt2spk;
  for (const auto &u : eval_manifest.utterances)
    utt2spk[u.utt_id] = u.speaker_id;

  EvalResult res;
  size_t total_correct = 0, total_frames = 0;
  for (size_t i = 0; i < n; i++) {
    total_correct += correct[i];
    total_frames += frames[i];
  }
  res.frame_accuracy =
      total_frames ? double(total_correct) / double(total_frames) : 0.0;
  res.report = build_wer_report(scores, utt2spk);
  res.hyps = std::move(hyps);
  return res;
}

namespace {

void write_json_file(const json &j, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  json j;
  in >> j;
  return j;
}

const char *kSetupNames[4] = {"baseline", "stage1_only", "stage2_only",
                              "two_staged"};

}  // namespace

LosoOutcome run_loso(const ExperimentConfig &config) {
  const std::string hash = experiment_config_hash(config);
  const fs::path workdir = config.paths.workdir;
  fs::create_directories(workdir);

  // Refuse to resume someone else's workdir.
  const fs::path meta_path = workdir / "run_meta.json";
  if (fs::exists(meta_path)) {
    const json meta = read_json_file(meta_path.string());
    if (meta.value("config_hash", "") != hash)
      throw ConfigError("workdir " + workdir.string() +
                        " was produced with a different config (hash " +
                        meta.value("config_hash", "?") + " vs " + hash + ")");
  } else {
    write_json_file({{"config_hash", hash}}, meta_path.string());
  }

  const Manifest clean = read_manifest(config.paths.clean_manifest);
  const SegmentMap clean_segs = read_segments(config.paths.clean_segments);
  const Manifest target = read_manifest(config.paths.target_manifest);
  const SegmentMap target_segs = read_segments(config.paths.target_segments);
  const SymbolTable symbols = read_symbol_table(config.paths.symbols);
  const std::vector<RoomGroup> rirs =
      load_rir_database(config.paths.rir_dir, 16000);
  const NoisePool pool = load_noise_pool(config.paths.noise_dir, 16000);

  const int jobs = config.jobs;
  const bool sp = config.augmentation.speed_perturb;
  const FeatureConfig feature_config = config.features;

  // --- shared preparation: stage-1 corpora, features, source models
  const fs::path prep_marker = workdir / "prep.done";
  Manifest clean_tr, multi_tr, target_tr;
  if (fs::exists(prep_marker)) {
    clean_tr = read_manifest((workdir / "clean_tr.jsonl").string());
    multi_tr = read_manifest((workdir / "multi_tr.jsonl").string());
    target_tr = read_manifest((workdir / "target_tr.jsonl").string());
  } else {
    MulticonditionResult multi = build_multicondition(
        clean, rirs, pool, config.seed, spec_from_config(config),
        (workdir / "aug" / "audio").string(), jobs);
    write_manifest(multi.manifest, (workdir / "aug" / "manifest.jsonl").string());
    write_provenance(multi.provenance,
                     (workdir / "aug" / "provenance.jsonl").string());

    clean_tr = maybe_speed_perturb(clean, sp, (workdir / "sp" / "clean").string(),
                                   jobs);
    multi_tr = maybe_speed_perturb(multi.manifest, sp,
                                   (workdir / "sp" / "multi").string(), jobs);
    target_tr = maybe_speed_perturb(target, sp,
                                    (workdir / "sp" / "target").string(), jobs);
    write_manifest(clean_tr, (workdir / "clean_tr.jsonl").string());
    write_manifest(multi_tr, (workdir / "multi_tr.jsonl").string());
    write_manifest(target_tr, (workdir / "target_tr.jsonl").string());

    prepare_features(clean_tr, (workdir / "features" / "clean").string(),
                     feature_config, jobs);
    prepare_features(multi_tr, (workdir / "features" / "multi").string(),
                     feature_config, jobs);
    prepare_features(target_tr, (workdir / "features" / "target_tr").string(),
                     feature_config, jobs);
    prepare_features(target, (workdir / "features" / "target_eval").string(),
                     feature_config, jobs);
    write_json_file({{"config_hash", hash}}, prep_marker.string());
  }
  const std::string clean_index =
      (workdir / "features" / "clean" / "index.jsonl").string();
  const std::string multi_index =
      (workdir / "features" / "multi" / "index.jsonl").string();
  const std::string target_tr_index =
      (workdir / "features" / "target_tr" / "index.jsonl").string();
  const std::string target_eval_index =
      (workdir / "features" / "target_eval" / "index.jsonl").string();

  const ModelConfig model_config =
      make_model_config(config.model.scale_factor, config.model.num_outputs);
  StageConfig s1 = config.stage1;
  s1.stage = Stage::kStage1;
  s1.seed = derive_seed(config.seed, "stage1", "batches");
  StageConfig s2 = config.stage2;
  s2.stage = Stage::kStage2;
  s2.seed = derive_seed(config.seed, "stage2", "batches");

  const fs::path ckpt_dir = workdir / "checkpoints";
  fs::create_directories(ckpt_dir);

  auto train_shared = [&](const char *tag, const Manifest &manifest,
                          const std::string &index) {
    const fs::path path = ckpt_dir / (std::string(tag) + ".ckpt");
    const fs::path marker = ckpt_dir / (std::string(tag) + ".done");
    if (fs::exists(marker)) return load_checkpoint(path.string());
    TrainingSet set = load_training_set(manifest, index, clean_segs);
    TrainResult result = train_stage(
        build_model(model_config, derive_seed(config.seed, "model", "init")),
        set, s1, "", jobs);
    result.model.meta.stage = tag;
    save_checkpoint(result.model, path.string());
    write_metrics_csv(result.metrics, hash,
                      (ckpt_dir / (std::string(tag) + "_metrics.csv")).string());
    write_json_file({{"config_hash", hash}}, marker.string());
    return result.model;
  };
  const Checkpoint baseline = train_shared("baseline", clean_tr, clean_index);
  const Checkpoint stage1_only =
      train_shared("stage1_only", multi_tr, multi_index);

  // --- per-fold stage 2 + evaluation
  const FoldPlan plan = loso_folds(target);
  const fs::path folds_dir = workdir / "folds";
  fs::create_directories(folds_dir);

  TrainingSet target_pool =
      load_training_set(target_tr, target_tr_index, target_segs);
  std::map<std::string, std::string> tr_utt2spk;
  for (const auto &u : target_tr.utterances)
    tr_utt2spk[u.utt_id] = u.speaker_id;

  parallel_for(plan.folds.size(), jobs, [&](size_t f) {
    const Fold &fold = plan.folds[f];
    const fs::path fold_dir = folds_dir / fold.held_out_speaker;
    const fs::path marker = fold_dir / ".done";
    if (fs::exists(marker)) {
      if (read_json_file(marker.string()).value("config_hash", "") != hash)
        throw ConfigError("fold " + fold.held_out_speaker +
                          " was produced with a different config");
      return;  // fold untouched on resume
    }
    fs::create_directories(fold_dir);

    TrainingSet fold_set;
    for (const auto &u : target_pool.utts)
      if (tr_utt2spk.at(u.utt_id) != fold.held_out_speaker)
        fold_set.utts.push_back(u);

    StageConfig fold_s2 = s2;
    fold_s2.seed = derive_seed(s2.seed, fold.held_out_speaker, "fold");

    TrainResult stage2_only = train_stage(
        transfer_init(baseline, model_config), fold_set, fold_s2, "", 1);
    stage2_only.model.meta.stage = "stage2_only";
    TrainResult two_staged = train_stage(
        transfer_init(stage1_only, model_config), fold_set, fold_s2, "", 1);
    two_staged.model.meta.stage = "two_staged";
    save_checkpoint(stage2_only.model,
                    (fold_dir / "stage2_only.ckpt").string());
    save_checkpoint(two_staged.model, (fold_dir / "two_staged.ckpt").string());

    Manifest eval_manifest;
    for (const auto &u : target.utterances)
      if (u.speaker_id == fold.held_out_speaker)
        eval_manifest.utterances.push_back(u);

    const Checkpoint *models[4] = {&baseline, &stage1_only,
                                   &stage2_only.model, &two_staged.model};
    json setups_json;
    for (int s = 0; s < 4; s++) {
      EvalResult eval = evaluate_checkpoint(*models[s], eval_manifest,
                                            target_eval_index, target_segs,
                                            symbols, 1);
      write_words_file(eval.hyps,
                       (fold_dir / ("hyp_" + std::string(kSetupNames[s]) +
                                    ".jsonl"))
                           .string());
      json per_utt = json::array();
      for (size_t i = 0; i < eval_manifest.size(); i++) {
        // build_wer_report ordered per speaker; per-utt counts come from a
        // fresh alignment over the written hypotheses
        const Utterance &u = eval_manifest.utterances[i];
        const AlignmentResult a = align_words(u.transcript, eval.hyps[i].words);
        per_utt.push_back({{"utt_id", u.utt_id},
                           {"sub", a.substitutions},
                           {"del", a.deletions},
                           {"ins", a.insertions},
                           {"correct", a.correct},
                           {"ref_len", a.ref_len}});
      }
      setups_json[kSetupNames[s]] = {
          {"per_utt", per_utt}, {"frame_accuracy", eval.frame_accuracy}};
    }
    write_json_file({{"config_hash", hash},
                     {"speaker", fold.held_out_speaker},
                     {"setups", setups_json}},
                    (fold_dir / "scores.json").string());
    write_json_file({{"config_hash", hash}}, marker.string());
  });

  return aggregate_loso_reports(config);
}

LosoOutcome aggregate_loso_reports(const ExperimentConfig &config) {
  const std::string hash = experiment_config_hash(config);
  const fs::path workdir = config.paths.workdir;
  const Manifest target = read_manifest(config.paths.target_manifest);
  const FoldPlan plan = loso_folds(target);
  const fs::path folds_dir = workdir / "folds";

  // Fig. 2/3/4-style tables from the per-fold score files.
  std::map<std::string, std::string> utt2spk;
  for (const auto &u : target.utterances) utt2spk[u.utt_id] = u.speaker_id;

  std::map<std::string, std::vector<UttScore>> scores_by_setup;
  for (const auto &fold : plan.folds) {
    const fs::path scores_path =
        folds_dir / fold.held_out_speaker / "scores.json";
    if (!fs::exists(scores_path))
      throw DataError("no scores for fold " + fold.held_out_speaker +
                      "; run loso first");
    const json scores = read_json_file(scores_path.string());
    if (scores.value("config_hash", "") != hash)
      throw ConfigError("fold " + fold.held_out_speaker +
                        " was scored with a different config");
    for (const char *setup : kSetupNames) {
      for (const auto &row : scores.at("setups").at(setup).at("per_utt")) {
        UttScore s;
        s.utt_id = row.at("utt_id").get<std::string>();
        s.alignment.substitutions = row.at("sub").get<size_t>();
        s.alignment.deletions = row.at("del").get<size_t>();
        s.alignment.insertions = row.at("ins").get<size_t>();
        s.alignment.correct = row.at("correct").get<size_t>();
        s.alignment.ref_len = row.at("ref_len").get<size_t>();
        scores_by_setup[setup].push_back(std::move(s));
      }
    }
  }

  LosoOutcome outcome;
  const fs::path report_dir = workdir / "report";
  fs::create_directories(report_dir);
  outcome.report_dir = report_dir.string();

  std::map<std::string, BoxplotStats> box_by_setup;
  json aggregate;
  aggregate["config_hash"] = hash;
  for (const char *setup : kSetupNames) {
    WerReport report = build_wer_report(scores_by_setup[setup], utt2spk);
    write_report_csv(report,
                     (report_dir / ("wer_" + std::string(setup) + ".csv"))
                         .string());
    box_by_setup[setup] = report.boxplot;
    json spk = json::array();
    for (const auto &s : report.per_speaker)
      spk.push_back({{"speaker_id", s.speaker_id},
                     {"wer", s.wer},
                     {"word_count", s.word_count},
                     {"errors", s.errors}});
    aggregate["setups"][setup] = {
        {"weighted_wer", report.aggregate_wer},
        {"total_words", report.total_words},
        {"total_errors", report.total_errors},
        {"per_speaker", spk},
        {"boxplot",
         {{"min", report.boxplot.min},
          {"q1", report.boxplot.q1},
          {"median", report.boxplot.median},
          {"q3", report.boxplot.q3},
          {"max", report.boxplot.max},
          {"whisker_lo", report.boxplot.whisker_lo},
          {"whisker_hi", report.boxplot.whisker_hi},
          {"outliers", report.boxplot.outliers}}}};
    outcome.reports[setup] = std::move(report);
  }
  write_json_file(aggregate, (report_dir / "aggregate.json").string());
  write_boxplot_dat(box_by_setup, (report_dir / "boxplot.dat").string());

  // Per-speaker relative improvement of the two-staged system over the
  // baseline, ascending.
  auto wer_of = [&](const char *setup, const std::string &spk) {
    for (const auto &s : outcome.reports[setup].per_speaker)
      if (s.speaker_id == spk) return s.wer;
    throw DataError("missing speaker " + spk + " in report " + setup);
  };
  std::vector<std::pair<double, std::string>> improvements;
  for (const auto &s : outcome.reports["baseline"].per_speaker)
    improvements.emplace_back(
        relative_improvement(s.wer, wer_of("two_staged", s.speaker_id)),
        s.speaker_id);
  std::sort(improvements.begin(), improvements.end());
  {
    std::ofstream out(report_dir / "relative_improvement.csv");
    out << "rank,speaker_id,rel_improvement_pct\n";
    for (size_t i = 0; i < improvements.size(); i++)
      out << (i + 1) << ',' << improvements[i].second << ','
          << improvements[i].first << '\n';
  }

  // Ablation: relative WER change against the two-staged system when one
  // stage is removed (negative = removing the stage hurt).
  {
    std::ofstream out(report_dir / "ablation.csv");
    out << "speaker_id,removed_augmentation_pct,removed_transfer_pct\n";
    for (const auto &s : outcome.reports["two_staged"].per_speaker) {
      const double removed_aug =
          relative_improvement(s.wer, wer_of("stage2_only", s.speaker_id));
      const double removed_transfer =
          relative_improvement(s.wer, wer_of("stage1_only", s.speaker_id));
      out << s.speaker_id << ',' << removed_aug << ',' << removed_transfer
          << '\n';
    }
  }
  return outcome;
}

}  // namespace asrtk
