// tools/asrtk_main.cc
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "asrtk/checkpoint.h"
#include "asrtk/error.h"
#include "asrtk/experiment.h"

namespace fs = std::filesystem;
using namespace asrtk;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
};

ExperimentConfig load_config(const GlobalFlags &flags, bool required) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) {
    config = parse_experiment_config(flags.config_path);
  } else if (required) {
    throw ConfigError("this subcommand needs --config <path>");
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.jobs) config.jobs = *flags.jobs;
  return config;
}

int run_synth_corpus(const GlobalFlags &flags, const std::string &out_dir,
                     int speakers, int utts, int phones, double shift_min,
                     double shift_max, const std::string &speaker_prefix,
                     int rir_rooms, int rir_positions, int noises,
                     const std::string &corrupt_rir_dir,
                     const std::string &corrupt_noise_dir, double snr_min,
                     double snr_max) {
  const uint64_t seed = flags.seed.value_or(0);
  SynthCorpusConfig config;
  config.num_speakers = speakers;
  config.utts_per_speaker = utts;
  config.phone_classes = phones;
  config.seed = seed;
  config.speaker_shift_min = shift_min;
  config.speaker_shift_max = shift_max;
  if (!speaker_prefix.empty()) config.speaker_prefix = speaker_prefix;
  SynthCorpus corpus = synth_corpus(config, out_dir);
  std::printf("wrote %zu utterances from %d speakers to %s\n",
              corpus.manifest.size(), speakers, out_dir.c_str());

  if (rir_rooms > 0) {
    synth_rir_database((fs::path(out_dir) / "rirs").string(), rir_rooms,
                       rir_positions, seed + 101);
    std::printf("wrote %d rooms x %d positions to %s/rirs\n", rir_rooms,
                rir_positions, out_dir.c_str());
  }
  if (noises > 0) {
    synth_noise_pool((fs::path(out_dir) / "noises").string(), noises,
                     seed + 202);
    std::printf("wrote %d noise recordings to %s/noises\n", noises,
                out_dir.c_str());
  }

  if (!corrupt_rir_dir.empty() || !corrupt_noise_dir.empty()) {
    if (corrupt_rir_dir.empty() || corrupt_noise_dir.empty())
      throw ConfigError(
          "--corrupt-with-rirs and --corrupt-with-noises go together");
    auto rooms = load_rir_database(corrupt_rir_dir, 16000);
    auto pool = load_noise_pool(corrupt_noise_dir, 16000);
    Manifest corrupted = corrupt_corpus(
        corpus.manifest, rooms, pool, snr_min, snr_max, seed + 303,
        (fs::path(out_dir) / "audio_corrupted").string(),
        flags.jobs.value_or(1));
    write_manifest(corpus.manifest,
                   (fs::path(out_dir) / "manifest_clean.jsonl").string());
    write_manifest(corrupted, (fs::path(out_dir) / "manifest.jsonl").string());
    std::printf("corrupted the corpus with held-out rirs/noises\n");
  }
  return 0;
}

int run_augment(const GlobalFlags &flags) {
  ExperimentConfig config = load_config(flags, true);
  if (config.paths.clean_manifest.empty() || config.paths.workdir.empty())
    throw ConfigError("augment needs paths.clean_manifest and paths.workdir");
  const Manifest clean = read_manifest(config.paths.clean_manifest);
  auto rooms = load_rir_database(config.paths.rir_dir, 16000);
  auto pool = load_noise_pool(config.paths.noise_dir, 16000);

  AugmentationSpec spec;
  spec.snr_db_min = config.augmentation.snr_db_min;
  spec.snr_db_max = config.augmentation.snr_db_max;
  spec.max_superposed_noises = config.augmentation.max_superposed_noises;

  const fs::path aug_dir = fs::path(config.paths.workdir) / "aug";
  MulticonditionResult multi =
      build_multicondition(clean, rooms, pool, config.seed, spec,
                           (aug_dir / "audio").string(), config.jobs);
  write_manifest(multi.manifest, (aug_dir / "manifest.jsonl").string());
  write_provenance(multi.provenance, (aug_dir / "provenance.jsonl").string());
  std::printf("multi-condition manifest: %zu utterances (%s)\n",
              multi.manifest.size(),
              (aug_dir / "manifest.jsonl").string().c_str());

  if (config.augmentation.speed_perturb) {
    Manifest tripled = expand_speed_perturb(
        multi.manifest, (aug_dir / "sp_audio").string(), {0.9, 1.0, 1.1},
        config.jobs);
    write_manifest(tripled, (aug_dir / "manifest_sp.jsonl").string());
    std::printf("speed-perturbed manifest: %zu utterances\n", tripled.size());
  }
  return 0;
}

int run_features(const GlobalFlags &flags, const std::string &manifest_path,
                 const std::string &out_dir) {
  ExperimentConfig config = load_config(flags, false);
  const Manifest manifest = read_manifest(manifest_path);
  const std::string index = prepare_features(manifest, out_dir,
                                             config.features, config.jobs);
  std::printf("wrote %zu feature archives, index %s\n", manifest.size(),
              index.c_str());
  return 0;
}

int run_train(const GlobalFlags &flags, int stage_num,
              const std::string &manifest_path, const std::string &index_path,
              const std::string &segments_path, const std::string &init_path,
              const std::string &out_path, const std::string &metrics_path) {
  ExperimentConfig config = load_config(flags, true);
  const Manifest manifest = read_manifest(manifest_path);
  const SegmentMap segments = read_segments(segments_path);
  TrainingSet set = load_training_set(manifest, index_path, segments);

  Checkpoint init;
  if (!init_path.empty()) {
    init = load_checkpoint(init_path);
  } else {
    init = build_model(
        make_model_config(config.model.scale_factor, config.model.num_outputs),
        derive_seed(config.seed, "model", "init"));
  }

  StageConfig stage = (stage_num == 1) ? config.stage1 : config.stage2;
  stage.stage = (stage_num == 1) ? Stage::kStage1 : Stage::kStage2;
  stage.seed = derive_seed(config.seed,
                           stage_num == 1 ? "stage1" : "stage2", "batches");
  TrainResult result =
      train_stage(init, set, stage, fs::path(out_path).parent_path().string(),
                  config.jobs);
  save_checkpoint(result.model, out_path);
  if (!metrics_path.empty())
    write_metrics_csv(result.metrics, experiment_config_hash(config),
                      metrics_path);
  if (!result.metrics.empty())
    std::printf("final loss %.4f, frame accuracy %.3f\n",
                result.metrics.back().loss, result.metrics.back().frame_acc);
  std::printf("checkpoint written to %s\n", out_path.c_str());
  return 0;
}

int run_transfer(const std::string &source_path, const std::string &out_path) {
  Checkpoint source = load_checkpoint(source_path);
  Checkpoint target = transfer_init(source, source.config);
  save_checkpoint(target, out_path);
  std::printf("transferred %s -> %s (stage2-init)\n", source_path.c_str(),
              out_path.c_str());
  return 0;
}

int run_loso_cmd(const GlobalFlags &flags) {
  ExperimentConfig config = load_config(flags, true);
  LosoOutcome outcome = run_loso(config);
  std::printf("%-12s %10s\n", "setup", "wer");
  for (const auto &[setup, report] : outcome.reports)
    std::printf("%-12s %9.2f%%\n", setup.c_str(),
                100.0 * report.aggregate_wer);
  std::printf("reports in %s\n", outcome.report_dir.c_str());
  return 0;
}

int run_score(const GlobalFlags &flags, const std::string &ref_path,
              std::string hyp_path, const std::string &manifest_path,
              const std::string &checkpoint_path,
              const std::string &index_path, const std::string &symbols_path,
              const std::string &out_csv, const std::string &out_json) {
  (void)flags;
  // Reference words: either a words file or manifest transcripts.
  std::vector<WordsEntry> refs;
  std::map<std::string, std::string> utt2spk;
  if (!manifest_path.empty()) {
    const Manifest manifest = read_manifest(manifest_path);
    for (const auto &u : manifest.utterances) {
      refs.push_back({u.utt_id, u.transcript});
      utt2spk[u.utt_id] = u.speaker_id;
    }
  } else if (!ref_path.empty()) {
    refs = read_words_file(ref_path);
    for (const auto &r : refs) utt2spk[r.utt_id] = r.utt_id;
  } else {
    throw ConfigError("score needs --ref or --manifest");
  }

  // Hypotheses: a words file, or greedy-decode a checkpoint.
  std::vector<WordsEntry> hyps;
  if (!checkpoint_path.empty()) {
    if (index_path.empty() || symbols_path.empty())
      throw ConfigError("decoding needs --features and --symbols");
    Checkpoint model = load_checkpoint(checkpoint_path);
    const SymbolTable symbols = read_symbol_table(symbols_path);
    std::map<std::string, FeatureIndexEntry> index;
    for (auto &e : read_feature_index(index_path)) index[e.utt_id] = e;
    for (const auto &r : refs) {
      auto it = index.find(r.utt_id);
      if (it == index.end()) throw DataError("no features for " + r.utt_id);
      const Matrix feats = read_feature_archive(it->second.path);
      const Matrix log_probs = forward(model, feats, RunMode::kEval);
      hyps.push_back({r.utt_id, greedy_decode(log_probs, symbols)});
    }
    if (!hyp_path.empty()) write_words_file(hyps, hyp_path);
  } else if (!hyp_path.empty()) {
    hyps = read_words_file(hyp_path);
  } else {
    throw ConfigError("score needs --hyp or --checkpoint");
  }

  std::map<std::string, std::vector<std::string>> hyp_by_id;
  for (const auto &h : hyps) hyp_by_id[h.utt_id] = h.words;

  std::vector<UttScore> scores;
  for (const auto &r : refs) {
    auto it = hyp_by_id.find(r.utt_id);
    if (it == hyp_by_id.end()) throw DataError("no hypothesis for " + r.utt_id);
    scores.push_back({r.utt_id, align_words(r.words, it->second)});
  }
  WerReport report = build_wer_report(scores, utt2spk);
  if (!out_csv.empty()) write_report_csv(report, out_csv);
  if (!out_json.empty()) {
    std::ofstream out(out_json);
    out << "{\"wer\": " << report.aggregate_wer
        << ", \"total_words\": " << report.total_words
        << ", \"total_errors\": " << report.total_errors << "}\n";
  }
  std::printf("wer %.2f%% (%zu errors / %zu words)\n",
              100.0 * report.aggregate_wer, report.total_errors,
              report.total_words);
  return 0;
}

int run_report(const GlobalFlags &flags) {
  ExperimentConfig config = load_config(flags, true);
  LosoOutcome outcome = aggregate_loso_reports(config);
  std::printf("%-12s %10s %10s %10s\n", "setup", "wer", "median", "q3");
  for (const auto &[setup, report] : outcome.reports)
    std::printf("%-12s %9.2f%% %9.2f%% %9.2f%%\n", setup.c_str(),
                100.0 * report.aggregate_wer, 100.0 * report.boxplot.median,
                100.0 * report.boxplot.q3);
  std::printf("reports in %s\n", outcome.report_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"two-staged acoustic model adaptation toolkit"};
  app.require_subcommand(1);

  GlobalFlags flags;
  uint64_t seed_flag = 0;
  int jobs_flag = 1;
  app.add_option("--config", flags.config_path, "experiment config JSON");
  auto *seed_opt = app.add_option("--seed", seed_flag, "global random seed");
  auto *jobs_opt = app.add_option("--jobs", jobs_flag, "worker threads");

  auto *synth = app.add_subcommand(
      "synth-corpus",
      "generate a synthetic corpus (and optionally RIRs/noises)");
  std::string synth_out, speaker_prefix, corrupt_rirs, corrupt_noises;
  int speakers = 4, utts = 8, phones = 40, rir_rooms = 0, rir_positions = 3,
      noises = 0;
  double shift_min = 0.92, shift_max = 1.08, snr_min = 10.0, snr_max = 20.0;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--speakers", speakers, "number of speakers");
  synth->add_option("--utts", utts, "utterances per speaker");
  synth->add_option("--phones", phones, "phone classes incl. silence");
  synth->add_option("--speaker-prefix", speaker_prefix, "speaker id prefix");
  synth->add_option("--shift-min", shift_min, "speaker spectral shift lower");
  synth->add_option("--shift-max", shift_max, "speaker spectral shift upper");
  synth->add_option("--rirs", rir_rooms, "also write this many RIR rooms");
  synth->add_option("--rir-positions", rir_positions, "positions per room");
  synth->add_option("--noises", noises, "also write this many noise files");
  synth->add_option("--corrupt-with-rirs", corrupt_rirs,
                    "corrupt the corpus using this RIR database");
  synth->add_option("--corrupt-with-noises", corrupt_noises,
                    "corrupt the corpus using this noise pool");
  synth->add_option("--snr-min", snr_min, "corruption SNR lower bound (dB)");
  synth->add_option("--snr-max", snr_max, "corruption SNR upper bound (dB)");

  auto *augment = app.add_subcommand(
      "augment", "build the 3-fold multi-condition training corpus");

  auto *features = app.add_subcommand(
      "features", "compute model-input feature archives for a manifest");
  std::string feat_manifest, feat_out;
  features->add_option("--manifest", feat_manifest, "input manifest")
      ->required();
  features->add_option("--out", feat_out, "output directory")->required();

  auto *train = app.add_subcommand("train", "run one training stage");
  int stage_num = 1;
  std::string train_manifest, train_index, train_segments, train_init,
      train_out, train_metrics;
  train->add_option("--stage", stage_num, "1 or 2")
      ->check(CLI::IsMember({1, 2}));
  train->add_option("--manifest", train_manifest, "training manifest")
      ->required();
  train->add_option("--features", train_index, "feature index jsonl")
      ->required();
  train->add_option("--segments", train_segments, "segments jsonl")
      ->required();
  train->add_option("--init", train_init,
                    "initial checkpoint (default: fresh seeded model)");
  train->add_option("--out", train_out, "output checkpoint")->required();
  train->add_option("--metrics", train_metrics, "metrics csv path");

  auto *transfer = app.add_subcommand(
      "transfer", "full-weight transfer of a source checkpoint");
  std::string transfer_source, transfer_out;
  transfer->add_option("--source", transfer_source, "source checkpoint")
      ->required();
  transfer->add_option("--out", transfer_out, "output checkpoint")->required();

  auto *loso = app.add_subcommand(
      "loso", "leave-one-speaker-out experiment over all four setups");

  auto *score =
      app.add_subcommand("score", "align hypotheses and report WER");
  std::string score_ref, score_hyp, score_manifest, score_ckpt, score_index,
      score_symbols, score_csv, score_json;
  score->add_option("--ref", score_ref, "reference words jsonl");
  score->add_option("--hyp", score_hyp, "hypothesis words jsonl (input, or "
                    "output when decoding)");
  score->add_option("--manifest", score_manifest,
                    "manifest supplying references and speakers");
  score->add_option("--checkpoint", score_ckpt,
                    "decode this checkpoint instead of reading --hyp");
  score->add_option("--features", score_index, "feature index for decoding");
  score->add_option("--symbols", score_symbols, "symbol table for decoding");
  score->add_option("--out-csv", score_csv, "per-speaker csv");
  score->add_option("--out-json", score_json, "aggregate json");

  auto *report = app.add_subcommand(
      "report", "rebuild aggregate tables from fold scores");

  try {
    app.parse(argc, argv);
    if (*seed_opt) flags.seed = seed_flag;
    if (*jobs_opt) flags.jobs = jobs_flag;

    if (*synth)
      return run_synth_corpus(flags, synth_out, speakers, utts, phones,
                              shift_min, shift_max, speaker_prefix, rir_rooms,
                              rir_positions, noises, corrupt_rirs,
                              corrupt_noises, snr_min, snr_max);
    if (*augment) return run_augment(flags);
    if (*features) return run_features(flags, feat_manifest, feat_out);
    if (*train)
      return run_train(flags, stage_num, train_manifest, train_index,
                       train_segments, train_init, train_out, train_metrics);
    if (*transfer) return run_transfer(transfer_source, transfer_out);
    if (*loso) return run_loso_cmd(flags);
    if (*score)
      return run_score(flags, score_ref, score_hyp, score_manifest, score_ckpt,
                       score_index, score_symbols, score_csv, score_json);
    if (*report) return run_report(flags);
    return 1;
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError &e) {
    std::cerr << "asrtk: config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError &e) {
    std::cerr << "asrtk: data error: " << e.what() << '\n';
    return 3;
  } catch (const FormatError &e) {
    std::cerr << "asrtk: data error: " << e.what() << '\n';
    return 3;
  } catch (const CodecError &e) {
    std::cerr << "asrtk: data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "asrtk: error: " << e.what() << '\n';
    return 1;
  }
}
