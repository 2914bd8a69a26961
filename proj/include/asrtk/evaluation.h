// include/asrtk/evaluation.h
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

#ifndef ASRTK_EVALUATION_H_
#define ASRTK_EVALUATION_H_

#include <map>
#include <string>
#include <vector>

#include "asrtk/manifest.h"
#include "asrtk/matrix.h"

namespace asrtk {

enum class AlignOp { kCorrect, kSubstitution, kDeletion, kInsertion };

struct AlignmentResult {
  size_t substitutions = 0;
  size_t deletions = 0;
  size_t insertions = 0;
  size_t correct = 0;
  size_t ref_len = 0;
  std::vector<AlignOp> ops;

  size_t errors() const { return substitutions + deletions + insertions; }
};

// Minimal edit alignment with unit costs. Backtrace ties resolve in the
// order correct > substitution > deletion > insertion.
AlignmentResult align_words(const std::vector<std::string> &ref,
                            const std::vector<std::string> &hyp);

// (S + D + I) / N. A zero-length reference has no defined WER.
double wer(const AlignmentResult &alignment);

// Word-count-weighted mean, identical to pooling all errors over all words.
double weighted_average_wer(
    const std::vector<std::pair<double, size_t>> &per_speaker);

// 100 * (baseline - system) / baseline, positive when the system improves.
double relative_improvement(double baseline_wer, double system_wer);

struct Fold {
  std::string held_out_speaker;
  std::vector<std::string> train_utt_ids;
  std::vector<std::string> eval_utt_ids;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

// One fold per speaker, ordered by speaker id; fold i trains on everyone
// else and evaluates on speaker i's utterances.
FoldPlan loso_folds(const Manifest &manifest);

struct BoxplotStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double whisker_lo = 0.0, whisker_hi = 0.0;  // most extreme inliers
  std::vector<double> outliers;               // beyond 1.5*IQR fences
};

// Quartiles by linear interpolation of order statistics at (n-1)*p.
BoxplotStats boxplot_stats(std::vector<double> values);

struct SymbolTable {
  std::vector<std::string> words;  // indexed by class id
  int silence_id = 0;
};

SymbolTable read_symbol_table(const std::string &path);
void write_symbol_table(const SymbolTable &symbols, const std::string &path);

// Frame argmax, collapse consecutive repeats, drop the silence symbol, map
// the remaining class ids to words.
std::vector<std::string> greedy_decode(const Matrix &log_posteriors,
                                       const SymbolTable &symbols);

// JSONL rows {"utt_id": ..., "words": "..."} for hypothesis/reference files.
struct WordsEntry {
  std::string utt_id;
  std::vector<std::string> words;
};

std::vector<WordsEntry> read_words_file(const std::string &path);
void write_words_file(const std::vector<WordsEntry> &entries,
                      const std::string &path);

struct UttScore {
  std::string utt_id;
  AlignmentResult alignment;
};

struct SpeakerWer {
  std::string speaker_id;
  double wer = 0.0;
  size_t word_count = 0;
  size_t errors = 0;
};

struct WerReport {
  std::vector<SpeakerWer> per_speaker;  // ordered by speaker id
  double aggregate_wer = 0.0;
  size_t total_words = 0;
  size_t total_errors = 0;
  BoxplotStats boxplot;  // over per-speaker WERs
};

// Aggregates per-utterance scores into the per-speaker table, the pooled
// weighted WER and the boxplot summary.
WerReport build_wer_report(const std::vector<UttScore> &scores,
                           const std::map<std::string, std::string> &utt2spk);

void write_report_csv(const WerReport &report, const std::string &path);
void write_boxplot_dat(const std::map<std::string, BoxplotStats> &by_setup,
                       const std::string &path);

}  // namespace asrtk

#endif  // ASRTK_EVALUATION_H_
