// src/evaluation.cc
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

#include "asrtk/evaluation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "asrtk/error.h"

namespace asrtk {

using nlohmann::json;

AlignmentResult align_words(const std::vector<std::string> &ref,
                            const std::vector<std::string> &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  // cost[i][j]: minimal edit cost aligning ref[0..i) with hyp[0..j).
  std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = 1; i <= n; i++) cost[i][0] = int(i);
  for (size_t j = 1; j <= m; j++) cost[0][j] = int(j);
  for (size_t i = 1; i <= n; i++) {
    for (size_t j = 1; j <= m; j++) {
      const int match = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cost[i][j] = std::min({match, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
    }
  }

  AlignmentResult res;
  res.ref_len = n;
  std::vector<AlignOp> rev;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        cost[i][j] == cost[i - 1][j - 1]) {
      rev.push_back(AlignOp::kCorrect);
      i--, j--;
    } else if (i > 0 && j > 0 && cost[i][j] == cost[i - 1][j - 1] + 1) {
      rev.push_back(AlignOp::kSubstitution);
      i--, j--;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      rev.push_back(AlignOp::kDeletion);
      i--;
    } else {
      rev.push_back(AlignOp::kInsertion);
      j--;
    }
  }
  res.ops.assign(rev.rbegin(), rev.rend());
  for (AlignOp op : res.ops) {
    switch (op) {
      case AlignOp::kCorrect:
        res.correct++;
        break;
      case AlignOp::kSubstitution:
        res.substitutions++;
        break;
      case AlignOp::kDeletion:
        res.deletions++;
        break;
      case AlignOp::kInsertion:
        res.insertions++;
        break;
    }
  }
  return res;
}

double wer(const AlignmentResult &alignment) {
  if (alignment.ref_len == 0)
    throw DomainError("wer: empty reference has no defined error rate");
  return double(alignment.errors()) / double(alignment.ref_len);
}

double weighted_average_wer(
    const std::vector<std::pair<double, size_t>> &per_speaker) {
  double weighted = 0.0;
  double words = 0.0;
  for (const auto &[w, n] : per_speaker) {
    weighted += w * double(n);
    words += double(n);
  }
  if (words == 0.0)
    throw DomainError("weighted_average_wer: zero total word count");
  return weighted / words;
}

double relative_improvement(double baseline_wer, double system_wer) {
  if (baseline_wer == 0.0)
    throw DomainError("relative_improvement: zero baseline");
  return 100.0 * (baseline_wer - system_wer) / baseline_wer;
}

FoldPlan loso_folds(const Manifest &manifest) {
  const std::vector<std::string> speakers = manifest.speaker_ids();
  if (speakers.size() < 2)
    throw ConfigError("loso_folds: need at least 2 speakers, got " +
                      std::to_string(speakers.size()));
  FoldPlan plan;
  for (const auto &spk : speakers) {
    Fold fold;
    fold.held_out_speaker = spk;
    for (const auto &u : manifest.utterances) {
      if (u.speaker_id == spk)
        fold.eval_utt_ids.push_back(u.utt_id);
      else
        fold.train_utt_ids.push_back(u.utt_id);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

namespace {

double quantile_linear(const std::vector<double> &sorted, double p) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * double(n - 1);
  const size_t lo = size_t(std::floor(pos));
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BoxplotStats boxplot_stats(std::vector<double> values) {
  if (values.empty()) throw DomainError("boxplot_stats: empty input");
  std::sort(values.begin(), values.end());

  BoxplotStats s;
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_linear(values, 0.25);
  s.median = quantile_linear(values, 0.5);
  s.q3 = quantile_linear(values, 0.75);

  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_lo = s.q3;  // replaced below by first inlier
  s.whisker_hi = s.q1;
  bool any_inlier = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      s.outliers.push_back(v);
    } else {
      if (!any_inlier) {
        s.whisker_lo = v;
        any_inlier = true;
      }
      s.whisker_hi = v;
    }
  }
  if (!any_inlier) {
    // Degenerate: everything flagged; treat the quartiles as whiskers.
    s.whisker_lo = s.q1;
    s.whisker_hi = s.q3;
  }
  return s;
}

SymbolTable read_symbol_table(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open symbol table: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw FormatError("bad symbol table " + path + ": " + e.what());
  }
  SymbolTable t;
  t.words = j.at("words").get<std::vector<std::string>>();
  t.silence_id = j.at("silence_id").get<int>();
  return t;
}

void write_symbol_table(const SymbolTable &symbols, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open symbol table for writing: " + path);
  json j;
  j["words"] = symbols.words;
  j["silence_id"] = symbols.silence_id;
  out << j.dump(2) << '\n';
}

std::vector<std::string> greedy_decode(const Matrix &log_posteriors,
                                       const SymbolTable &symbols) {
  if (log_posteriors.cols != symbols.words.size())
    throw DomainError("greedy_decode: posterior dim " +
                      std::to_string(log_posteriors.cols) +
                      " != symbol table size " +
                      std::to_string(symbols.words.size()));
  std::vector<std::string> out;
  int prev = -1;
  for (size_t t = 0; t < log_posteriors.rows; t++) {
    const double *row = log_posteriors.row(t);
    size_t best = 0;
    for (size_t k = 1; k < log_posteriors.cols; k++)
      if (row[k] > row[best]) best = k;
    const int id = int(best);
    if (id != prev) {
      if (id != symbols.silence_id) out.push_back(symbols.words[size_t(id)]);
      prev = id;
    }
  }
  return out;
}

std::vector<WordsEntry> read_words_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open words file: " + path);
  std::vector<WordsEntry> entries;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw FormatError("bad words file " + path + " line " +
                        std::to_string(lineno));
    WordsEntry e;
    e.utt_id = j.at("utt_id").get<std::string>();
    e.words = split_words(j.at("words").get<std::string>());
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_words_file(const std::vector<WordsEntry> &entries,
                      const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open words file for writing: " + path);
  for (const auto &e : entries) {
    json j;
    j["utt_id"] = e.utt_id;
    j["words"] = transcript_to_string(e.words);
    out << j.dump() << '\n';
  }
}

WerReport build_wer_report(const std::vector<UttScore> &scores,
                           const std::map<std::string, std::string> &utt2spk) {
  std::map<std::string, SpeakerWer> by_spk;
  size_t total_words = 0, total_errors = 0;
  for (const auto &s : scores) {
    auto it = utt2spk.find(s.utt_id);
    if (it == utt2spk.end())
      throw DataError("build_wer_report: unknown utt_id " + s.utt_id);
    SpeakerWer &spk = by_spk[it->second];
    spk.speaker_id = it->second;
    spk.word_count += s.alignment.ref_len;
    spk.errors += s.alignment.errors();
    total_words += s.alignment.ref_len;
    total_errors += s.alignment.errors();
  }

  WerReport report;
  std::vector<double> wers;
  for (auto &[spk_id, spk] : by_spk) {
    if (spk.word_count == 0)
      throw DomainError("build_wer_report: speaker " + spk_id +
                        " has zero reference words");
    spk.wer = double(spk.errors) / double(spk.word_count);
    wers.push_back(spk.wer);
    report.per_speaker.push_back(spk);
  }
  if (report.per_speaker.empty())
    throw DomainError("build_wer_report: no scores");
  report.total_words = total_words;
  report.total_errors = total_errors;
  report.aggregate_wer = double(total_errors) / double(total_words);
  report.boxplot = boxplot_stats(wers);
  return report;
}

void write_report_csv(const WerReport &report, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open report csv for writing: " + path);
  out << "speaker_id,wer,word_count,errors\n";
  for (const auto &s : report.per_speaker)
    out << s.speaker_id << ',' << s.wer << ',' << s.word_count << ','
        << s.errors << '\n';
  out << "aggregate," << report.aggregate_wer << ',' << report.total_words
      << ',' << report.total_errors << '\n';
}

void write_boxplot_dat(const std::map<std::string, BoxplotStats> &by_setup,
                       const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open boxplot file for writing: " + path);
  out << "# setup whisker_lo q1 median q3 whisker_hi outliers...\n";
  for (const auto &[name, s] : by_setup) {
    out << name << ' ' << s.whisker_lo << ' ' << s.q1 << ' ' << s.median
        << ' ' << s.q3 << ' ' << s.whisker_hi;
    for (double v : s.outliers) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace asrtk
