// tests/test_evaluation.cc
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asrtk/error.h"
#include "asrtk/evaluation.h"
#include "asrtk/rng.h"
#include "test_util.h"

using namespace asrtk;
using asrtk_test::TempDir;

namespace {

struct OracleAlignment {
  int cost = 0;
  std::vector<AlignOp> ops;
};

// Exhaustive alignment enumeration. Among minimal-cost alignments it picks
// the one that is lexicographically best read from the END, under the order
// correct < substitution < deletion < insertion; that is the global
// statement of the backtrace preference.
int op_rank(AlignOp op) {
  switch (op) {
    case AlignOp::kCorrect:
      return 0;
    case AlignOp::kSubstitution:
      return 1;
    case AlignOp::kDeletion:
      return 2;
    case AlignOp::kInsertion:
      return 3;
  }
  return 4;
}

bool better(const OracleAlignment &a, const OracleAlignment &b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  // Compare from the end.
  size_t ia = a.ops.size(), ib = b.ops.size();
  while (ia > 0 && ib > 0) {
    const int ra = op_rank(a.ops[ia - 1]);
    const int rb = op_rank(b.ops[ib - 1]);
    if (ra != rb) return ra < rb;
    ia--, ib--;
  }
  return ia < ib;
}

void enumerate(const std::vector<std::string> &ref,
               const std::vector<std::string> &hyp, size_t i, size_t j,
               OracleAlignment cur, OracleAlignment *best) {
  if (i == ref.size() && j == hyp.size()) {
    if (best->cost < 0 || better(cur, *best)) *best = cur;
    return;
  }
  if (i < ref.size() && j < hyp.size()) {
    OracleAlignment next = cur;
    next.ops.push_back(ref[i] == hyp[j] ? AlignOp::kCorrect
                                        : AlignOp::kSubstitution);
    next.cost += ref[i] == hyp[j] ? 0 : 1;
    enumerate(ref, hyp, i + 1, j + 1, next, best);
  }
  if (i < ref.size()) {
    OracleAlignment next = cur;
    next.ops.push_back(AlignOp::kDeletion);
    next.cost += 1;
    enumerate(ref, hyp, i + 1, j, next, best);
  }
  if (j < hyp.size()) {
    OracleAlignment next = cur;
    next.ops.push_back(AlignOp::kInsertion);
    next.cost += 1;
    enumerate(ref, hyp, i, j + 1, next, best);
  }
}

AlignmentResult oracle_align(const std::vector<std::string> &ref,
                             const std::vector<std::string> &hyp) {
  OracleAlignment best;
  best.cost = -1;
  enumerate(ref, hyp, 0, 0, {}, &best);
  AlignmentResult res;
  res.ref_len = ref.size();
  res.ops = best.ops;
  for (AlignOp op : best.ops) {
    if (op == AlignOp::kCorrect) res.correct++;
    if (op == AlignOp::kSubstitution) res.substitutions++;
    if (op == AlignOp::kDeletion) res.deletions++;
    if (op == AlignOp::kInsertion) res.insertions++;
  }
  return res;
}

// All sequences over {a,b,c} of length 0..max_len.
std::vector<std::vector<std::string>> all_sequences(size_t max_len) {
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::string>> out = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (size_t l = 0; l < max_len; l++) {
    std::vector<std::vector<std::string>> next;
    for (const auto &seq : frontier) {
      for (const auto &s : alphabet) {
        auto grown = seq;
        grown.push_back(s);
        out.push_back(grown);
        next.push_back(std::move(grown));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("alignment basics") {
  AlignmentResult same = align_words({"x", "y", "z"}, {"x", "y", "z"});
  CHECK(same.correct == 3);
  CHECK(same.errors() == 0);
  CHECK(wer(same) == 0.0);

  AlignmentResult sub = align_words({"a", "b", "c"}, {"a", "x", "c"});
  CHECK(sub.substitutions == 1);
  CHECK(sub.deletions == 0);
  CHECK(sub.insertions == 0);
  CHECK(wer(sub) == doctest::Approx(1.0 / 3.0));

  AlignmentResult del = align_words({"a"}, {});
  CHECK(del.deletions == 1);
  CHECK(wer(del) == 1.0);

  AlignmentResult empty_ref = align_words({}, {"a"});
  CHECK(empty_ref.insertions == 1);
  CHECK_THROWS_AS(wer(empty_ref), DomainError);

  AlignmentResult four = align_words({"p", "q", "r", "s"}, {});
  CHECK(wer(four) == 1.0);
}

TEST_CASE("alignment counts satisfy the ref-length identity") {
  Rng rng(1);
  const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 200; trial++) {
    std::vector<std::string> ref(rng.index(10)), hyp(rng.index(10));
    for (auto &w : ref) w = alphabet[rng.index(4)];
    for (auto &w : hyp) w = alphabet[rng.index(4)];
    AlignmentResult a = align_words(ref, hyp);
    CHECK(a.correct + a.substitutions + a.deletions == ref.size());
    CHECK(a.correct + a.substitutions + a.insertions == hyp.size());
  }
}

TEST_CASE("alignment agrees with the exhaustive oracle up to length 5") {
  auto sequences = all_sequences(5);
  REQUIRE(sequences.size() == 364);
  size_t checked = 0;
  for (const auto &ref : sequences) {
    for (const auto &hyp : sequences) {
      AlignmentResult got = align_words(ref, hyp);
      AlignmentResult want = oracle_align(ref, hyp);
      REQUIRE(got.errors() == want.errors());
      REQUIRE(got.substitutions == want.substitutions);
      REQUIRE(got.deletions == want.deletions);
      REQUIRE(got.insertions == want.insertions);
      REQUIRE(got.correct == want.correct);
      checked++;
    }
  }
  CHECK(checked == 364 * 364);
}

TEST_CASE("swapping ref and hyp swaps deletions and insertions") {
  Rng rng(2);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  for (int trial = 0; trial < 100; trial++) {
    std::vector<std::string> ref(rng.index(8)), hyp(rng.index(8));
    for (auto &w : ref) w = alphabet[rng.index(3)];
    for (auto &w : hyp) w = alphabet[rng.index(3)];
    AlignmentResult fwd = align_words(ref, hyp);
    AlignmentResult rev = align_words(hyp, ref);
    CHECK(fwd.substitutions == rev.substitutions);
    CHECK(fwd.deletions == rev.insertions);
    CHECK(fwd.insertions == rev.deletions);
  }
}

TEST_CASE("weighted average wer") {
  CHECK(weighted_average_wer({{0.2, 100}, {0.4, 100}}) == doctest::Approx(0.3));
  // (10 + 150) / 400
  CHECK(weighted_average_wer({{0.10, 100}, {0.50, 300}}) ==
        doctest::Approx(0.40));
  CHECK(weighted_average_wer({{0.37, 123}}) == doctest::Approx(0.37));
}

TEST_CASE("relative improvement sign conventions") {
  CHECK(relative_improvement(31.6, 25.5) == doctest::Approx(19.3).epsilon(1e-3));
  const double one_decimal =
      std::round(relative_improvement(31.6, 25.5) * 10.0) / 10.0;
  CHECK(one_decimal == 19.3);
  CHECK(relative_improvement(0.25, 0.25) == 0.0);
  CHECK(relative_improvement(20.0, 22.0) == doctest::Approx(-10.0));
  CHECK_THROWS_AS(relative_improvement(0.0, 1.0), DomainError);
}

TEST_CASE("loso folds partition the manifest by speaker") {
  Manifest two;
  for (const char *spk : {"A", "B"}) {
    for (int i = 0; i < 3; i++) {
      Utterance u;
      u.utt_id = std::string(spk) + std::to_string(i);
      u.speaker_id = spk;
      two.utterances.push_back(u);
    }
  }
  FoldPlan plan = loso_folds(two);
  REQUIRE(plan.folds.size() == 2);
  CHECK(plan.folds[0].held_out_speaker == "A");
  CHECK(plan.folds[0].eval_utt_ids == std::vector<std::string>{"A0", "A1", "A2"});
  CHECK(plan.folds[0].train_utt_ids == std::vector<std::string>{"B0", "B1", "B2"});
  CHECK(plan.folds[1].held_out_speaker == "B");

  Manifest solo;
  Utterance u;
  u.utt_id = "x";
  u.speaker_id = "only";
  solo.utterances.push_back(u);
  CHECK_THROWS_AS(loso_folds(solo), ConfigError);
}

TEST_CASE("fold plans satisfy the partition invariants on random manifests") {
  Rng rng(3);
  for (int trial = 0; trial < 25; trial++) {
    const size_t num_speakers = 2 + rng.index(34);  // 2..35
    Manifest manifest;
    for (size_t s = 0; s < num_speakers; s++) {
      const size_t utts = 1 + rng.index(5);
      for (size_t i = 0; i < utts; i++) {
        Utterance u;
        u.utt_id = "s" + std::to_string(s) + "_u" + std::to_string(i);
        u.speaker_id = "s" + std::to_string(s);
        manifest.utterances.push_back(u);
      }
    }
    FoldPlan plan = loso_folds(manifest);
    CHECK(plan.folds.size() == num_speakers);

    std::set<std::string> eval_union;
    for (const auto &fold : plan.folds) {
      std::set<std::string> train(fold.train_utt_ids.begin(),
                                  fold.train_utt_ids.end());
      for (const auto &id : fold.eval_utt_ids) {
        CHECK(train.count(id) == 0);
        CHECK(eval_union.insert(id).second);  // disjoint across folds
      }
      CHECK(fold.train_utt_ids.size() + fold.eval_utt_ids.size() ==
            manifest.size());
    }
    CHECK(eval_union.size() == manifest.size());
  }
}

TEST_CASE("paper-shaped manifest yields 35 folds") {
  Manifest manifest;
  for (int s = 0; s < 35; s++) {
    for (int i = 0; i < 4; i++) {
      Utterance u;
      u.utt_id = "spk" + std::to_string(s) + "_" + std::to_string(i);
      u.speaker_id = "spk" + std::to_string(s);
      manifest.utterances.push_back(u);
    }
  }
  CHECK(loso_folds(manifest).folds.size() == 35);
}

TEST_CASE("boxplot statistics") {
  BoxplotStats s = boxplot_stats({5, 1, 4, 2, 3});
  CHECK(s.q1 == doctest::Approx(2.0));
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.q3 == doctest::Approx(4.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 5.0);
  CHECK(s.outliers.empty());
  CHECK(s.whisker_lo == 1.0);
  CHECK(s.whisker_hi == 5.0);

  BoxplotStats flat = boxplot_stats(std::vector<double>(7, 2.5));
  CHECK(flat.q1 == 2.5);
  CHECK(flat.median == 2.5);
  CHECK(flat.q3 == 2.5);
  CHECK(flat.outliers.empty());

  BoxplotStats out = boxplot_stats({1, 2, 3, 4, 100});
  // IQR fence: q3 + 1.5*(q3-q1) = 4 + 3 = 7, so 100 is flagged.
  REQUIRE(out.outliers.size() == 1);
  CHECK(out.outliers[0] == 100.0);
  CHECK(out.whisker_hi == 4.0);

  CHECK_THROWS_AS(boxplot_stats({}), DomainError);
}

TEST_CASE("greedy decode three-step rule") {
  SymbolTable symbols;
  symbols.words = {"<sil>", "wa", "wb", "wc"};
  symbols.silence_id = 0;

  auto peaked = [&](const std::vector<int> &ids) {
    Matrix m(ids.size(), 4, -10.0);
    for (size_t t = 0; t < ids.size(); t++) m.at(t, size_t(ids[t])) = -0.01;
    return m;
  };

  CHECK(greedy_decode(peaked({0, 0, 0, 0}), symbols).empty());
  CHECK(greedy_decode(peaked({1, 1, 2, 2, 0, 3, 3}), symbols) ==
        std::vector<std::string>{"wa", "wb", "wc"});
  // Silence between repeats keeps both occurrences.
  CHECK(greedy_decode(peaked({1, 1, 0, 1, 1}), symbols) ==
        std::vector<std::string>{"wa", "wa"});
}

TEST_CASE("greedy decode agrees with a direct reimplementation") {
  SymbolTable symbols;
  symbols.words = {"<sil>", "w1", "w2", "w3", "w4"};
  symbols.silence_id = 0;
  Rng rng(4);
  for (int trial = 0; trial < 50; trial++) {
    Matrix m(30, 5);
    for (auto &v : m.data) v = rng.uniform(-5, 0);

    // Independent restatement of argmax -> collapse -> drop silence -> map.
    std::vector<int> argmax(30);
    for (size_t t = 0; t < 30; t++) {
      int best = 0;
      for (int k = 1; k < 5; k++)
        if (m.at(t, size_t(k)) > m.at(t, size_t(best))) best = k;
      argmax[t] = best;
    }
    std::vector<int> collapsed;
    for (int id : argmax)
      if (collapsed.empty() || collapsed.back() != id) collapsed.push_back(id);
    std::vector<std::string> want;
    for (int id : collapsed)
      if (id != 0) want.push_back(symbols.words[size_t(id)]);

    CHECK(greedy_decode(m, symbols) == want);
  }
}

TEST_CASE("wer report pools errors over words") {
  std::vector<UttScore> scores;
  std::map<std::string, std::string> utt2spk;
  Rng rng(5);
  size_t total_err = 0, total_words = 0;
  for (int u = 0; u < 40; u++) {
    UttScore s;
    s.utt_id = "u" + std::to_string(u);
    s.alignment.ref_len = 5 + rng.index(20);
    s.alignment.substitutions = rng.index(4);
    s.alignment.deletions = rng.index(3);
    s.alignment.insertions = rng.index(3);
    s.alignment.correct =
        s.alignment.ref_len - s.alignment.substitutions - s.alignment.deletions;
    utt2spk[s.utt_id] = "spk" + std::to_string(u % 7);
    total_err += s.alignment.errors();
    total_words += s.alignment.ref_len;
    scores.push_back(s);
  }
  WerReport report = build_wer_report(scores, utt2spk);
  CHECK(report.per_speaker.size() == 7);
  CHECK(report.aggregate_wer ==
        doctest::Approx(double(total_err) / double(total_words)).epsilon(1e-12));

  // The weighted mean over speakers equals the pooled ratio.
  std::vector<std::pair<double, size_t>> pairs;
  for (const auto &s : report.per_speaker) pairs.emplace_back(s.wer, s.word_count);
  CHECK(std::fabs(weighted_average_wer(pairs) - report.aggregate_wer) < 1e-12);
}

TEST_CASE("words files round trip") {
  TempDir dir("words");
  std::vector<WordsEntry> entries = {{"u1", {"hello", "world"}},
                                     {"u2", {}},
                                     {"u3", {"one"}}};
  write_words_file(entries, dir.file("h.jsonl"));
  auto back = read_words_file(dir.file("h.jsonl"));
  REQUIRE(back.size() == 3);
  CHECK(back[0].words == std::vector<std::string>{"hello", "world"});
  CHECK(back[1].words.empty());
  CHECK(back[2].utt_id == "u3");
}
