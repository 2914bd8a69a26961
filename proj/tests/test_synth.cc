// tests/test_synth.cc
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

#include "asrtk/features.h"
#include "asrtk/synth.h"
#include "test_util.h"

using namespace asrtk;
using asrtk_test::TempDir;

namespace {

SynthCorpusConfig tiny_corpus_config(uint64_t seed) {
  SynthCorpusConfig c;
  c.num_speakers = 3;
  c.utts_per_speaker = 2;
  c.phone_classes = 8;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("synth corpus cardinality and files") {
  TempDir dir("synth");
  SynthCorpus corpus = synth_corpus(tiny_corpus_config(1), dir.str());
  CHECK(corpus.manifest.size() == 6);
  CHECK(corpus.manifest.speaker_ids().size() == 3);
  CHECK(corpus.symbols.words.size() == 8);
  CHECK(corpus.symbols.silence_id == 0);

  // Files round trip through the readers.
  Manifest m = read_manifest(dir.file("manifest.jsonl"));
  CHECK(m.size() == 6);
  SegmentMap segs = read_segments(dir.file("segments.jsonl"));
  CHECK(segs.size() == 6);
  SymbolTable symbols = read_symbol_table(dir.file("symbols.json"));
  CHECK(symbols.words.size() == 8);

  for (const auto &u : m.utterances) {
    AudioSignal audio = read_wav(u.audio_path);
    CHECK(audio.duration_s() == doctest::Approx(u.duration_s).epsilon(1e-6));
    CHECK(segs.at(u.utt_id).back().end == int64_t(audio.size()));
    // One transcript word per non-silence segment.
    size_t voiced = 0;
    for (const auto &s : segs.at(u.utt_id))
      if (s.phone != 0) voiced++;
    CHECK(u.transcript.size() == voiced);
  }
}

TEST_CASE("paper-shaped generator parameters give 2380 utterances") {
  TempDir dir("synth_paper");
  SynthCorpusConfig c;
  c.num_speakers = 35;
  c.utts_per_speaker = 68;
  c.phone_classes = 40;
  c.seed = 9;
  // Keep the audio tiny; only the corpus shape matters here.
  c.min_words = 1;
  c.max_words = 1;
  c.phone_ms_min = 60.0;
  c.phone_ms_max = 80.0;
  c.silence_ms_min = 30.0;
  c.silence_ms_max = 40.0;
  SynthCorpus corpus = synth_corpus(c, dir.str());
  CHECK(corpus.manifest.size() == 2380);
  CHECK(corpus.manifest.speaker_ids().size() == 35);
}

TEST_CASE("synth corpus is deterministic per seed") {
  TempDir a("synth_a"), b("synth_b"), c("synth_c");
  synth_corpus(tiny_corpus_config(7), a.str());
  synth_corpus(tiny_corpus_config(7), b.str());
  synth_corpus(tiny_corpus_config(8), c.str());
  Manifest ma = read_manifest(a.file("manifest.jsonl"));
  Manifest mb = read_manifest(b.file("manifest.jsonl"));
  bool same = true, diff = false;
  for (size_t i = 0; i < ma.size(); i++) {
    const std::string fa = asrtk_test::read_file(ma.utterances[i].audio_path);
    const std::string fb = asrtk_test::read_file(mb.utterances[i].audio_path);
    if (fa != fb) same = false;
    Manifest mc = read_manifest(c.file("manifest.jsonl"));
    if (fa != asrtk_test::read_file(mc.utterances[i].audio_path)) diff = true;
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("per-frame targets match the feature frame count") {
  TempDir dir("synth");
  SynthCorpus corpus = synth_corpus(tiny_corpus_config(2), dir.str());
  for (const auto &u : corpus.manifest.utterances) {
    AudioSignal audio = read_wav(u.audio_path);
    FeatureMatrix mfcc = compute_mfcc(audio);
    auto targets = targets_from_segments(corpus.segments.at(u.utt_id),
                                         mfcc.num_frames(), 400, 160);
    CHECK(targets.size() == mfcc.num_frames());
    for (int t : targets) {
      CHECK(t >= 0);
      CHECK(t < 8);
    }
    // Both silence and voiced frames appear.
    bool has_sil = false, has_voice = false;
    for (int t : targets) (t == 0 ? has_sil : has_voice) = true;
    CHECK(has_sil);
    CHECK(has_voice);
  }
}

TEST_CASE("synthetic rir database loads with both size classes") {
  TempDir dir("rir");
  synth_rir_database(dir.file("rirs"), 4, 3, 11);
  auto rooms = load_rir_database(dir.file("rirs"), 16000);
  REQUIRE(rooms.size() == 4);
  int small = 0, medium = 0;
  for (const auto &r : rooms) {
    CHECK(r.rirs.size() == 3);
    CHECK(r.position_ids.size() == 3);
    (r.size_class == RoomSize::kSmall ? small : medium)++;
    for (const auto &rir : r.rirs) {
      CHECK_FALSE(rir.empty());
      CHECK(rir.sample_rate_hz == 16000);
    }
  }
  CHECK(small == 2);
  CHECK(medium == 2);
}

TEST_CASE("synthetic noise pool loads at the corpus rate") {
  TempDir dir("noise");
  synth_noise_pool(dir.file("noises"), 5, 12, 16000, 1.0);
  NoisePool pool = load_noise_pool(dir.file("noises"), 16000);
  REQUIRE(pool.size() == 5);
  for (const auto &rec : pool.recordings) {
    CHECK(rec.size() == 16000);
    CHECK(signal_power(rec) > 0.0);
  }
}

TEST_CASE("corrupt_corpus keeps ids, transcripts and durations") {
  TempDir dir("corrupt");
  SynthCorpus corpus = synth_corpus(tiny_corpus_config(3), dir.str());
  synth_rir_database(dir.file("rirs"), 2, 2, 13);
  synth_noise_pool(dir.file("noises"), 3, 14, 16000, 1.5);
  auto rooms = load_rir_database(dir.file("rirs"), 16000);
  auto pool = load_noise_pool(dir.file("noises"), 16000);

  Manifest corrupted = corrupt_corpus(corpus.manifest, rooms, pool, 10.0, 20.0,
                                      15, dir.file("corrupted"));
  REQUIRE(corrupted.size() == corpus.manifest.size());
  for (size_t i = 0; i < corrupted.size(); i++) {
    const auto &orig = corpus.manifest.utterances[i];
    const auto &got = corrupted.utterances[i];
    CHECK(got.utt_id == orig.utt_id);
    CHECK(got.transcript == orig.transcript);
    CHECK(got.duration_s == doctest::Approx(orig.duration_s));
    CHECK(got.audio_path != orig.audio_path);
    AudioSignal audio = read_wav(got.audio_path);
    CHECK(audio.size() == read_wav(orig.audio_path).size());
    // The corrupted audio differs from the clean audio.
    CHECK(asrtk_test::read_file(got.audio_path) !=
          asrtk_test::read_file(orig.audio_path));
  }
}
