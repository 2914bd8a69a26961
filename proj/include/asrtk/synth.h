// include/asrtk/synth.h
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

#ifndef ASRTK_SYNTH_H_
#define ASRTK_SYNTH_H_

#include <string>

#include "asrtk/augment.h"
#include "asrtk/evaluation.h"
#include "asrtk/manifest.h"

namespace asrtk {

// Synthetic corpus: tone-complex "phones" with known segmentations, one word
// per non-silence phone class, words separated by short silences. Speaker
// identity is a spectral scale drawn from [speaker_shift_min,
// speaker_shift_max]; choosing disjoint ranges for two corpora creates a
// controlled domain mismatch.
struct SynthCorpusConfig {
  int num_speakers = 4;
  int utts_per_speaker = 8;
  int phone_classes = 40;  // including silence (class 0)
  uint64_t seed = 0;
  int sample_rate_hz = 16000;
  int min_words = 2;
  int max_words = 4;
  double phone_ms_min = 120.0;
  double phone_ms_max = 240.0;
  double silence_ms_min = 60.0;
  double silence_ms_max = 120.0;
  double speaker_shift_min = 0.92;
  double speaker_shift_max = 1.08;
  std::string speaker_prefix = "spk";
  std::string utt_prefix = "utt";
};

struct SynthCorpus {
  Manifest manifest;
  SegmentMap segments;
  SymbolTable symbols;
};

// Renders audio under <out_dir>/audio and writes manifest.jsonl,
// segments.jsonl and symbols.json. Fully deterministic per seed.
SynthCorpus synth_corpus(const SynthCorpusConfig &config,
                         const std::string &out_dir);

// Synthetic impulse responses: a direct path plus an exponentially decaying
// noise tail; decay time depends on the room size class.
void synth_rir_database(const std::string &out_dir, int num_rooms,
                        int positions_per_room, uint64_t seed,
                        int sample_rate_hz = 16000);

// Colored/modulated noise recordings for the additive-noise pool.
void synth_noise_pool(const std::string &out_dir, int num_recordings,
                      uint64_t seed, int sample_rate_hz = 16000,
                      double duration_s = 4.0);

// Phone class active at each analysis frame center.
std::vector<int> targets_from_segments(const std::vector<PhoneSegment> &segs,
                                       size_t num_frames,
                                       size_t window_samples,
                                       size_t shift_samples);

// Rewrites every utterance of a corpus through the reverb+noise chain while
// keeping ids, transcripts and durations. Used to build evaluation corpora
// whose acoustics mismatch the training data (pass held-out RIRs/noises).
Manifest corrupt_corpus(const Manifest &manifest,
                        const std::vector<RoomGroup> &rirs,
                        const NoisePool &pool, double snr_db_min,
                        double snr_db_max, uint64_t seed,
                        const std::string &out_audio_dir, int jobs = 1);

}  // namespace asrtk

#endif  // ASRTK_SYNTH_H_
