// include/asrtk/augment.h
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

#ifndef ASRTK_AUGMENT_H_
#define ASRTK_AUGMENT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asrtk/audio.h"
#include "asrtk/manifest.h"
#include "asrtk/rng.h"

namespace asrtk {

enum class RoomSize { kSmall, kMedium };

// Impulse responses measured in one room at different positions. Convolving
// speech with one of them simulates that room's reverberation.
struct RoomGroup {
  std::string room_id;
  std::vector<std::string> position_ids;
  std::vector<AudioSignal> rirs;
  RoomSize size_class = RoomSize::kSmall;
};

struct NoisePool {
  std::vector<std::string> ids;
  std::vector<AudioSignal> recordings;

  bool empty() const { return recordings.empty(); }
  size_t size() const { return recordings.size(); }
};

enum class Condition { kClean, kReverb, kReverbRealNoise };

std::string condition_name(Condition c);

struct AugmentationSpec {
  Condition condition = Condition::kClean;
  double snr_db_min = 10.0;
  double snr_db_max = 20.0;
  int max_superposed_noises = 3;
  uint64_t seed = 0;
};

// Reverberant signal, truncated to the input length. If the peak after
// convolution exceeds 1 the output is rescaled to peak 0.99 and `scale`
// records the applied factor (1.0 otherwise).
struct ConvolveResult {
  AudioSignal signal;
  double scale = 1.0;
};

ConvolveResult convolve(const AudioSignal &signal, const AudioSignal &rir);

// speech + g * noise[0:len(speech)], with g chosen so that the ratio of the
// two addends' mean-square powers equals snr_db.
AudioSignal mix_at_snr(const AudioSignal &speech, const AudioSignal &noise,
                       double snr_db);

struct NoiseDraw {
  std::string noise_id;
  size_t recording_index = 0;
  size_t start_offset = 0;
};

// Sum of `count` distinct recordings (all of them if the pool is smaller),
// each cropped/looped to target_len starting at a random offset.
AudioSignal superpose_noises(const NoisePool &pool, int count,
                             size_t target_len, Rng *rng,
                             std::vector<NoiseDraw> *draws = nullptr);

// Playback-rate change by a constant factor. Output length round(len/factor);
// factor 1.0 is the identity.
AudioSignal speed_perturb(const AudioSignal &signal, double factor);

// Every random decision taken for one augmented utterance, enough to rebuild
// both addends of the mixture exactly.
struct ProvenanceRecord {
  std::string utt_id;
  std::string source_utt_id;
  std::string condition;
  uint64_t seed = 0;
  std::string room_id;
  std::string h_position;
  std::string h_tilde_position;
  double snr_db = 0.0;
  int noise_count = 0;
  std::vector<NoiseDraw> noise_draws;
  double speech_conv_scale = 1.0;
  double noise_conv_scale = 1.0;
  double final_scale = 1.0;
};

struct AugmentedUtterance {
  Utterance utterance;
  AudioSignal audio;
  ProvenanceRecord provenance;
};

// Applies one condition of the policy to one utterance. Reverb picks a room
// and a position; Reverb+RealNoise additionally picks a second position of
// the same room for the noise path, an SNR, and up to max_superposed_noises
// recordings. The randomness comes entirely from spec.seed.
AugmentedUtterance augment_utterance(const Utterance &utt,
                                     const AudioSignal &clean,
                                     const AugmentationSpec &spec,
                                     const std::vector<RoomGroup> &rirs,
                                     const NoisePool &pool);

// Metadata-only plan of the 3-fold multi-condition merge: the clean rows
// followed by the reverb and reverb+noise copies with derived ids, tags,
// durations and output paths. No audio is touched.
Manifest plan_multicondition(const Manifest &manifest,
                             const std::string &out_audio_dir);

struct MulticonditionResult {
  Manifest manifest;
  std::vector<ProvenanceRecord> provenance;
};

// Renders the plan: clean entries pass through, augmented copies are written
// under out_audio_dir. Per-utterance RNG is seeded by
// derive_seed(seed, utt_id, condition), so the result is byte-identical for
// any number of worker threads.
MulticonditionResult build_multicondition(const Manifest &manifest,
                                          const std::vector<RoomGroup> &rirs,
                                          const NoisePool &pool, uint64_t seed,
                                          const AugmentationSpec &spec,
                                          const std::string &out_audio_dir,
                                          int jobs = 1);

void write_provenance(const std::vector<ProvenanceRecord> &records,
                      const std::string &path);

// 3-fold speed perturbation of a whole manifest. Copies for factor 1.0 reuse
// the original audio file; other factors are rendered into out_audio_dir.
Manifest expand_speed_perturb(const Manifest &manifest,
                              const std::string &out_audio_dir,
                              const std::vector<double> &factors = {0.9, 1.0,
                                                                    1.1},
                              int jobs = 1);

// RIR database on disk: one directory per room holding position WAVs and a
// room.json with {"size_class": "small"|"medium"}. RIRs are resampled to
// corpus_rate_hz on load.
std::vector<RoomGroup> load_rir_database(const std::string &dir,
                                         int corpus_rate_hz);

NoisePool load_noise_pool(const std::string &dir, int corpus_rate_hz);

// Phone segmentation of one utterance in samples, used to derive per-frame
// training targets.
struct PhoneSegment {
  int phone = 0;
  int64_t start = 0;  // inclusive
  int64_t end = 0;    // exclusive
};

using SegmentMap = std::map<std::string, std::vector<PhoneSegment>>;

SegmentMap read_segments(const std::string &path);
void write_segments(const SegmentMap &segments, const std::string &path);

// Segment bookkeeping for derived copies: condition copies keep boundaries
// verbatim; speed-perturbed copies scale them by 1/factor.
std::vector<PhoneSegment> scale_segments(const std::vector<PhoneSegment> &segs,
                                         double factor, int64_t new_len);

}  // namespace asrtk

#endif  // ASRTK_AUGMENT_H_
