// src/synth.cc
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

#include "asrtk/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "asrtk/error.h"
#include "asrtk/parallel.h"

namespace fs = std::filesystem;

namespace asrtk {

using nlohmann::json;

namespace {

// Phone k > 0 is a two-partial tone complex. Frequencies are spaced
// geometrically so that a multiplicative speaker shift moves every class by
// the same log-frequency offset and cannot reorder them.
void phone_frequencies(int phone, int phone_classes, double *f1, double *f2) {
  const int k = phone - 1;
  const int n = std::max(1, phone_classes - 2);
  *f1 = 250.0 * std::pow(2800.0 / 250.0, double(k) / double(n));
  *f2 = 1.7 * (*f1);
}

std::string word_for_phone(int phone) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%02d", phone);
  return buf;
}

}  // namespace

std::vector<int> targets_from_segments(const std::vector<PhoneSegment> &segs,
                                       size_t num_frames,
                                       size_t window_samples,
                                       size_t shift_samples) {
  if (segs.empty()) throw DomainError("targets_from_segments: no segments");
  std::vector<int> targets(num_frames, segs.back().phone);
  for (size_t t = 0; t < num_frames; t++) {
    const int64_t center = int64_t(t * shift_samples + window_samples / 2);
    int phone = -1;
    for (const auto &s : segs) {
      if (center >= s.start && center < s.end) {
        phone = s.phone;
        break;
      }
    }
    if (phone < 0)
      phone = (center < segs.front().start) ? segs.front().phone
                                            : segs.back().phone;
    targets[t] = phone;
  }
  return targets;
}

SynthCorpus synth_corpus(const SynthCorpusConfig &config,
                         const std::string &out_dir) {
  if (config.num_speakers < 1 || config.utts_per_speaker < 1)
    throw ConfigError("synth_corpus: need speakers and utterances");
  if (config.phone_classes < 3)
    throw ConfigError("synth_corpus: need at least 3 phone classes");

  const fs::path audio_dir = fs::path(out_dir) / "audio";
  fs::create_directories(audio_dir);

  const int rate = config.sample_rate_hz;
  SynthCorpus corpus;
  corpus.symbols.silence_id = 0;
  corpus.symbols.words.push_back("<sil>");
  for (int k = 1; k < config.phone_classes; k++)
    corpus.symbols.words.push_back(word_for_phone(k));

  for (int s = 0; s < config.num_speakers; s++) {
    char spk_buf[32];
    std::snprintf(spk_buf, sizeof(spk_buf), "%s%02d",
                  config.speaker_prefix.c_str(), s);
    const std::string speaker_id = spk_buf;

    Rng spk_rng(derive_seed(config.seed, speaker_id, "speaker"));
    const double shift =
        spk_rng.uniform(config.speaker_shift_min, config.speaker_shift_max);
    // Mild per-speaker spectral tilt on the second partial.
    const double tilt = spk_rng.uniform(0.7, 1.0);

    for (int u = 0; u < config.utts_per_speaker; u++) {
      char utt_buf[64];
      std::snprintf(utt_buf, sizeof(utt_buf), "%s_%s%03d", speaker_id.c_str(),
                    config.utt_prefix.c_str(), u);
      const std::string utt_id = utt_buf;
      Rng rng(derive_seed(config.seed, utt_id, "utterance"));

      const int num_words =
          int(rng.integer(config.min_words, config.max_words));
      // Word sequence: phone ids 1..K-1.
      std::vector<int> phones;
      for (int w = 0; w < num_words; w++)
        phones.push_back(int(rng.integer(1, config.phone_classes - 1)));

      auto draw_len = [&](double lo_ms, double hi_ms) {
        return size_t(std::llround(rng.uniform(lo_ms, hi_ms) * rate / 1000.0));
      };

      AudioSignal audio;
      audio.sample_rate_hz = rate;
      std::vector<PhoneSegment> segs;
      Utterance utt;
      utt.utt_id = utt_id;
      utt.speaker_id = speaker_id;
      utt.condition_tag = "clean";

      auto append_segment = [&](int phone, size_t len) {
        const int64_t start = int64_t(audio.samples.size());
        double f1 = 0.0, f2 = 0.0;
        double phase1 = 0.0, phase2 = 0.0;
        if (phone != 0) {
          phone_frequencies(phone, config.phone_classes, &f1, &f2);
          f1 *= shift;
          f2 *= shift;
          phase1 = rng.uniform(0.0, 2.0 * M_PI);
          phase2 = rng.uniform(0.0, 2.0 * M_PI);
        }
        for (size_t i = 0; i < len; i++) {
          double v = 0.004 * rng.gaussian();  // noise floor
          if (phone != 0) {
            const double t = double(i) / rate;
            v += 0.32 * std::sin(2.0 * M_PI * f1 * t + phase1) +
                 0.18 * tilt * std::sin(2.0 * M_PI * f2 * t + phase2);
          }
          audio.samples.push_back(v);
        }
        segs.push_back({phone, start, int64_t(audio.samples.size())});
      };

      append_segment(0, draw_len(config.silence_ms_min, config.silence_ms_max));
      for (int w = 0; w < num_words; w++) {
        append_segment(phones[size_t(w)],
                       draw_len(config.phone_ms_min, config.phone_ms_max));
        append_segment(0,
                       draw_len(config.silence_ms_min, config.silence_ms_max));
        utt.transcript.push_back(word_for_phone(phones[size_t(w)]));
      }

      utt.audio_path = (audio_dir / (utt_id + ".wav")).string();
      utt.duration_s = audio.duration_s();
      write_wav(audio, utt.audio_path);
      corpus.manifest.utterances.push_back(utt);
      corpus.segments[utt_id] = std::move(segs);
    }
  }

  write_manifest(corpus.manifest,
                 (fs::path(out_dir) / "manifest.jsonl").string());
  write_segments(corpus.segments,
                 (fs::path(out_dir) / "segments.jsonl").string());
  write_symbol_table(corpus.symbols,
                     (fs::path(out_dir) / "symbols.json").string());
  return corpus;
}

void synth_rir_database(const std::string &out_dir, int num_rooms,
                        int positions_per_room, uint64_t seed,
                        int sample_rate_hz) {
  if (num_rooms < 1 || positions_per_room < 1)
    throw ConfigError("synth_rir_database: need rooms and positions");

  for (int r = 0; r < num_rooms; r++) {
    char room_buf[32];
    std::snprintf(room_buf, sizeof(room_buf), "room%02d", r);
    const fs::path room_dir = fs::path(out_dir) / room_buf;
    fs::create_directories(room_dir);

    Rng room_rng(derive_seed(seed, room_buf, "room"));
    const bool small = (r % 2 == 0);
    // Reverberation time constant in ms; medium rooms ring longer.
    const double tau_ms =
        small ? room_rng.uniform(25.0, 50.0) : room_rng.uniform(60.0, 120.0);
    const double tail_gain = room_rng.uniform(0.25, 0.45);

    {
      std::ofstream meta(room_dir / "room.json");
      json j;
      j["size_class"] = small ? "small" : "medium";
      meta << j.dump() << '\n';
    }

    for (int p = 0; p < positions_per_room; p++) {
      char pos_buf[32];
      std::snprintf(pos_buf, sizeof(pos_buf), "pos%02d", p);
      Rng rng(derive_seed(seed, std::string(room_buf) + "/" + pos_buf, "rir"));

      const size_t direct = 16 + rng.index(32);
      const size_t len =
          size_t(std::llround(4.0 * tau_ms * sample_rate_hz / 1000.0)) +
          direct;
      AudioSignal rir;
      rir.sample_rate_hz = sample_rate_hz;
      rir.samples.assign(len, 0.0);
      rir.samples[direct] = 1.0;
      const double tau = tau_ms * sample_rate_hz / 1000.0;
      for (size_t i = direct + 1; i < len; i++) {
        const double decay = std::exp(-double(i - direct) / tau);
        rir.samples[i] = tail_gain * decay * rng.gaussian() * 0.4;
      }
      double peak = 0.0;
      for (double v : rir.samples) peak = std::max(peak, std::fabs(v));
      for (double &v : rir.samples) v *= 0.97 / peak;
      write_wav(rir, (room_dir / (std::string(pos_buf) + ".wav")).string());
    }
  }
}

Manifest corrupt_corpus(const Manifest &manifest,
                        const std::vector<RoomGroup> &rirs,
                        const NoisePool &pool, double snr_db_min,
                        double snr_db_max, uint64_t seed,
                        const std::string &out_audio_dir, int jobs) {
  fs::create_directories(out_audio_dir);
  Manifest out;
  out.utterances.resize(manifest.size());
  parallel_for(manifest.size(), jobs, [&](size_t i) {
    const Utterance &src = manifest.utterances[i];
    AugmentationSpec spec;
    spec.condition = Condition::kReverbRealNoise;
    spec.snr_db_min = snr_db_min;
    spec.snr_db_max = snr_db_max;
    spec.seed = derive_seed(seed, src.utt_id, "corrupt");

    AudioSignal clean = read_wav(src.audio_path);
    AugmentedUtterance aug =
        augment_utterance(src, clean, spec, rirs, pool);
    Utterance row = src;  // keep the original id and transcript
    row.audio_path =
        (fs::path(out_audio_dir) / (src.utt_id + ".wav")).string();
    write_wav(aug.audio, row.audio_path);
    out.utterances[i] = std::move(row);
  });
  return out;
}

void synth_noise_pool(const std::string &out_dir, int num_recordings,
                      uint64_t seed, int sample_rate_hz, double duration_s) {
  if (num_recordings < 1)
    throw ConfigError("synth_noise_pool: need recordings");
  fs::create_directories(out_dir);

  const size_t len = size_t(std::llround(duration_s * sample_rate_hz));
  for (int r = 0; r < num_recordings; r++) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "noise%02d", r);
    Rng rng(derive_seed(seed, buf, "noise"));

    // One-pole lowpassed noise with slow amplitude modulation; every third
    // recording carries a siren-like tone.
    const double pole = rng.uniform(0.9, 0.995);
    const double mod_hz = rng.uniform(0.3, 2.0);
    const double mod_phase = rng.uniform(0.0, 2.0 * M_PI);
    const bool tonal = (r % 3 == 2);
    const double tone_hz = rng.uniform(500.0, 1500.0);

    AudioSignal noise;
    noise.sample_rate_hz = sample_rate_hz;
    noise.samples.resize(len);
    double state = 0.0;
    for (size_t i = 0; i < len; i++) {
      state = pole * state + (1.0 - pole) * rng.gaussian();
      const double t = double(i) / sample_rate_hz;
      double v = state * (0.6 + 0.4 * std::sin(2.0 * M_PI * mod_hz * t +
                                               mod_phase));
      if (tonal) {
        // Slow sweep around the base tone.
        const double f = tone_hz * (1.0 + 0.2 * std::sin(2.0 * M_PI * 0.5 * t));
        v += 0.05 * std::sin(2.0 * M_PI * f * t);
      }
      noise.samples[i] = v;
    }
    // Normalize RMS to a common level.
    double power = 0.0;
    for (double v : noise.samples) power += v * v;
    power /= double(len);
    const double scale = 0.08 / std::sqrt(power);
    for (double &v : noise.samples) v *= scale;

    write_wav(noise, (fs::path(out_dir) / (std::string(buf) + ".wav")).string());
  }
}

}  // namespace asrtk
