// src/augment.cc
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

#include "asrtk/augment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "asrtk/error.h"
#include "asrtk/fft.h"
#include "asrtk/parallel.h"

namespace fs = std::filesystem;

namespace asrtk {

using nlohmann::json;

std::string condition_name(Condition c) {
  switch (c) {
    case Condition::kClean:
      return "clean";
    case Condition::kReverb:
      return "reverb";
    case Condition::kReverbRealNoise:
      return "reverb_real_noise";
  }
  return "unknown";
}

ConvolveResult convolve(const AudioSignal &signal, const AudioSignal &rir) {
  if (signal.empty() || rir.empty())
    throw DomainError("convolve: empty signal or rir");
  if (signal.sample_rate_hz != rir.sample_rate_hz)
    throw DomainError("convolve: sample rate mismatch (" +
                      std::to_string(signal.sample_rate_hz) + " vs " +
                      std::to_string(rir.sample_rate_hz) + ")");

  std::vector<double> full = fft_convolve(signal.samples, rir.samples);

  ConvolveResult res;
  res.signal.sample_rate_hz = signal.sample_rate_hz;
  // Truncating to the input length keeps segment boundaries aligned with the
  // transcript.
  res.signal.samples.assign(full.begin(),
                            full.begin() + std::ptrdiff_t(signal.size()));

  double peak = 0.0;
  for (double v : res.signal.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 1.0) {
    res.scale = 0.99 / peak;
    for (double &v : res.signal.samples) v *= res.scale;
  }
  return res;
}

AudioSignal mix_at_snr(const AudioSignal &speech, const AudioSignal &noise,
                       double snr_db) {
  if (speech.sample_rate_hz != noise.sample_rate_hz)
    throw DomainError("mix_at_snr: sample rate mismatch");
  if (noise.size() < speech.size())
    throw DomainError("mix_at_snr: noise shorter than speech");

  const size_t n = speech.size();
  double p_speech = 0.0, p_noise = 0.0;
  for (size_t i = 0; i < n; i++) {
    p_speech += speech.samples[i] * speech.samples[i];
    p_noise += noise.samples[i] * noise.samples[i];
  }
  p_speech /= double(n);
  p_noise /= double(n);
  if (p_speech <= 0.0 || p_noise <= 0.0)
    throw DomainError("mix_at_snr: zero-power input");

  const double gain =
      std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));

  AudioSignal out;
  out.sample_rate_hz = speech.sample_rate_hz;
  out.samples.resize(n);
  for (size_t i = 0; i < n; i++)
    out.samples[i] = speech.samples[i] + gain * noise.samples[i];
  return out;
}

AudioSignal superpose_noises(const NoisePool &pool, int count,
                             size_t target_len, Rng *rng,
                             std::vector<NoiseDraw> *draws) {
  if (pool.empty()) throw ConfigError("superpose_noises: empty noise pool");
  if (count < 1) throw DomainError("superpose_noises: count must be >= 1");
  if (target_len == 0) throw DomainError("superpose_noises: zero target_len");

  const std::vector<size_t> picks =
      rng->sample_without_replacement(pool.size(), size_t(count));

  AudioSignal out;
  out.sample_rate_hz = pool.recordings.front().sample_rate_hz;
  out.samples.assign(target_len, 0.0);
  for (size_t idx : picks) {
    const AudioSignal &rec = pool.recordings[idx];
    const size_t offset = rng->index(rec.size());
    for (size_t i = 0; i < target_len; i++)
      out.samples[i] += rec.samples[(offset + i) % rec.size()];
    if (draws) draws->push_back({pool.ids[idx], idx, offset});
  }
  return out;
}

AudioSignal speed_perturb(const AudioSignal &signal, double factor) {
  if (factor <= 0.0) throw DomainError("speed_perturb: nonpositive factor");
  if (factor == 1.0) return signal;
  return resample_by_ratio(signal, 1.0 / factor, signal.sample_rate_hz);
}

AugmentedUtterance augment_utterance(const Utterance &utt,
                                     const AudioSignal &clean,
                                     const AugmentationSpec &spec,
                                     const std::vector<RoomGroup> &rirs,
                                     const NoisePool &pool) {
  AugmentedUtterance out;
  out.utterance = utt;
  out.provenance.source_utt_id = utt.utt_id;
  out.provenance.condition = condition_name(spec.condition);
  out.provenance.seed = spec.seed;

  if (spec.condition == Condition::kClean) {
    out.audio = clean;
    out.utterance.condition_tag = "clean";
    out.provenance.utt_id = utt.utt_id;
    return out;
  }

  if (rirs.empty())
    throw ConfigError("augment_utterance: condition " +
                      condition_name(spec.condition) +
                      " requires at least one room group");

  Rng rng(spec.seed);
  const RoomGroup &room = rirs[rng.index(rirs.size())];
  const size_t h_pos = rng.index(room.rirs.size());
  out.provenance.room_id = room.room_id;
  out.provenance.h_position = room.position_ids[h_pos];

  ConvolveResult speech_conv = convolve(clean, room.rirs[h_pos]);
  out.provenance.speech_conv_scale = speech_conv.scale;

  if (spec.condition == Condition::kReverb) {
    out.audio = std::move(speech_conv.signal);
    out.utterance.utt_id = utt.utt_id + "_reverb";
    out.utterance.condition_tag = "reverb";
    out.provenance.utt_id = out.utterance.utt_id;
    out.provenance.final_scale = 1.0;
    return out;
  }

  // Reverb + real noise: h and h-tilde are two positions of the same room
  // when the room has more than one.
  size_t ht_pos = h_pos;
  if (room.rirs.size() > 1) {
    const size_t r = rng.index(room.rirs.size() - 1);
    ht_pos = (r >= h_pos) ? r + 1 : r;
  }
  out.provenance.h_tilde_position = room.position_ids[ht_pos];

  const double snr_db = rng.uniform(spec.snr_db_min, spec.snr_db_max);
  const int count = int(rng.integer(1, spec.max_superposed_noises));
  out.provenance.snr_db = snr_db;
  out.provenance.noise_count = count;

  AudioSignal noise_sum = superpose_noises(pool, count, clean.size(), &rng,
                                           &out.provenance.noise_draws);
  ConvolveResult noise_conv = convolve(noise_sum, room.rirs[ht_pos]);
  out.provenance.noise_conv_scale = noise_conv.scale;

  AudioSignal mixed = mix_at_snr(speech_conv.signal, noise_conv.signal, snr_db);

  double peak = 0.0;
  for (double v : mixed.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 1.0) {
    out.provenance.final_scale = 0.99 / peak;
    for (double &v : mixed.samples) v *= out.provenance.final_scale;
  }

  out.audio = std::move(mixed);
  out.utterance.utt_id = utt.utt_id + "_reverb_real_noise";
  out.utterance.condition_tag = "reverb_real_noise";
  out.provenance.utt_id = out.utterance.utt_id;
  return out;
}

Manifest plan_multicondition(const Manifest &manifest,
                             const std::string &out_audio_dir) {
  Manifest plan;
  plan.utterances.reserve(manifest.size() * 3);
  for (const auto &u : manifest.utterances) {
    Utterance c = u;
    c.condition_tag = "clean";
    plan.utterances.push_back(std::move(c));
  }
  for (const char *cond : {"reverb", "reverb_real_noise"}) {
    for (const auto &u : manifest.utterances) {
      Utterance a = u;
      a.utt_id = u.utt_id + "_" + cond;
      a.condition_tag = cond;
      a.audio_path = (fs::path(out_audio_dir) / (a.utt_id + ".wav")).string();
      plan.utterances.push_back(std::move(a));
    }
  }
  return plan;
}

MulticonditionResult build_multicondition(const Manifest &manifest,
                                          const std::vector<RoomGroup> &rirs,
                                          const NoisePool &pool, uint64_t seed,
                                          const AugmentationSpec &spec,
                                          const std::string &out_audio_dir,
                                          int jobs) {
  fs::create_directories(out_audio_dir);

  const size_t n = manifest.size();
  struct Task {
    size_t utt_index;
    Condition condition;
  };
  std::vector<Task> tasks;
  tasks.reserve(2 * n);
  for (Condition cond : {Condition::kReverb, Condition::kReverbRealNoise})
    for (size_t i = 0; i < n; i++) tasks.push_back({i, cond});

  std::vector<Utterance> rows(tasks.size());
  std::vector<ProvenanceRecord> provenance(tasks.size());

  parallel_for(tasks.size(), jobs, [&](size_t t) {
    const Task &task = tasks[t];
    const Utterance &src = manifest.utterances[task.utt_index];
    AugmentationSpec per_utt = spec;
    per_utt.condition = task.condition;
    per_utt.seed = derive_seed(seed, src.utt_id, condition_name(task.condition));

    AudioSignal clean = read_wav(src.audio_path);
    AugmentedUtterance aug = augment_utterance(src, clean, per_utt, rirs, pool);
    aug.utterance.audio_path =
        (fs::path(out_audio_dir) / (aug.utterance.utt_id + ".wav")).string();
    write_wav(aug.audio, aug.utterance.audio_path);
    rows[t] = std::move(aug.utterance);
    provenance[t] = std::move(aug.provenance);
  });

  MulticonditionResult res;
  res.manifest.utterances.reserve(3 * n);
  for (const auto &u : manifest.utterances) {
    Utterance c = u;
    c.condition_tag = "clean";
    res.manifest.utterances.push_back(std::move(c));
  }
  for (auto &row : rows) res.manifest.utterances.push_back(std::move(row));
  res.provenance = std::move(provenance);
  return res;
}

void write_provenance(const std::vector<ProvenanceRecord> &records,
                      const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open provenance file for writing: " + path);
  for (const auto &r : records) {
    json j;
    j["utt_id"] = r.utt_id;
    j["source_utt_id"] = r.source_utt_id;
    j["condition"] = r.condition;
    j["seed"] = r.seed;
    j["room_id"] = r.room_id;
    j["h_position"] = r.h_position;
    j["h_tilde_position"] = r.h_tilde_position;
    j["snr_db"] = r.snr_db;
    j["noise_count"] = r.noise_count;
    json draws = json::array();
    for (const auto &d : r.noise_draws)
      draws.push_back({{"noise_id", d.noise_id},
                       {"recording_index", d.recording_index},
                       {"start_offset", d.start_offset}});
    j["noise_draws"] = draws;
    j["speech_conv_scale"] = r.speech_conv_scale;
    j["noise_conv_scale"] = r.noise_conv_scale;
    j["final_scale"] = r.final_scale;
    out << j.dump() << '\n';
  }
}

Manifest expand_speed_perturb(const Manifest &manifest,
                              const std::string &out_audio_dir,
                              const std::vector<double> &factors, int jobs) {
  fs::create_directories(out_audio_dir);

  struct Task {
    size_t utt_index;
    double factor;
  };
  std::vector<Task> tasks;
  for (double f : factors)
    for (size_t i = 0; i < manifest.size(); i++) tasks.push_back({i, f});

  std::vector<Utterance> rows(tasks.size());
  parallel_for(tasks.size(), jobs, [&](size_t t) {
    const Task &task = tasks[t];
    const Utterance &src = manifest.utterances[task.utt_index];
    Utterance row = src;
    if (task.factor != 1.0) {
      char suffix[32];
      std::snprintf(suffix, sizeof(suffix), "_sp%.1f", task.factor);
      row.utt_id = src.utt_id + suffix;
      AudioSignal audio = read_wav(src.audio_path);
      AudioSignal warped = speed_perturb(audio, task.factor);
      row.audio_path =
          (fs::path(out_audio_dir) / (row.utt_id + ".wav")).string();
      row.duration_s = warped.duration_s();
      write_wav(warped, row.audio_path);
    }
    rows[t] = std::move(row);
  });

  Manifest out;
  out.utterances = std::move(rows);
  return out;
}

std::vector<RoomGroup> load_rir_database(const std::string &dir,
                                         int corpus_rate_hz) {
  if (!fs::is_directory(dir))
    throw DataError("rir database directory not found: " + dir);

  std::vector<std::string> room_dirs;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_directory()) room_dirs.push_back(e.path().string());
  std::sort(room_dirs.begin(), room_dirs.end());

  std::vector<RoomGroup> groups;
  for (const auto &room_dir : room_dirs) {
    RoomGroup g;
    g.room_id = fs::path(room_dir).filename().string();

    const fs::path meta_path = fs::path(room_dir) / "room.json";
    std::ifstream meta(meta_path);
    if (!meta)
      throw DataError("missing room metadata file: " + meta_path.string());
    json j;
    try {
      meta >> j;
    } catch (const json::parse_error &e) {
      throw FormatError("bad room metadata " + meta_path.string() + ": " +
                        e.what());
    }
    const std::string size = j.value("size_class", "");
    if (size == "small") {
      g.size_class = RoomSize::kSmall;
    } else if (size == "medium") {
      g.size_class = RoomSize::kMedium;
    } else {
      throw FormatError("room " + g.room_id +
                        ": size_class must be small or medium");
    }

    std::vector<std::string> wavs;
    for (const auto &e : fs::directory_iterator(room_dir))
      if (e.path().extension() == ".wav") wavs.push_back(e.path().string());
    std::sort(wavs.begin(), wavs.end());
    for (const auto &w : wavs) {
      AudioSignal rir = resample(read_wav(w), corpus_rate_hz);
      if (rir.empty()) throw DataError("empty rir: " + w);
      g.position_ids.push_back(fs::path(w).stem().string());
      g.rirs.push_back(std::move(rir));
    }
    if (g.rirs.empty())
      throw DataError("room " + g.room_id + " has no position wav files");
    groups.push_back(std::move(g));
  }
  if (groups.empty()) throw DataError("rir database is empty: " + dir);
  return groups;
}

NoisePool load_noise_pool(const std::string &dir, int corpus_rate_hz) {
  if (!fs::is_directory(dir))
    throw DataError("noise directory not found: " + dir);
  std::vector<std::string> wavs;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.path().extension() == ".wav") wavs.push_back(e.path().string());
  std::sort(wavs.begin(), wavs.end());

  NoisePool pool;
  for (const auto &w : wavs) {
    AudioSignal rec = resample(read_wav(w), corpus_rate_hz);
    if (rec.empty()) throw DataError("empty noise recording: " + w);
    pool.ids.push_back(fs::path(w).stem().string());
    pool.recordings.push_back(std::move(rec));
  }
  if (pool.empty()) throw DataError("noise pool is empty: " + dir);
  return pool;
}

SegmentMap read_segments(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open segments file: " + path);
  SegmentMap map;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw FormatError("segments " + path + " line " +
                        std::to_string(lineno) + ": " + e.what());
    }
    const std::string utt_id = j.at("utt_id").get<std::string>();
    std::vector<PhoneSegment> segs;
    for (const auto &s : j.at("segments")) {
      PhoneSegment seg;
      seg.phone = s.at(0).get<int>();
      seg.start = s.at(1).get<int64_t>();
      seg.end = s.at(2).get<int64_t>();
      segs.push_back(seg);
    }
    map[utt_id] = std::move(segs);
  }
  return map;
}

void write_segments(const SegmentMap &segments, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open segments file for writing: " + path);
  for (const auto &[utt_id, segs] : segments) {
    json arr = json::array();
    for (const auto &s : segs) arr.push_back({s.phone, s.start, s.end});
    json j;
    j["utt_id"] = utt_id;
    j["segments"] = arr;
    out << j.dump() << '\n';
  }
}

std::vector<PhoneSegment> scale_segments(const std::vector<PhoneSegment> &segs,
                                         double factor, int64_t new_len) {
  std::vector<PhoneSegment> out;
  out.reserve(segs.size());
  for (const auto &s : segs) {
    PhoneSegment t = s;
    t.start = std::clamp<int64_t>(std::llround(double(s.start) / factor), 0,
                                  new_len);
    t.end =
        std::clamp<int64_t>(std::llround(double(s.end) / factor), 0, new_len);
    if (t.end > t.start) out.push_back(t);
  }
  return out;
}

}  // namespace asrtk
