// src/features.cc
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

#include "asrtk/features.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>

#include <json.hpp>

#include "asrtk/error.h"
#include "asrtk/fft.h"
#include "asrtk/rng.h"

namespace asrtk {

using nlohmann::json;

namespace {

double mel_scale(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

std::vector<double> make_window(WindowType type, size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; i++) {
    const double c = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) / double(n - 1));
    switch (type) {
      case WindowType::kPovey:
        w[i] = std::pow(c, 0.85);
        break;
      case WindowType::kHamming:
        w[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * double(i) / double(n - 1));
        break;
    }
  }
  return w;
}

// Triangular mel filterbank over the power spectrum bins, rows = filters.
Matrix make_mel_banks(int num_bins, size_t fft_size, int sample_rate,
                      double low_hz, double high_hz) {
  const size_t num_fft_bins = fft_size / 2 + 1;
  const double mel_low = mel_scale(low_hz);
  const double mel_high = mel_scale(high_hz);
  const double mel_step = (mel_high - mel_low) / double(num_bins + 1);

  Matrix banks(size_t(num_bins), num_fft_bins, 0.0);
  for (int f = 0; f < num_bins; f++) {
    const double left = mel_low + mel_step * f;
    const double center = mel_low + mel_step * (f + 1);
    const double right = mel_low + mel_step * (f + 2);
    for (size_t k = 0; k < num_fft_bins; k++) {
      const double mel = mel_scale(double(k) * sample_rate / double(fft_size));
      double weight = 0.0;
      if (mel > left && mel < right)
        weight = (mel <= center) ? (mel - left) / (center - left)
                                 : (right - mel) / (right - center);
      banks.at(size_t(f), k) = weight;
    }
  }
  return banks;
}

// Orthonormal DCT-II, rows = output coefficients.
Matrix make_dct(int num_ceps, int num_bins) {
  Matrix dct{size_t(num_ceps), size_t(num_bins)};
  const double n = double(num_bins);
  for (int k = 0; k < num_ceps; k++) {
    const double scale = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < num_bins; i++)
      dct.at(size_t(k), size_t(i)) =
          scale * std::cos(M_PI / n * (double(i) + 0.5) * double(k));
  }
  return dct;
}

}  // namespace

size_t num_frames_for(size_t num_samples, size_t window_samples,
                      size_t shift_samples) {
  if (num_samples < window_samples) return 0;
  return 1 + (num_samples - window_samples) / shift_samples;
}

FeatureMatrix compute_mfcc(const AudioSignal &signal,
                           const FeatureConfig &config) {
  const int rate = signal.sample_rate_hz;
  const size_t window =
      size_t(std::lround(config.frame_length_ms * rate / 1000.0));
  const size_t shift =
      size_t(std::lround(config.frame_shift_ms * rate / 1000.0));
  if (signal.size() < window)
    throw DomainError("compute_mfcc: signal shorter than one window");
  if (config.high_freq_hz > rate / 2.0)
    throw DomainError("compute_mfcc: high_freq_hz above Nyquist");

  const size_t num_frames = num_frames_for(signal.size(), window, shift);
  const size_t fft_size = next_pow2(window);
  const std::vector<double> win = make_window(config.window, window);
  const Matrix banks = make_mel_banks(config.num_mel_bins, fft_size, rate,
                                      config.low_freq_hz, config.high_freq_hz);
  const Matrix dct = make_dct(config.num_ceps, config.num_mel_bins);

  FeatureMatrix out;
  out.frame_length_ms = config.frame_length_ms;
  out.frame_shift_ms = config.frame_shift_ms;
  out.frames = Matrix(num_frames, size_t(config.num_ceps));

  std::vector<double> frame(window);
  std::vector<std::complex<double>> spec(fft_size);
  std::vector<double> power(fft_size / 2 + 1);
  std::vector<double> logmel(size_t(config.num_mel_bins));

  for (size_t t = 0; t < num_frames; t++) {
    const double *src = signal.samples.data() + t * shift;
    // Pre-emphasis inside the frame, first sample against itself.
    frame[0] = src[0] - config.preemphasis * src[0];
    for (size_t i = 1; i < window; i++)
      frame[i] = src[i] - config.preemphasis * src[i - 1];
    for (size_t i = 0; i < window; i++) frame[i] *= win[i];

    for (size_t i = 0; i < window; i++) spec[i] = frame[i];
    for (size_t i = window; i < fft_size; i++) spec[i] = 0.0;
    fft_inplace(&spec, false);
    for (size_t k = 0; k < power.size(); k++) power[k] = std::norm(spec[k]);

    for (int f = 0; f < config.num_mel_bins; f++) {
      double acc = 0.0;
      const double *w = banks.row(size_t(f));
      for (size_t k = 0; k < power.size(); k++) acc += w[k] * power[k];
      logmel[size_t(f)] = std::log(std::max(acc, config.log_floor));
    }

    double *dst = out.frames.row(t);
    for (int k = 0; k < config.num_ceps; k++) {
      double acc = 0.0;
      const double *d = dct.row(size_t(k));
      for (int f = 0; f < config.num_mel_bins; f++)
        acc += d[f] * logmel[size_t(f)];
      dst[k] = acc;
    }
  }

  if (config.cepstral_mean_norm && num_frames > 0) {
    for (size_t c = 0; c < out.frames.cols; c++) {
      double mean = 0.0;
      for (size_t t = 0; t < num_frames; t++) mean += out.frames.at(t, c);
      mean /= double(num_frames);
      for (size_t t = 0; t < num_frames; t++) out.frames.at(t, c) -= mean;
    }
  }
  return out;
}

FeatureMatrix splice(const FeatureMatrix &frames, int left, int right) {
  const size_t t_count = frames.num_frames();
  const size_t d = frames.dim();
  const size_t width = size_t(left + right + 1);
  if (t_count == 0) throw DomainError("splice: empty feature matrix");

  FeatureMatrix out;
  out.frame_length_ms = frames.frame_length_ms;
  out.frame_shift_ms = frames.frame_shift_ms;
  out.frames = Matrix(t_count, width * d);
  for (size_t t = 0; t < t_count; t++) {
    double *dst = out.frames.row(t);
    for (int o = -left; o <= right; o++) {
      const size_t src_t =
          size_t(std::clamp<long>(long(t) + o, 0, long(t_count) - 1));
      std::memcpy(dst + size_t(o + left) * d, frames.frames.row(src_t),
                  d * sizeof(double));
    }
  }
  return out;
}

const Matrix &embedding_projection(size_t feature_dim, uint64_t seed) {
  static std::mutex mu;
  static std::map<std::pair<size_t, uint64_t>, Matrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(feature_dim, seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const size_t out_dim = kRecordingEmbeddingDim;
  const size_t in_dim = 2 * feature_dim;
  if (in_dim > out_dim)
    throw DomainError("embedding_projection: 2*feature_dim exceeds " +
                      std::to_string(out_dim));

  Matrix p(out_dim, in_dim);
  Rng rng(seed);
  for (auto &v : p.data) v = rng.gaussian();

  // Gram-Schmidt on columns, run twice for orthogonality well below the
  // 1e-10 the contract promises.
  for (int pass = 0; pass < 2; pass++) {
    for (size_t c = 0; c < in_dim; c++) {
      for (size_t prev = 0; prev < c; prev++) {
        double dot = 0.0;
        for (size_t r = 0; r < out_dim; r++)
          dot += p.at(r, c) * p.at(r, prev);
        for (size_t r = 0; r < out_dim; r++) p.at(r, c) -= dot * p.at(r, prev);
      }
      double norm = 0.0;
      for (size_t r = 0; r < out_dim; r++) norm += p.at(r, c) * p.at(r, c);
      norm = std::sqrt(norm);
      for (size_t r = 0; r < out_dim; r++) p.at(r, c) /= norm;
    }
  }
  auto [pos, inserted] = cache.emplace(key, std::move(p));
  (void)inserted;
  return pos->second;
}

RecordingEmbedding recording_embedding(const FeatureMatrix &frames,
                                       const std::string &source_id,
                                       uint64_t seed) {
  const size_t t_count = frames.num_frames();
  const size_t d = frames.dim();
  if (t_count == 0) throw DomainError("recording_embedding: no frames");

  Vector stats(2 * d, 0.0);
  for (size_t c = 0; c < d; c++) {
    double mean = 0.0;
    for (size_t t = 0; t < t_count; t++) mean += frames.frames.at(t, c);
    mean /= double(t_count);
    double var = 0.0;
    for (size_t t = 0; t < t_count; t++) {
      const double dev = frames.frames.at(t, c) - mean;
      var += dev * dev;
    }
    stats[c] = mean;
    stats[d + c] = std::sqrt(var / double(t_count));
  }

  const Matrix &p = embedding_projection(d, seed);
  RecordingEmbedding emb;
  emb.source_id = source_id;
  emb.vector.assign(kRecordingEmbeddingDim, 0.0);
  for (size_t r = 0; r < p.rows; r++) {
    double acc = 0.0;
    const double *row = p.row(r);
    for (size_t c = 0; c < p.cols; c++) acc += row[c] * stats[c];
    emb.vector[r] = acc;
  }
  return emb;
}

Matrix assemble_input(const FeatureMatrix &spliced,
                      const RecordingEmbedding &emb) {
  const size_t t_count = spliced.num_frames();
  const size_t d = spliced.dim();
  const size_t e = emb.vector.size();
  if (e != size_t(kRecordingEmbeddingDim))
    throw DomainError("assemble_input: embedding dim " + std::to_string(e));

  Matrix out(t_count, d + e);
  for (size_t t = 0; t < t_count; t++) {
    double *dst = out.row(t);
    std::memcpy(dst, spliced.frames.row(t), d * sizeof(double));
    std::memcpy(dst + d, emb.vector.data(), e * sizeof(double));
  }
  return out;
}

static constexpr char kFeatureMagic[4] = {'F', 'E', 'A', 'T'};

void write_feature_archive(const Matrix &features, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open feature archive for writing: " + path);
  uint32_t header[3] = {uint32_t(features.rows), uint32_t(features.cols), 0};
  out.write(kFeatureMagic, 4);
  out.write(reinterpret_cast<const char *>(header), 12);
  std::vector<float> row(features.cols);
  for (size_t t = 0; t < features.rows; t++) {
    const double *src = features.row(t);
    for (size_t c = 0; c < features.cols; c++) row[c] = float(src[c]);
    out.write(reinterpret_cast<const char *>(row.data()),
              std::streamsize(row.size() * sizeof(float)));
  }
  if (!out) throw DataError("short write to feature archive: " + path);
}

Matrix read_feature_archive(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature archive: " + path);
  char magic[4];
  uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char *>(header), 12);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0)
    throw FormatError("bad feature archive header: " + path);
  Matrix m(header[0], header[1]);
  std::vector<float> row(m.cols);
  for (size_t t = 0; t < m.rows; t++) {
    in.read(reinterpret_cast<char *>(row.data()),
            std::streamsize(row.size() * sizeof(float)));
    if (!in) throw FormatError("truncated feature archive: " + path);
    double *dst = m.row(t);
    for (size_t c = 0; c < m.cols; c++) dst[c] = double(row[c]);
  }
  return m;
}

void write_feature_index(const std::vector<FeatureIndexEntry> &entries,
                         const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open feature index for writing: " + path);
  for (const auto &e : entries) {
    json j;
    j["utt_id"] = e.utt_id;
    j["path"] = e.path;
    j["num_frames"] = e.num_frames;
    j["dim"] = e.dim;
    out << j.dump() << '\n';
  }
}

std::vector<FeatureIndexEntry> read_feature_index(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature index: " + path);
  std::vector<FeatureIndexEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw FormatError("bad feature index line in " + path);
    FeatureIndexEntry e;
    e.utt_id = j.at("utt_id").get<std::string>();
    e.path = j.at("path").get<std::string>();
    e.num_frames = j.at("num_frames").get<uint32_t>();
    e.dim = j.at("dim").get<uint32_t>();
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace asrtk
