// include/asrtk/features.h
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

#ifndef ASRTK_FEATURES_H_
#define ASRTK_FEATURES_H_

#include <cstdint>
#include <string>
#include <vector>

#include "asrtk/audio.h"
#include "asrtk/matrix.h"

namespace asrtk {

enum class WindowType { kPovey, kHamming };

struct FeatureConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_mel_bins = 40;
  int num_ceps = 40;
  double preemphasis = 0.97;
  double low_freq_hz = 20.0;
  double high_freq_hz = 7600.0;
  double log_floor = 1e-10;
  WindowType window = WindowType::kPovey;
  // Cepstral mean normalization hook; off so that features stay a pure
  // per-frame function of the audio.
  bool cepstral_mean_norm = false;
};

struct FeatureMatrix {
  Matrix frames;  // T x D
  double frame_shift_ms = 10.0;
  double frame_length_ms = 25.0;

  size_t num_frames() const { return frames.rows; }
  size_t dim() const { return frames.cols; }
};

// Number of whole analysis windows in num_samples (snip-edges framing):
// 1 + floor((num_samples - window) / shift), 0 if shorter than one window.
size_t num_frames_for(size_t num_samples, size_t window_samples,
                      size_t shift_samples);

// MFCC pipeline: per-frame pre-emphasis, window, |FFT|^2, mel filterbank,
// floored log, orthonormal DCT-II.
FeatureMatrix compute_mfcc(const AudioSignal &signal,
                           const FeatureConfig &config = {});

// Concatenates frames t-left .. t+right per output frame, replicating edge
// frames at the boundaries.
FeatureMatrix splice(const FeatureMatrix &frames, int left = 2, int right = 2);

struct RecordingEmbedding {
  Vector vector;  // dimension kRecordingEmbeddingDim
  std::string source_id;
};

inline constexpr int kRecordingEmbeddingDim = 100;
inline constexpr uint64_t kEmbeddingProjectionSeed = 0x41535254u;

// Per-recording conditioning vector standing in the i-vector slot of the
// model input: (per-dim mean, per-dim std) over frames, mapped through a
// fixed seeded projection with orthonormal columns. Identical audio gives an
// identical embedding, independent of any training stage.
RecordingEmbedding recording_embedding(const FeatureMatrix &frames,
                                       const std::string &source_id,
                                       uint64_t seed = kEmbeddingProjectionSeed);

// The projection used by recording_embedding (kRecordingEmbeddingDim x
// 2*feature_dim, orthonormal columns).
const Matrix &embedding_projection(size_t feature_dim,
                                   uint64_t seed = kEmbeddingProjectionSeed);

// Per-frame concat of spliced features and the recording embedding.
Matrix assemble_input(const FeatureMatrix &spliced,
                      const RecordingEmbedding &emb);

// Feature archive: 16-byte header (magic "FEAT", u32 rows, u32 cols, u32
// reserved), then row-major little-endian f32.
void write_feature_archive(const Matrix &features, const std::string &path);
Matrix read_feature_archive(const std::string &path);

struct FeatureIndexEntry {
  std::string utt_id;
  std::string path;
  uint32_t num_frames = 0;
  uint32_t dim = 0;
};

void write_feature_index(const std::vector<FeatureIndexEntry> &entries,
                         const std::string &path);
std::vector<FeatureIndexEntry> read_feature_index(const std::string &path);

}  // namespace asrtk

#endif  // ASRTK_FEATURES_H_
