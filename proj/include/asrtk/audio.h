// include/asrtk/audio.h
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

#ifndef ASRTK_AUDIO_H_
#define ASRTK_AUDIO_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace asrtk {

// Mono audio held as 64-bit floats in [-1, 1]. File encoding is dealt with
// at the I/O boundary only, so DSP code never sees quantized values.
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return sample_rate_hz > 0 ? double(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Reads a RIFF/WAVE file. Accepts PCM 16-bit and IEEE float 32-bit, mono or
// multichannel; only channel 0 is returned. 16-bit samples are scaled by
// 1/32768; float samples are clamped into [-1, 1].
AudioSignal read_wav(const std::string &path);

// Writes PCM 16-bit little-endian mono. Samples outside [-1, 1] are
// hard-clipped; the number of clipped samples is returned and a warning is
// printed when nonzero.
size_t write_wav(const AudioSignal &signal, const std::string &path);

// Mean square of the samples.
double signal_power(const AudioSignal &signal);

// Resamples by an arbitrary length ratio with a windowed-sinc kernel
// (half-width 32 zero crossings). Output length is round(len * ratio) and the
// output carries new_rate_hz as its label.
AudioSignal resample_by_ratio(const AudioSignal &signal, double ratio,
                              int new_rate_hz);

// Band-limited resampling to target_rate_hz. Identity when the rate already
// matches.
AudioSignal resample(const AudioSignal &signal, int target_rate_hz);

}  // namespace asrtk

#endif  // ASRTK_AUDIO_H_
