// src/audio.cc
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

#include "asrtk/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "asrtk/error.h"

namespace asrtk {

namespace {

uint32_t read_u32le(const unsigned char *p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t read_u16le(const unsigned char *p) {
  return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}

void put_u32le(uint32_t v, std::string *out) {
  out->push_back(char(v & 0xff));
  out->push_back(char((v >> 8) & 0xff));
  out->push_back(char((v >> 16) & 0xff));
  out->push_back(char((v >> 24) & 0xff));
}

void put_u16le(uint16_t v, std::string *out) {
  out->push_back(char(v & 0xff));
  out->push_back(char((v >> 8) & 0xff));
}

float f32_from_le(const unsigned char *p) {
  uint32_t bits = read_u32le(p);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

}  // namespace

AudioSignal read_wav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  uint16_t audio_format = 0, num_channels = 0, bits_per_sample = 0;
  uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *p = bytes.data() + pos;
    uint32_t chunk_size = read_u32le(p + 4);
    size_t body = pos + 8;
    if (std::memcmp(p, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > bytes.size())
        throw FormatError("truncated fmt chunk: " + path);
      audio_format = read_u16le(bytes.data() + body);
      num_channels = read_u16le(bytes.data() + body + 2);
      sample_rate = read_u32le(bytes.data() + body + 4);
      bits_per_sample = read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(p, "data", 4) == 0) {
      data_off = body;
      data_len = std::min<size_t>(chunk_size, bytes.size() - body);
    }
    // Chunks are word aligned.
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt || data_off == 0)
    throw FormatError("wav file missing fmt or data chunk: " + path);
  if (num_channels == 0 || sample_rate == 0)
    throw FormatError("wav file with zero channels or rate: " + path);

  const bool pcm16 = (audio_format == 1 && bits_per_sample == 16);
  const bool float32 = (audio_format == 3 && bits_per_sample == 32);
  if (!pcm16 && !float32)
    throw CodecError("unsupported wav encoding (format " +
                     std::to_string(audio_format) + ", " +
                     std::to_string(bits_per_sample) + " bit): " + path);

  const size_t bytes_per_sample = bits_per_sample / 8;
  const size_t frame_size = bytes_per_sample * num_channels;
  const size_t frames = data_len / frame_size;

  AudioSignal sig;
  sig.sample_rate_hz = int(sample_rate);
  sig.samples.resize(frames);
  const unsigned char *d = bytes.data() + data_off;
  for (size_t i = 0; i < frames; i++) {
    const unsigned char *s = d + i * frame_size;  // channel 0
    if (pcm16) {
      int16_t v = int16_t(read_u16le(s));
      sig.samples[i] = double(v) / 32768.0;
    } else {
      double v = f32_from_le(s);
      sig.samples[i] = std::clamp(v, -1.0, 1.0);
    }
  }
  return sig;
}

size_t write_wav(const AudioSignal &signal, const std::string &path) {
  const uint32_t rate = uint32_t(signal.sample_rate_hz);
  const uint32_t data_size = uint32_t(signal.samples.size() * 2);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32le(36 + data_size, &out);
  out += "WAVE";
  out += "fmt ";
  put_u32le(16, &out);
  put_u16le(1, &out);  // PCM
  put_u16le(1, &out);  // mono
  put_u32le(rate, &out);
  put_u32le(rate * 2, &out);
  put_u16le(2, &out);
  put_u16le(16, &out);
  out += "data";
  put_u32le(data_size, &out);

  size_t clipped = 0;
  for (double x : signal.samples) {
    long q = std::lround(x * 32768.0);
    if (q > 32767) {
      q = 32767;
      if (x > 1.0) clipped++;
    } else if (q < -32768) {
      q = -32768;
      if (x < -1.0) clipped++;
    }
    put_u16le(uint16_t(int16_t(q)), &out);
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open wav file for writing: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw DataError("short write to wav file: " + path);

  if (clipped > 0)
    std::fprintf(stderr, "asrtk: warning: %zu sample(s) clipped writing %s\n",
                 clipped, path.c_str());
  return clipped;
}

double signal_power(const AudioSignal &signal) {
  if (signal.empty()) throw DomainError("signal_power: empty signal");
  double acc = 0.0;
  for (double x : signal.samples) acc += x * x;
  return acc / double(signal.samples.size());
}

AudioSignal resample_by_ratio(const AudioSignal &signal, double ratio,
                              int new_rate_hz) {
  if (signal.empty()) throw DomainError("resample: empty signal");
  if (ratio <= 0.0) throw DomainError("resample: nonpositive ratio");

  const size_t in_len = signal.samples.size();
  const size_t out_len = size_t(std::llround(double(in_len) * ratio));

  AudioSignal out;
  out.sample_rate_hz = new_rate_hz;
  out.samples.resize(out_len);

  // Windowed sinc, 32 zero crossings each side. When decimating the kernel
  // is stretched by 1/ratio so the cutoff tracks the output Nyquist.
  const double cutoff = std::min(1.0, ratio);
  const double half_width = 32.0 / cutoff;

  for (size_t m = 0; m < out_len; m++) {
    const double center = double(m) / ratio;
    const long k_lo = std::max(0L, long(std::ceil(center - half_width)));
    const long k_hi =
        std::min(long(in_len) - 1, long(std::floor(center + half_width)));
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; k++) {
      const double t = double(k) - center;
      double w;
      if (t == 0.0) {
        w = cutoff;
      } else {
        w = std::sin(M_PI * cutoff * t) / (M_PI * t);
      }
      // Hann window over the kernel span.
      const double u = t / half_width;
      w *= 0.5 * (1.0 + std::cos(M_PI * u));
      acc += signal.samples[size_t(k)] * w;
    }
    out.samples[m] = acc;
  }
  return out;
}

AudioSignal resample(const AudioSignal &signal, int target_rate_hz) {
  if (target_rate_hz <= 0) throw DomainError("resample: nonpositive rate");
  if (signal.sample_rate_hz == target_rate_hz) return signal;
  const double ratio =
      double(target_rate_hz) / double(signal.sample_rate_hz);
  return resample_by_ratio(signal, ratio, target_rate_hz);
}

}  // namespace asrtk
