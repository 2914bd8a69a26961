// tests/test_audio.cc
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
#include <complex>

#include "asrtk/audio.h"
#include "asrtk/error.h"
#include "asrtk/fft.h"
#include "asrtk/rng.h"
#include "test_util.h"

using namespace asrtk;
using asrtk_test::TempDir;

namespace {

// O(n^2) reference DFT.
std::vector<std::complex<double>> dft_oracle(
    const std::vector<std::complex<double>> &x, bool inverse) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t k = 0; k < n; k++) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t j = 0; j < n; j++) {
      const double ang = sign * 2.0 * M_PI * double(k) * double(j) / double(n);
      acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / double(n) : acc;
  }
  return out;
}

// Minimal hand-rolled WAV writer so read_wav is checked against independent
// bytes, not against write_wav.
std::vector<unsigned char> wav_bytes(uint16_t format, uint16_t channels,
                                     uint32_t rate, uint16_t bits,
                                     const std::vector<unsigned char> &data) {
  std::vector<unsigned char> b;
  auto u32 = [&](uint32_t v) {
    for (int i = 0; i < 4; i++) b.push_back((v >> (8 * i)) & 0xff);
  };
  auto u16 = [&](uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back((v >> 8) & 0xff);
  };
  auto tag = [&](const char *t) {
    for (int i = 0; i < 4; i++) b.push_back((unsigned char)t[i]);
  };
  tag("RIFF");
  u32(uint32_t(36 + data.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(uint16_t(channels * bits / 8));
  u16(bits);
  tag("data");
  u32(uint32_t(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

std::vector<unsigned char> pcm16_bytes(const std::vector<int16_t> &samples) {
  std::vector<unsigned char> d;
  for (int16_t s : samples) {
    d.push_back((unsigned char)(uint16_t(s) & 0xff));
    d.push_back((unsigned char)((uint16_t(s) >> 8) & 0xff));
  }
  return d;
}

}  // namespace

TEST_CASE("fft matches the direct DFT") {
  Rng rng(7);
  for (size_t n : {1u, 2u, 8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto &v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto got = x;
    fft_inplace(&got, false);
    auto want = dft_oracle(x, false);
    for (size_t i = 0; i < n; i++) {
      CHECK(std::abs(got[i] - want[i]) < 1e-9);
    }
    fft_inplace(&got, true);
    for (size_t i = 0; i < n; i++) CHECK(std::abs(got[i] - x[i]) < 1e-12);
  }
}

TEST_CASE("fft rejects non-power-of-two sizes") {
  std::vector<std::complex<double>> x(12);
  CHECK_THROWS_AS(fft_inplace(&x, false), DomainError);
}

TEST_CASE("read_wav decodes 16-bit PCM scaling") {
  TempDir dir("wav");
  const auto bytes = wav_bytes(1, 1, 16000, 16, pcm16_bytes({0, 16384, -32768}));
  asrtk_test::write_bytes(dir.file("a.wav"), bytes);
  AudioSignal sig = read_wav(dir.file("a.wav"));
  REQUIRE(sig.size() == 3);
  CHECK(sig.sample_rate_hz == 16000);
  CHECK(sig.samples[0] == doctest::Approx(0.0));
  CHECK(sig.samples[1] == doctest::Approx(0.5));
  CHECK(sig.samples[2] == doctest::Approx(-1.0));
}

TEST_CASE("read_wav takes channel 0 of a stereo file") {
  TempDir dir("wav");
  // Interleaved L/R frames; left channel is the expected sequence.
  const std::vector<int16_t> interleaved = {100, -100, 200, -200, 300, -300};
  asrtk_test::write_bytes(dir.file("st.wav"),
                          wav_bytes(1, 2, 8000, 16, pcm16_bytes(interleaved)));
  AudioSignal sig = read_wav(dir.file("st.wav"));
  REQUIRE(sig.size() == 3);  // frame count, not sample count
  for (size_t i = 0; i < 3; i++)
    CHECK(sig.samples[i] ==
          doctest::Approx(double(interleaved[2 * i]) / 32768.0));
}

TEST_CASE("read_wav decodes float32 and clamps out-of-range values") {
  TempDir dir("wav");
  std::vector<unsigned char> data;
  for (float f : {0.25f, -0.5f, 1.5f}) {
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int i = 0; i < 4; i++) data.push_back((bits >> (8 * i)) & 0xff);
  }
  asrtk_test::write_bytes(dir.file("f.wav"), wav_bytes(3, 1, 16000, 32, data));
  AudioSignal sig = read_wav(dir.file("f.wav"));
  REQUIRE(sig.size() == 3);
  CHECK(sig.samples[0] == doctest::Approx(0.25));
  CHECK(sig.samples[1] == doctest::Approx(-0.5));
  CHECK(sig.samples[2] == doctest::Approx(1.0));
}

TEST_CASE("read_wav error paths") {
  TempDir dir("wav");
  CHECK_THROWS_AS(read_wav(dir.file("missing.wav")), DataError);

  asrtk_test::write_bytes(dir.file("junk.wav"), {'J', 'U', 'N', 'K', 0, 0});
  CHECK_THROWS_AS(read_wav(dir.file("junk.wav")), FormatError);

  // 8-bit PCM is structurally valid but unsupported.
  asrtk_test::write_bytes(dir.file("u8.wav"),
                          wav_bytes(1, 1, 8000, 8, {0x80, 0x80}));
  CHECK_THROWS_AS(read_wav(dir.file("u8.wav")), CodecError);
}

TEST_CASE("write_wav writes a playable header and clips loud samples") {
  TempDir dir("wav");
  AudioSignal one;
  one.sample_rate_hz = 16000;
  one.samples = {0.0};
  CHECK(write_wav(one, dir.file("one.wav")) == 0);
  AudioSignal back = read_wav(dir.file("one.wav"));
  CHECK(back.size() == 1);
  CHECK(back.sample_rate_hz == 16000);

  AudioSignal loud;
  loud.sample_rate_hz = 16000;
  loud.samples = {1.5};
  CHECK(write_wav(loud, dir.file("loud.wav")) == 1);
  AudioSignal clipped = read_wav(dir.file("loud.wav"));
  CHECK(clipped.samples[0] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("wav round trip stays within one quantization step") {
  TempDir dir("wav");
  Rng rng(11);
  for (int trial = 0; trial < 5; trial++) {
    AudioSignal sig;
    sig.sample_rate_hz = 16000;
    sig.samples.resize(997);
    for (auto &v : sig.samples) v = rng.uniform(-1.0, 1.0);
    write_wav(sig, dir.file("rt.wav"));
    AudioSignal back = read_wav(dir.file("rt.wav"));
    REQUIRE(back.size() == sig.size());
    double max_err = 0.0;
    for (size_t i = 0; i < sig.size(); i++)
      max_err = std::max(max_err, std::fabs(back.samples[i] - sig.samples[i]));
    CHECK(max_err <= 1.0 / 32768.0);

    // A second write of the read-back signal is byte-identical.
    write_wav(back, dir.file("rt2.wav"));
    CHECK(asrtk_test::read_file(dir.file("rt.wav")) ==
          asrtk_test::read_file(dir.file("rt2.wav")));
  }
}

TEST_CASE("signal_power basics and scale-quadratic property") {
  AudioSignal zeros;
  zeros.samples.assign(100, 0.0);
  CHECK(signal_power(zeros) == 0.0);

  AudioSignal half;
  half.samples.assign(64, 0.5);
  CHECK(signal_power(half) == doctest::Approx(0.25));

  AudioSignal empty;
  CHECK_THROWS_AS(signal_power(empty), DomainError);

  Rng rng(3);
  AudioSignal sig;
  sig.samples.resize(1000);
  for (auto &v : sig.samples) v = rng.uniform(-1, 1);
  double direct = 0.0;
  for (double v : sig.samples) direct += v * v;
  direct /= double(sig.size());
  CHECK(std::fabs(signal_power(sig) - direct) < 1e-12);

  for (double a : {0.1, 2.0, -3.5}) {
    AudioSignal scaled = sig;
    for (auto &v : scaled.samples) v *= a;
    CHECK(signal_power(scaled) ==
          doctest::Approx(a * a * signal_power(sig)).epsilon(1e-12));
  }
}

TEST_CASE("resample identity and length contract") {
  AudioSignal sig;
  sig.sample_rate_hz = 32000;
  sig.samples.resize(16000);
  Rng rng(5);
  for (auto &v : sig.samples) v = rng.uniform(-1, 1);

  AudioSignal same = resample(sig, 32000);
  CHECK(same.samples == sig.samples);

  AudioSignal down = resample(sig, 16000);
  CHECK(down.size() == 8000);
  CHECK(down.sample_rate_hz == 16000);
}

TEST_CASE("resampled sine keeps its frequency and amplitude") {
  // 1 s of 440 Hz at 48 kHz, fading in/out to keep edges quiet.
  AudioSignal sine;
  sine.sample_rate_hz = 48000;
  sine.samples.resize(48000);
  for (size_t i = 0; i < sine.size(); i++) {
    const double t = double(i) / 48000.0;
    const double env = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) /
                                            double(sine.size() - 1));
    sine.samples[i] = env * std::sin(2.0 * M_PI * 440.0 * t);
  }
  AudioSignal out = resample(sine, 16000);
  REQUIRE(out.size() == 16000);

  // FFT oracle on the resampled output.
  const size_t fft_size = 16384;
  std::vector<std::complex<double>> spec(fft_size, {0.0, 0.0});
  for (size_t i = 0; i < std::min(out.size(), fft_size); i++)
    spec[i] = out.samples[i];
  fft_inplace(&spec, false);
  size_t peak = 1;
  for (size_t k = 1; k < fft_size / 2; k++)
    if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
  const double peak_hz = double(peak) * 16000.0 / double(fft_size);
  CHECK(std::fabs(peak_hz - 440.0) <= 16000.0 / double(fft_size) + 1e-9);

  // Passband amplitude: compare mid-signal RMS against the source envelope.
  double power_out = 0.0, power_ref = 0.0;
  for (size_t i = 4000; i < 12000; i++) {
    power_out += out.samples[i] * out.samples[i];
    const double t = double(i) / 16000.0;
    const double env = 0.5 - 0.5 * std::cos(2.0 * M_PI * (t * 48000.0) /
                                            double(sine.size() - 1));
    const double ref = env * std::sin(2.0 * M_PI * 440.0 * t);
    power_ref += ref * ref;
  }
  CHECK(std::sqrt(power_out / power_ref) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("resample up-down composition is near identity") {
  AudioSignal sig;
  sig.sample_rate_hz = 16000;
  sig.samples.resize(16000);
  for (size_t i = 0; i < sig.size(); i++) {
    const double t = double(i) / 16000.0;
    const double env = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) /
                                            double(sig.size() - 1));
    sig.samples[i] = env * (0.4 * std::sin(2.0 * M_PI * 300.0 * t) +
                            0.3 * std::sin(2.0 * M_PI * 700.0 * t) +
                            0.2 * std::sin(2.0 * M_PI * 1900.0 * t));
  }
  AudioSignal back = resample(resample(sig, 32000), 16000);
  REQUIRE(back.size() == sig.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < sig.size(); i++) {
    const double d = back.samples[i] - sig.samples[i];
    num += d * d;
    den += sig.samples[i] * sig.samples[i];
  }
  CHECK(std::sqrt(num / den) < 1e-3);
}
