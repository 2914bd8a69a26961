// src/fft.cc
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

#include "asrtk/fft.h"

#include <cmath>

#include "asrtk/error.h"

namespace asrtk {

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>> *data, bool inverse) {
  auto &a = *data;
  const size_t n = a.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0)
    throw DomainError("fft size must be a power of two, got " +
                      std::to_string(n));

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; i++) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / double(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; k++) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv_n = 1.0 / double(n);
    for (auto &c : a) c *= inv_n;
  }
}

std::vector<double> fft_convolve(const std::vector<double> &x,
                                 const std::vector<double> &h) {
  if (x.empty() || h.empty())
    throw DomainError("fft_convolve: empty operand");

  const size_t nx = x.size(), nh = h.size();
  const size_t out_len = nx + nh - 1;

  // Block size: FFT of at least 2 * filter length keeps the per-sample cost
  // near O(log M) while the kernel transform is computed once.
  const size_t fft_size = next_pow2(std::max<size_t>(256, 2 * nh));
  const size_t block = fft_size - nh + 1;

  std::vector<std::complex<double>> hf(fft_size, {0.0, 0.0});
  for (size_t i = 0; i < nh; i++) hf[i] = h[i];
  fft_inplace(&hf, false);

  std::vector<double> out(out_len, 0.0);
  std::vector<std::complex<double>> buf(fft_size);
  for (size_t start = 0; start < nx; start += block) {
    const size_t n = std::min(block, nx - start);
    for (size_t i = 0; i < n; i++) buf[i] = x[start + i];
    for (size_t i = n; i < fft_size; i++) buf[i] = {0.0, 0.0};
    fft_inplace(&buf, false);
    for (size_t i = 0; i < fft_size; i++) buf[i] *= hf[i];
    fft_inplace(&buf, true);
    const size_t seg = std::min(fft_size, out_len - start);
    for (size_t i = 0; i < seg; i++) out[start + i] += buf[i].real();
  }
  return out;
}

}  // namespace asrtk
