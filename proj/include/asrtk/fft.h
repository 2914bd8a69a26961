// include/asrtk/fft.h
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

#ifndef ASRTK_FFT_H_
#define ASRTK_FFT_H_

#include <complex>
#include <cstddef>
#include <vector>

namespace asrtk {

// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>> *data, bool inverse);

size_t next_pow2(size_t n);

// Linear convolution computed block-wise with FFT overlap-add. Output length
// is x.size() + h.size() - 1.
std::vector<double> fft_convolve(const std::vector<double> &x,
                                 const std::vector<double> &h);

}  // namespace asrtk

#endif  // ASRTK_FFT_H_
