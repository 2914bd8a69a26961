// include/asrtk/rng.h
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

#ifndef ASRTK_RNG_H_
#define ASRTK_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace asrtk {

// 64-bit FNV-1a. Used for derived seeds and config hashes.
inline uint64_t fnv1a64(const void *data, size_t len,
                        uint64_t h = 0xcbf29ce484222325ull) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (size_t i = 0; i < len; i++) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string &s,
                        uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed for one unit of work, independent of processing order. Corpus
// builders derive one seed per (global seed, key, tag) so that output is a
// pure function of the inputs regardless of thread scheduling.
inline uint64_t derive_seed(uint64_t global_seed, const std::string &key,
                            const std::string &tag) {
  uint64_t h = fnv1a64(key);
  h = fnv1a64(tag, h);
  return splitmix64(global_seed ^ h);
}

// Deterministic random source. The engine is std::mt19937_64 (bit-exact per
// the standard); all value draws are implemented here rather than with
// std::*_distribution, whose outputs are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform index in [0, n). n must be > 0.
  size_t index(size_t n) { return static_cast<size_t>(eng_() % n); }

  // Uniform integer in [lo, hi] inclusive.
  int64_t integer(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(index(static_cast<size_t>(hi - lo + 1)));
  }

  bool bernoulli(double p_true) { return uniform() < p_true; }

  // Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T> *v) {
    for (size_t i = v->size(); i > 1; i--) {
      size_t j = index(i);
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

  // k distinct indices out of [0, n), in draw order. If k >= n, returns a
  // permutation of all n indices.
  std::vector<size_t> sample_without_replacement(size_t n, size_t k);

 private:
  std::mt19937_64 eng_;
};

inline std::vector<size_t> Rng::sample_without_replacement(size_t n,
                                                           size_t k) {
  std::vector<size_t> pool(n);
  for (size_t i = 0; i < n; i++) pool[i] = i;
  if (k > n) k = n;
  std::vector<size_t> out;
  out.reserve(k);
  for (size_t i = 0; i < k; i++) {
    size_t j = i + index(n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace asrtk

#endif  // ASRTK_RNG_H_
