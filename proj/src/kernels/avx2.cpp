// Copyright 2026 The capax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Compiled with -mavx2 -mfma. Only reached through the dispatch table after
// a cpuid check, so nothing here may be inlined into generic code.

#include <immintrin.h>

#include <algorithm>

#include "capax/kernels.hpp"

namespace capax::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sw = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sw));
}

void cmatmul(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k,
             std::size_t n) {
  std::fill(c, c + m * n, cd(0.0, 0.0));
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = reinterpret_cast<double*>(c + i * n);
    for (std::size_t p = 0; p < k; ++p) {
      const cd av = a[i * k + p];
      const __m256d ar = _mm256_set1_pd(av.real());
      const __m256d ai = _mm256_set1_pd(av.imag());
      const double* brow = reinterpret_cast<const double*>(b + p * n);
      std::size_t j = 0;
      for (; j < n2; j += 2) {
        const __m256d bv = _mm256_loadu_pd(brow + 2 * j);
        const __m256d bs = _mm256_permute_pd(bv, 0b0101);
        // even lanes: ar*br - ai*bi, odd lanes: ar*bi + ai*br
        const __m256d prod = _mm256_fmaddsub_pd(ar, bv, _mm256_mul_pd(ai, bs));
        _mm256_storeu_pd(crow + 2 * j,
                         _mm256_add_pd(_mm256_loadu_pd(crow + 2 * j), prod));
      }
      for (; j < n; ++j) {
        const double br = brow[2 * j];
        const double bi = brow[2 * j + 1];
        crow[2 * j] += av.real() * br - av.imag() * bi;
        crow[2 * j + 1] += av.real() * bi + av.imag() * br;
      }
    }
  }
}

void dot_rows(const double* u, std::size_t rows, std::size_t cols,
              const double* y, double* out) {
  const std::size_t c4 = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* ur = u + r * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c < c4; c += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(ur + c), _mm256_loadu_pd(y + c), acc);
    double s = hsum(acc);
    for (; c < cols; ++c) s += ur[c] * y[c];
    out[r] = s;
  }
}

void weighted_row_sum(const double* w, const double* u, std::size_t rows,
                      std::size_t cols, double* out) {
  std::fill(out, out + cols, 0.0);
  const std::size_t c4 = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* ur = u + r * cols;
    const __m256d wr = _mm256_set1_pd(w[r]);
    std::size_t c = 0;
    for (; c < c4; c += 4)
      _mm256_storeu_pd(out + c, _mm256_fmadd_pd(wr, _mm256_loadu_pd(ur + c),
                                                _mm256_loadu_pd(out + c)));
    for (; c < cols; ++c) out[c] += w[r] * ur[c];
  }
}

void weighted_gram(const double* w, const double* u, std::size_t rows,
                   std::size_t cols, double* h) {
  std::fill(h, h + cols * cols, 0.0);
  const std::size_t c4 = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* ur = u + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      const double wi = w[r] * ur[i];
      const __m256d wv = _mm256_set1_pd(wi);
      double* hrow = h + i * cols;
      std::size_t j = 0;
      for (; j < c4; j += 4)
        _mm256_storeu_pd(hrow + j, _mm256_fmadd_pd(wv, _mm256_loadu_pd(ur + j),
                                                   _mm256_loadu_pd(hrow + j)));
      for (; j < cols; ++j) hrow[j] += wi * ur[j];
    }
  }
}

}  // namespace

const KernelTable kTable = {cmatmul, dot_rows, weighted_row_sum,
                            weighted_gram};

}  // namespace capax::kernels::avx2
