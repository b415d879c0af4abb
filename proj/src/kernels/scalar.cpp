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

#include <algorithm>

#include "capax/kernels.hpp"

namespace capax::kernels::scalar {
namespace {

void cmatmul(const cd* a, const cd* b, cd* c, std::size_t m, std::size_t k,
             std::size_t n) {
  std::fill(c, c + m * n, cd(0.0, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    cd* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double ar = a[i * k + p].real();
      const double ai = a[i * k + p].imag();
      const cd* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[j].real();
        const double bi = brow[j].imag();
        crow[j] += cd(ar * br - ai * bi, ar * bi + ai * br);
      }
    }
  }
}

void dot_rows(const double* u, std::size_t rows, std::size_t cols,
              const double* y, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += u[r * cols + c] * y[c];
    out[r] = s;
  }
}

void weighted_row_sum(const double* w, const double* u, std::size_t rows,
                      std::size_t cols, double* out) {
  std::fill(out, out + cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c] += w[r] * u[r * cols + c];
}

void weighted_gram(const double* w, const double* u, std::size_t rows,
                   std::size_t cols, double* h) {
  std::fill(h, h + cols * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* ur = u + r * cols;
    for (std::size_t i = 0; i < cols; ++i) {
      const double wi = w[r] * ur[i];
      for (std::size_t j = 0; j < cols; ++j) h[i * cols + j] += wi * ur[j];
    }
  }
}

}  // namespace

const KernelTable kTable = {cmatmul, dot_rows, weighted_row_sum,
                            weighted_gram};

}  // namespace capax::kernels::scalar
