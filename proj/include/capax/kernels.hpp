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

#ifndef CAPAX_KERNELS_HPP_
#define CAPAX_KERNELS_HPP_

// Dense inner loops shared by linalg and expsum. Each kernel has a scalar
// reference and, on x86-64, an AVX2/FMA variant chosen at startup from
// cpuid. The variants agree to rounding; tests/test_kernels.cpp pins that.
//
// Layout: all matrices row-major and contiguous. Complex values are
// std::complex<double>, i.e. interleaved (re, im) pairs.

#include <complex>
#include <cstddef>
#include <string_view>

namespace capax::kernels {

using cd = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // c[m x n] = a[m x k] * b[k x n]
  void (*cmatmul)(const cd* a, const cd* b, cd* c, std::size_t m,
                  std::size_t k, std::size_t n);
  // out[r] = <u[r, :], y> for r < rows
  void (*dot_rows)(const double* u, std::size_t rows, std::size_t cols,
                   const double* y, double* out);
  // out[:] = sum_r w[r] * u[r, :]
  void (*weighted_row_sum)(const double* w, const double* u, std::size_t rows,
                           std::size_t cols, double* out);
  // h[cols x cols] = sum_r w[r] * u[r, :]^T u[r, :]
  void (*weighted_gram)(const double* w, const double* u, std::size_t rows,
                        std::size_t cols, double* h);
};

const KernelTable& active();
const KernelTable& table(Backend backend);

Backend active_backend();
bool available(Backend backend);
// Throws NotSupported if the CPU lacks the requested instruction set.
void set_backend(Backend backend);

std::string_view to_string(Backend backend);

namespace scalar {
extern const KernelTable kTable;
}
#if defined(CAPAX_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace capax::kernels

#endif  // CAPAX_KERNELS_HPP_
