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

#ifndef CAPAX_CPOP_HPP_
#define CAPAX_CPOP_HPP_

// Completely positive maps X -> sum_k A_k X A_k^* held in Kraus form.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capax/linalg.hpp"

namespace capax {

// Matrix-unit coordinates of a linear map C^{n x n} -> C^{m x m}: the map
// sends E_{(k,l)} to sum over (i,j) of coeff * E_{(i,j)}. Zero-based.
struct BasisIndex {
  std::size_t out_row;  // i
  std::size_t out_col;  // j
  std::size_t in_row;   // k
  std::size_t in_col;   // l
};

// m^2 x n^2 matrix with mat * vec(X) = vec(T(X)), vec in row-major order:
// vec(X)[k * n + l] = X(k, l).
struct OperatorMatrixRep {
  std::size_t n = 0;
  std::size_t m = 0;
  CMatrix mat;

  cd at(const BasisIndex& idx) const {
    return mat(idx.out_row * m + idx.out_col, idx.in_row * n + idx.in_col);
  }
};

class CPOperator {
 public:
  // Throws DimensionMismatch unless every Kraus matrix is m x n and the
  // list is nonempty, ParseError on non-finite entries.
  CPOperator(std::size_t n, std::size_t m, std::vector<CMatrix> kraus);

  static CPOperator identity(std::size_t n);
  // X -> tr(X) I_m, with Kraus family {e_i e_l^T}.
  static CPOperator trace_channel(std::size_t n, std::size_t m);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }

  // Built on first use and shared between copies.
  const OperatorMatrixRep& matrix_rep() const;

 private:
  struct Cache;
  std::size_t n_;
  std::size_t m_;
  std::vector<CMatrix> kraus_;
  std::shared_ptr<Cache> cache_;
};

CMatrix apply(const CPOperator& t, const CMatrix& x);
// Adjoint under the Hilbert-Schmidt pairing: Y -> sum_k A_k^* Y A_k.
CMatrix dual_apply(const CPOperator& t, const CMatrix& y);

// (T(E_{in}))_{out}; throws IndexOutOfRange.
cd coeff(const CPOperator& t, const BasisIndex& idx);

// X -> T(U X U^*), Kraus family {A_k U}. Throws NotUnitary.
CPOperator conjugate_unitary(const CPOperator& t, const CMatrix& u);

// Kraus matrices multiplied by sqrt(c), so the map is multiplied by c >= 0.
CPOperator scale(const CPOperator& t, double c);

// Operator norm induced by the Hilbert-Schmidt norms.
double op_norm(const CPOperator& t);
double op_norm(const OperatorMatrixRep& rep);
double distance(const CPOperator& a, const CPOperator& b);

CPOperator random_cp(std::size_t n, std::size_t m, std::size_t kraus_count,
                     double scale, std::uint64_t seed);
CPOperator random_cp(std::size_t n, std::size_t m, std::size_t kraus_count,
                     double scale, Rng& rng);

// Operators above n, m <= 6 or K <= 8 are accepted but slow to analyse.
std::optional<std::string> size_warning(const CPOperator& t);

std::string to_json(const CPOperator& t);
CPOperator from_json(std::string_view text);

}  // namespace capax

#endif  // CAPAX_CPOP_HPP_
