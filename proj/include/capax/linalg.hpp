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

#ifndef CAPAX_LINALG_HPP_
#define CAPAX_LINALG_HPP_

// Small dense complex matrices. Sizes in this project stay below a few
// dozen rows, so everything is value-semantic and allocation is not a
// concern.

#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace capax {

using cd = std::complex<double>;
using Rng = std::mt19937_64;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols);
  // Throws DimensionMismatch if entries.size() != rows * cols.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const double> diag);
  static CMatrix diagonal(std::span<const cd> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cd& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<cd> entries() { return data_; }
  std::span<const cd> entries() const { return data_; }

  CMatrix adjoint() const;
  cd trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(cd scalar);

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cd> data_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cd scalar, CMatrix a);

// Hilbert-Schmidt pairing Tr(X* Y).
cd hs_inner(const CMatrix& x, const CMatrix& y);

// Hermitian matrix stored as its lower triangle; entry(i, j) for i < j is
// the conjugate of entry(j, i), so symmetry holds by construction. The
// diagonal is kept real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t dim);

  static HermitianMatrix identity(std::size_t dim);
  static HermitianMatrix diagonal(std::span<const double> diag);
  // Hermitian part (M + M*) / 2 of a square matrix.
  static HermitianMatrix from_matrix(const CMatrix& m);

  std::size_t dim() const { return dim_; }
  cd operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, cd value);

  CMatrix to_matrix() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * (i + 1) / 2 + j;
  }
  std::size_t dim_ = 0;
  std::vector<cd> lower_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // columns are eigenvectors
};

// Determinant by partially pivoted LU.
cd det(const CMatrix& m);

// Cyclic complex Jacobi. H = U diag(values) U*.
EigenDecomposition eigh(const HermitianMatrix& h);

// U f(Lambda) U* for H = U Lambda U*.
HermitianMatrix spectral_apply(const HermitianMatrix& h,
                               const std::function<double(double)>& f);

// H^{-1/2}; throws SingularMatrix if the smallest eigenvalue is below eps.
HermitianMatrix psd_inv_sqrt(const HermitianMatrix& h, double eps);

HermitianMatrix expm_hermitian(const HermitianMatrix& h);

// log det of a Hermitian positive definite matrix via Cholesky. Throws
// SingularMatrix when a pivot is not strictly positive.
double log_det_hpd(const CMatrix& h);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R
// diagonal made positive.
CMatrix haar_unitary(std::size_t dim, Rng& rng);

// Largest singular value, by power iteration on M*M.
double max_singular_value(const CMatrix& m, double tol = 1e-10);

// ||U* U - I||_F
double unitarity_defect(const CMatrix& u);

CMatrix random_gaussian(std::size_t rows, std::size_t cols, double scale,
                        Rng& rng);
HermitianMatrix random_hermitian(std::size_t dim, double scale, Rng& rng);

}  // namespace capax

#endif  // CAPAX_LINALG_HPP_
