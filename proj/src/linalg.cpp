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

#include "capax/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "capax/error.hpp"
#include "capax/kernels.hpp"

namespace capax {

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cd(0.0, 0.0)) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    raise(ErrorKind::DimensionMismatch,
          "expected " + std::to_string(rows * cols) + " entries, got " +
              std::to_string(data_.size()));
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const cd> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

cd CMatrix::trace() const {
  cd t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cd& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cd& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    raise(ErrorKind::DimensionMismatch, "matrix addition shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    raise(ErrorKind::DimensionMismatch, "matrix subtraction shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cd scalar) {
  for (cd& z : data_) z *= scalar;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cd scalar, CMatrix a) { return a *= scalar; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows())
    raise(ErrorKind::DimensionMismatch,
          "cannot multiply " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " by " + std::to_string(b.rows()) +
              "x" + std::to_string(b.cols()));
  CMatrix c(a.rows(), b.cols());
  kernels::active().cmatmul(a.entries().data(), b.entries().data(),
                            c.entries().data(), a.rows(), a.cols(), b.cols());
  return c;
}

cd hs_inner(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    raise(ErrorKind::DimensionMismatch, "inner product shape mismatch");
  cd s = 0.0;
  auto xe = x.entries();
  auto ye = y.entries();
  for (std::size_t i = 0; i < xe.size(); ++i) s += std::conj(xe[i]) * ye[i];
  return s;
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(std::size_t dim)
    : dim_(dim), lower_(dim * (dim + 1) / 2, cd(0.0, 0.0)) {}

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  HermitianMatrix h(dim);
  for (std::size_t i = 0; i < dim; ++i) h.set(i, i, 1.0);
  return h;
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> diag) {
  HermitianMatrix h(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) h.set(i, i, diag[i]);
  return h;
}

HermitianMatrix HermitianMatrix::from_matrix(const CMatrix& m) {
  if (!m.square())
    raise(ErrorKind::DimensionMismatch, "Hermitian part of a non-square matrix");
  HermitianMatrix h(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      h.set(i, j, 0.5 * (m(i, j) + std::conj(m(j, i))));
  return h;
}

cd HermitianMatrix::operator()(std::size_t i, std::size_t j) const {
  return i >= j ? lower_[index(i, j)] : std::conj(lower_[index(j, i)]);
}

void HermitianMatrix::set(std::size_t i, std::size_t j, cd value) {
  if (i == j) {
    lower_[index(i, i)] = cd(value.real(), 0.0);
  } else if (i > j) {
    lower_[index(i, j)] = value;
  } else {
    lower_[index(j, i)] = std::conj(value);
  }
}

CMatrix HermitianMatrix::to_matrix() const {
  CMatrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

// ---------------------------------------------------------------------------

cd det(const CMatrix& m) {
  if (!m.square()) raise(ErrorKind::DimensionMismatch, "det of non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  CMatrix a = m;
  cd result = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      result = -result;
    }
    const cd pivot = a(k, k);
    result *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const cd f = a(i, k) / pivot;
      if (f == cd(0.0, 0.0)) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return result;
}

EigenDecomposition eigh(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  CMatrix a = h.to_matrix();
  CMatrix v = CMatrix::identity(n);

  double total = 0.0;
  for (const cd& z : a.entries()) total += std::norm(z);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off <= 1e-32 * total || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cd apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cd phase = apq / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // W: first a phase on q so the pivot is real, then a real rotation.
        const cd wpp = c;
        const cd wpq = s;
        const cd wqp = -s * std::conj(phase);
        const cd wqq = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const cd akp = a(k, p);
          const cd akq = a(k, q);
          a(k, p) = akp * wpp + akq * wqp;
          a(k, q) = akp * wpq + akq * wqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cd apk = a(p, k);
          const cd aqk = a(q, k);
          a(p, k) = std::conj(wpp) * apk + std::conj(wqp) * aqk;
          a(q, k) = std::conj(wpq) * apk + std::conj(wqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cd vkp = v(k, p);
          const cd vkq = v(k, q);
          v(k, p) = vkp * wpp + vkq * wqp;
          v(k, q) = vkp * wpq + vkq * wqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

HermitianMatrix spectral_apply(const HermitianMatrix& h,
                               const std::function<double(double)>& f) {
  const EigenDecomposition e = eigh(h);
  const std::size_t n = h.dim();
  HermitianMatrix out(n);
  std::vector<double> fv(n);
  for (std::size_t k = 0; k < n; ++k) fv[k] = f(e.values[k]);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cd s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += e.vectors(i, k) * fv[k] * std::conj(e.vectors(j, k));
      out.set(i, j, s);
    }
  }
  return out;
}

HermitianMatrix psd_inv_sqrt(const HermitianMatrix& h, double eps) {
  const EigenDecomposition e = eigh(h);
  if (e.values.empty() || e.values.front() < eps)
    raise(ErrorKind::SingularMatrix,
          "smallest eigenvalue " +
              std::to_string(e.values.empty() ? 0.0 : e.values.front()) +
              " below " + std::to_string(eps));
  const std::size_t n = h.dim();
  HermitianMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cd s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += e.vectors(i, k) * (1.0 / std::sqrt(e.values[k])) *
             std::conj(e.vectors(j, k));
      out.set(i, j, s);
    }
  }
  return out;
}

HermitianMatrix expm_hermitian(const HermitianMatrix& h) {
  return spectral_apply(h, [](double x) { return std::exp(x); });
}

double log_det_hpd(const CMatrix& h) {
  if (!h.square()) raise(ErrorKind::DimensionMismatch, "log det of non-square matrix");
  const std::size_t n = h.rows();
  CMatrix l(n, n);
  double logdet = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = h(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0) || !std::isfinite(d))
      raise(ErrorKind::SingularMatrix, "Cholesky pivot not positive");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    logdet += 2.0 * std::log(ljj);
    for (std::size_t i = j + 1; i < n; ++i) {
      cd s = 0.5 * (h(i, j) + std::conj(h(j, i)));
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return logdet;
}

CMatrix random_gaussian(std::size_t rows, std::size_t cols, double scale,
                        Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(rows, cols);
  const double s = scale / std::sqrt(2.0);
  for (cd& z : m.entries()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = cd(s * re, s * im);
  }
  return m;
}

HermitianMatrix random_hermitian(std::size_t dim, double scale, Rng& rng) {
  return HermitianMatrix::from_matrix(random_gaussian(dim, dim, scale, rng));
}

CMatrix haar_unitary(std::size_t dim, Rng& rng) {
  CMatrix q = random_gaussian(dim, dim, 1.0, rng);
  // Classical Gram-Schmidt applied twice; R's diagonal comes out real and
  // positive, which is the phase convention that makes Q Haar distributed.
  for (std::size_t c = 0; c < dim; ++c) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        cd r = 0.0;
        for (std::size_t i = 0; i < dim; ++i) r += std::conj(q(i, p)) * q(i, c);
        for (std::size_t i = 0; i < dim; ++i) q(i, c) -= r * q(i, p);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(q(i, c));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < dim; ++i) q(i, c) /= nrm;
  }
  return q;
}

double max_singular_value(const CMatrix& m, double tol) {
  const std::size_t n = m.cols();
  if (n == 0 || m.rows() == 0) return 0.0;
  const CMatrix gram = m.adjoint() * m;
  double scale = 0.0;
  for (const cd& z : gram.entries()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;

  // Deterministic start with no special alignment to coordinate axes.
  std::vector<cd> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = cd(1.0 + 0.61803398875 * static_cast<double>(i % 7),
              0.3 * std::sin(1.0 + static_cast<double>(i)));
  auto normalize = [](std::vector<cd>& x) {
    double s = 0.0;
    for (const cd& z : x) s += std::norm(z);
    s = std::sqrt(s);
    for (cd& z : x) z /= s;
    return s;
  };
  normalize(v);

  std::vector<cd> w(n);
  double lambda = 0.0;
  constexpr int kMaxIter = 200000;
  for (int it = 0; it < kMaxIter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      cd s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += gram(i, j) * v[j];
      w[i] = s;
    }
    cd rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += std::conj(v[i]) * w[i];
    lambda = rq.real();
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res += std::norm(w[i] - lambda * v[i]);
    res = std::sqrt(res);
    if (lambda <= 0.0) {
      // v landed in the null space; only possible for a zero Gram matrix.
      if (normalize(w) == 0.0) return 0.0;
      v = w;
      continue;
    }
    if (res <= tol * lambda) break;
    normalize(w);
    v.swap(w);
  }
  return std::sqrt(std::max(lambda, 0.0));
}

double unitarity_defect(const CMatrix& u) {
  if (!u.square()) return INFINITY;
  return (u.adjoint() * u - CMatrix::identity(u.rows())).frobenius_norm();
}

}  // namespace capax
