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

#include "capax/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "capax/error.hpp"

namespace capax {
namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void enumerate_rec(std::size_t pos, int remaining, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    enumerate_rec(pos + 1, remaining - v, cur, out);
  }
}

// Neumaier-compensated accumulator.
struct Compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

CoeffVector empty_coeffs(std::size_t n, std::size_t m) {
  CoeffVector d;
  d.n = n;
  d.m = m;
  d.index = enumerate_multiindices(n, m);
  d.values.assign(d.index.size(), 0.0);
  return d;
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(std::size_t n, std::size_t m) {
  std::vector<MultiIndex> out;
  if (n == 0) return out;
  out.reserve(binomial(n + m - 1, m));
  MultiIndex cur(n, 0);
  enumerate_rec(0, static_cast<int>(m), cur, out);
  return out;
}

std::size_t multiindex_rank(const MultiIndex& j) {
  const std::size_t n = j.size();
  std::uint64_t rem = 0;
  for (int v : j) rem += static_cast<std::uint64_t>(v);
  std::uint64_t rank = 0;
  for (std::size_t p = 0; p + 1 < n; ++p) {
    const std::uint64_t parts = n - p - 1;
    for (int v = 0; v < j[p]; ++v)
      rank += binomial(rem - static_cast<std::uint64_t>(v) + parts - 1, parts - 1);
    rem -= static_cast<std::uint64_t>(j[p]);
  }
  return static_cast<std::size_t>(rank);
}

MultiIndex pi(std::span<const int> k, std::size_t n) {
  MultiIndex j(n, 0);
  for (int v : k) ++j[static_cast<std::size_t>(v)];
  return j;
}

std::vector<std::vector<int>> pi_fiber(const MultiIndex& j) {
  std::vector<int> k;
  for (std::size_t l = 0; l < j.size(); ++l)
    for (int c = 0; c < j[l]; ++c) k.push_back(static_cast<int>(l));
  // k is sorted, so next_permutation walks each distinct arrangement once.
  std::vector<std::vector<int>> out;
  do {
    out.push_back(k);
  } while (std::next_permutation(k.begin(), k.end()));
  return out;
}

double CoeffVector::max_abs() const {
  double r = 0.0;
  for (double v : values) r = std::max(r, std::abs(v));
  return r;
}

double CoeffVector::evaluate(std::span<const double> lambda) const {
  if (lambda.size() != n)
    raise(ErrorKind::DimensionMismatch, "lambda must have n entries");
  Compensated acc;
  for (std::size_t r = 0; r < values.size(); ++r) {
    double mono = 1.0;
    for (std::size_t l = 0; l < n; ++l) mono *= std::pow(lambda[l], index[r][l]);
    acc.add(values[r] * mono);
  }
  return acc.value();
}

// ---------------------------------------------------------------------------

CoeffVector d_leibniz(const OperatorMatrixRep& rep, const LeibnizOptions& opts) {
  const std::size_t n = rep.n;
  const std::size_t m = rep.m;
  if (m > opts.max_m || n > opts.max_n)
    raise(ErrorKind::CombinatorialOverflow,
          "Leibniz expansion gated at m <= " + std::to_string(opts.max_m) +
              ", n <= " + std::to_string(opts.max_n));
  CoeffVector d = empty_coeffs(n, m);

  // w[(i * m + c) * n + l] = L_{(i,c),(l,l)}
  std::vector<cd> w(m * m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t l = 0; l < n; ++l)
        w[(i * m + c) * n + l] = rep.mat(i * m + c, l * n + l);

  // Rank of pi(k) for every k, addressed by the base-n digits of k.
  std::size_t tuples = 1;
  for (std::size_t i = 0; i < m; ++i) tuples *= n;
  std::vector<std::uint32_t> fiber(tuples);
  {
    std::vector<int> k(m, 0);
    for (std::size_t code = 0; code < tuples; ++code) {
      std::size_t c = code;
      for (std::size_t i = m; i-- > 0;) {
        k[i] = static_cast<int>(c % n);
        c /= n;
      }
      fiber[code] = static_cast<std::uint32_t>(multiindex_rank(pi(k, n)));
    }
  }

  std::vector<Compensated> re(d.size()), im(d.size());
  std::vector<double> gross(d.size(), 0.0);

  std::vector<std::size_t> sigma(m);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::vector<cd> prefix(m + 1);
  std::vector<std::size_t> digit(m, 0);
  do {
    int inversions = 0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        if (sigma[a] > sigma[b]) ++inversions;
    const double sign = (inversions % 2 == 0) ? 1.0 : -1.0;

    // Depth-first odometer over k in [n]^m with running prefix products;
    // a zero prefix prunes its whole subtree.
    prefix[0] = sign;
    std::size_t depth = 0;
    std::size_t code = 0;
    digit.assign(m, 0);
    while (true) {
      if (depth == m) {
        const cd p = prefix[m];
        const std::uint32_t r = fiber[code];
        re[r].add(p.real());
        im[r].add(p.imag());
        gross[r] += std::abs(p);
      } else {
        const cd f = w[(depth * m + sigma[depth]) * n + digit[depth]];
        const cd p = prefix[depth] * f;
        if (p != cd(0.0, 0.0)) {
          prefix[depth + 1] = p;
          code = code * n + digit[depth];
          ++depth;
          continue;
        }
      }
      // Advance to the next sibling, unwinding finished levels.
      while (true) {
        if (depth == m) {
          --depth;
          code /= n;
        }
        ++digit[depth];
        if (digit[depth] < n) break;
        digit[depth] = 0;
        if (depth == 0) goto next_sigma;
        --depth;
        code /= n;
      }
    }
  next_sigma:;
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  for (std::size_t r = 0; r < d.size(); ++r) {
    const double real = re[r].value();
    const double imag = im[r].value();
    // FIXME: the guard is relative to the gross term magnitude; an exactly
    // cancelling non-Hermitian map could slip through as "real 0".
    if (std::abs(imag) > 1e-10 * std::max(gross[r], std::abs(real)) &&
        std::abs(imag) > 1e-300)
      raise(ErrorKind::NonRealCoefficient,
            "coefficient " + std::to_string(r) + " has imaginary part " +
                std::to_string(imag));
    // Values at the rounding level of the gross sum are cancellation noise.
    d.values[r] = std::abs(real) <= 64.0 * 2.2e-16 * gross[r] ? 0.0 : real;
  }
  return d;
}

CoeffVector d_leibniz(const CPOperator& t, const LeibnizOptions& opts) {
  return d_leibniz(t.matrix_rep(), opts);
}

CoeffVector d_cauchy_binet(const CPOperator& t, std::uint64_t max_subsets) {
  const std::size_t n = t.n();
  const std::size_t m = t.m();
  const std::size_t kc = t.kraus().size();
  const std::size_t total = n * kc;
  const std::uint64_t subsets = binomial(total, m);
  if (subsets > max_subsets)
    raise(ErrorKind::CombinatorialOverflow,
          std::to_string(subsets) + " column subsets exceed the ceiling " +
              std::to_string(max_subsets));
  CoeffVector d = empty_coeffs(n, m);
  if (total < m) return d;

  // Column i = l * K + kappa holds A_kappa e_l and carries lambda_l.
  std::vector<std::vector<cd>> cols(total, std::vector<cd>(m));
  std::vector<int> owner(total);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < kc; ++k) {
      const std::size_t i = l * kc + k;
      owner[i] = static_cast<int>(l);
      for (std::size_t r = 0; r < m; ++r) cols[i][r] = t.kraus()[k](r, l);
    }

  std::vector<std::size_t> pick(m);
  std::iota(pick.begin(), pick.end(), 0);
  CMatrix block(m, m);
  MultiIndex j(n);
  while (true) {
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t r = 0; r < m; ++r) block(r, c) = cols[pick[c]][r];
    std::fill(j.begin(), j.end(), 0);
    for (std::size_t c = 0; c < m; ++c) ++j[static_cast<std::size_t>(owner[pick[c]])];
    d.values[multiindex_rank(j)] += std::norm(det(block));

    std::size_t p = m;
    while (p > 0 && pick[p - 1] == total - m + (p - 1)) --p;
    if (p == 0) break;
    ++pick[p - 1];
    for (std::size_t q = p; q < m; ++q) pick[q] = pick[q - 1] + 1;
  }
  return d;
}

// ---------------------------------------------------------------------------

ProbeGrid log_spaced_grid(std::size_t n, std::size_t count, std::uint64_t seed,
                          double log_range) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-log_range, log_range);
  ProbeGrid g;
  g.points.resize(count, std::vector<double>(n));
  for (auto& p : g.points)
    for (double& x : p) x = std::exp(unif(rng));
  return g;
}

namespace {

// Singular values of a small dense real matrix by one-sided Jacobi.
std::vector<double> singular_values(std::vector<double> a, std::size_t rows,
                                    std::size_t cols) {
  for (int sweep = 0; sweep < 60; ++sweep) {
    double rotated = 0.0;
    for (std::size_t p = 0; p < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          const double x = a[r * cols + p];
          const double y = a[r * cols + q];
          alpha += x * x;
          beta += y * y;
          gamma += x * y;
        }
        if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta))
          continue;
        rotated = std::max(rotated, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double x = a[r * cols + p];
          const double y = a[r * cols + q];
          a[r * cols + p] = c * x - s * y;
          a[r * cols + q] = s * x + c * y;
        }
      }
    }
    if (rotated <= 1e-15) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + c] * a[r * cols + c];
    sv[c] = std::sqrt(s);
  }
  return sv;
}

using xd = std::complex<long double>;

// Extended precision: the fit amplifies sample errors by the grid condition.
xd det_on_diagonal(const OperatorMatrixRep& rep, std::span<const double> lambda) {
  const std::size_t m = rep.m;
  const std::size_t n = rep.n;
  std::vector<xd> x(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      xd s = 0.0L;
      for (std::size_t l = 0; l < n; ++l) {
        const cd e = rep.mat(i * m + j, l * n + l);
        s += static_cast<long double>(lambda[l]) * xd(e.real(), e.imag());
      }
      x[i * m + j] = s;
    }
  xd d = 1.0L;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < m; ++r)
      if (std::abs(x[r * m + k]) > std::abs(x[piv * m + k])) piv = r;
    if (x[piv * m + k] == xd(0.0L)) return 0.0L;
    if (piv != k) {
      for (std::size_t c = 0; c < m; ++c) std::swap(x[k * m + c], x[piv * m + c]);
      d = -d;
    }
    d *= x[k * m + k];
    for (std::size_t r = k + 1; r < m; ++r) {
      const xd f = x[r * m + k] / x[k * m + k];
      for (std::size_t c = k + 1; c < m; ++c) x[r * m + c] -= f * x[k * m + c];
    }
  }
  return d;
}

}  // namespace

InterpolationResult d_interpolate(const OperatorMatrixRep& rep,
                                  const ProbeGrid& grid) {
  const std::size_t n = rep.n;
  InterpolationResult res;
  res.coeffs = empty_coeffs(n, rep.m);
  const std::size_t cols = res.coeffs.size();
  const std::size_t rows = grid.points.size();
  if (rows < cols)
    raise(ErrorKind::IllConditionedGrid,
          "grid has " + std::to_string(rows) + " points for " +
              std::to_string(cols) + " monomials");

  std::vector<long double> a(rows * cols);
  std::vector<long double> b(rows);
  std::vector<long double> b_imag(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& lam = grid.points[r];
    if (lam.size() != n)
      raise(ErrorKind::DimensionMismatch, "grid point dimension differs from n");
    for (std::size_t c = 0; c < cols; ++c) {
      long double mono = 1.0L;
      for (std::size_t l = 0; l < n; ++l)
        mono *= std::pow(static_cast<long double>(lam[l]), res.coeffs.index[c][l]);
      a[r * cols + c] = mono;
    }
    long double row = 0.0L;
    for (std::size_t c = 0; c < cols; ++c) row += a[r * cols + c] * a[r * cols + c];
    const long double w = 1.0L / std::sqrt(row);
    for (std::size_t c = 0; c < cols; ++c) a[r * cols + c] *= w;
    const xd v = det_on_diagonal(rep, lam);
    b[r] = w * v.real();
    b_imag[r] = w * v.imag();
  }

  std::vector<long double> colscale(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    long double s = 0.0L;
    for (std::size_t r = 0; r < rows; ++r) s += a[r * cols + c] * a[r * cols + c];
    colscale[c] = std::sqrt(s);
    for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] /= colscale[c];
  }
  const std::vector<long double> scaled = a;

  {
    const std::vector<double> sv =
        singular_values(std::vector<double>(scaled.begin(), scaled.end()), rows, cols);
    const auto [lo, hi] = std::minmax_element(sv.begin(), sv.end());
    res.condition = *lo > 0.0 ? *hi / *lo : INFINITY;
  }
  if (!(res.condition <= 1e12))
    raise(ErrorKind::IllConditionedGrid,
          "monomial matrix condition " + std::to_string(res.condition));

  // Householder QR applied to [A | b].
  std::vector<long double> rhs = b;
  for (std::size_t k = 0; k < cols; ++k) {
    long double norm = 0.0L;
    for (std::size_t r = k; r < rows; ++r) norm += a[r * cols + k] * a[r * cols + k];
    norm = std::sqrt(norm);
    const long double alpha = a[k * cols + k] > 0 ? -norm : norm;
    std::vector<long double> v(rows - k);
    for (std::size_t r = k; r < rows; ++r) v[r - k] = a[r * cols + k];
    v[0] -= alpha;
    long double vnorm2 = 0.0L;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = k; c < cols; ++c) {
      long double s = 0.0L;
      for (std::size_t r = k; r < rows; ++r) s += v[r - k] * a[r * cols + c];
      s = 2.0 * s / vnorm2;
      for (std::size_t r = k; r < rows; ++r) a[r * cols + c] -= s * v[r - k];
    }
    long double s = 0.0L;
    for (std::size_t r = k; r < rows; ++r) s += v[r - k] * rhs[r];
    s = 2.0 * s / vnorm2;
    for (std::size_t r = k; r < rows; ++r) rhs[r] -= s * v[r - k];
  }
  std::vector<long double> x(cols);
  for (std::size_t k = cols; k-- > 0;) {
    long double s = rhs[k];
    for (std::size_t c = k + 1; c < cols; ++c) s -= a[k * cols + c] * x[c];
    x[k] = s / a[k * cols + k];
  }

  long double rnorm = 0.0L, bnorm = 0.0L;
  for (std::size_t r = 0; r < rows; ++r) {
    long double fit = 0.0L;
    for (std::size_t c = 0; c < cols; ++c) fit += scaled[r * cols + c] * x[c];
    rnorm += (fit - b[r]) * (fit - b[r]) + b_imag[r] * b_imag[r];
    bnorm += b[r] * b[r] + b_imag[r] * b_imag[r];
  }
  res.residual = static_cast<double>(bnorm > 0.0L ? std::sqrt(rnorm / bnorm) : std::sqrt(rnorm));
  for (std::size_t c = 0; c < cols; ++c) res.coeffs.values[c] = static_cast<double>(x[c] / colscale[c]);
  return res;
}

InterpolationResult d_interpolate(const OperatorMatrixRep& rep, std::uint64_t seed) {
  const std::size_t count = 4 * static_cast<std::size_t>(binomial(rep.n + rep.m - 1, rep.m));
  return d_interpolate(rep, log_spaced_grid(rep.n, count, seed));
}

double lipschitz_ratio(const CPOperator& a, const CPOperator& b) {
  const CoeffVector da = d_leibniz(a);
  const CoeffVector db = d_leibniz(b);
  double num = 0.0;
  for (std::size_t r = 0; r < da.size(); ++r)
    num = std::max(num, std::abs(da.values[r] - db.values[r]));
  const double den = distance(a, b);
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return num / den;
}

void write_csv(std::ostream& os, const CoeffVector& d) {
  for (std::size_t l = 0; l < d.n; ++l) os << "j_" << (l + 1) << ',';
  os << "d\n";
  char buf[32];
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (int v : d.index[r]) os << v << ',';
    std::snprintf(buf, sizeof buf, "%.17g", d.values[r]);
    os << buf << '\n';
  }
}

}  // namespace capax
