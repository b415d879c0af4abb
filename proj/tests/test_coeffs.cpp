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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "capax/coeffs.hpp"
#include "capax/error.hpp"

using namespace capax;

namespace {

bool close(double a, double b, double rel = 1e-9, double abs_floor = 1e-12) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Discrete Fourier inversion on the torus: det T(diag lambda) has degree
// at most m in each variable, so sampling lambda_l = w^{k_l} with
// w = exp(2 pi i / (m + 1)) recovers every coefficient exactly.
std::vector<double> torus_coefficients(const CPOperator& t) {
  const std::size_t n = t.n(), m = t.m();
  const std::size_t q = m + 1;
  const auto index = enumerate_multiindices(n, m);
  std::vector<cd> acc(index.size(), 0.0);
  std::vector<std::size_t> k(n, 0);
  std::size_t total = 1;
  for (std::size_t l = 0; l < n; ++l) total *= q;
  for (std::size_t step = 0; step < total; ++step) {
    std::size_t code = step;
    std::vector<cd> lam(n);
    for (std::size_t l = 0; l < n; ++l) {
      k[l] = code % q;
      code /= q;
      lam[l] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k[l]) / q);
    }
    const cd p = det(apply(t, CMatrix::diagonal(std::span<const cd>(lam))));
    for (std::size_t j = 0; j < index.size(); ++j) {
      double phase = 0.0;
      for (std::size_t l = 0; l < n; ++l) phase += static_cast<double>(k[l] * index[j][l]);
      acc[j] += p * std::polar(1.0, -2.0 * std::numbers::pi * phase / q);
    }
  }
  std::vector<double> out(index.size());
  for (std::size_t j = 0; j < index.size(); ++j) out[j] = acc[j].real() / static_cast<double>(total);
  return out;
}

}  // namespace

TEST_CASE("multi-index enumeration") {
  const auto j22 = enumerate_multiindices(2, 2);
  REQUIRE(j22.size() == 3);
  CHECK(j22[0] == MultiIndex{0, 2});
  CHECK(j22[1] == MultiIndex{1, 1});
  CHECK(j22[2] == MultiIndex{2, 0});
  CHECK(enumerate_multiindices(1, 5) == std::vector<MultiIndex>{{5}});
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m) {
      const auto js = enumerate_multiindices(n, m);
      CHECK(js.size() == static_cast<std::size_t>(binomial(n + m - 1, m)));
      CHECK(std::is_sorted(js.begin(), js.end()));
      CHECK(std::adjacent_find(js.begin(), js.end()) == js.end());
      for (std::size_t r = 0; r < js.size(); ++r) {
        CHECK(std::accumulate(js[r].begin(), js[r].end(), 0) == m);
        CHECK(multiindex_rank(js[r]) == r);
      }
    }
}

TEST_CASE("fibers of pi") {
  auto f11 = pi_fiber({1, 1});
  std::sort(f11.begin(), f11.end());
  CHECK(f11 == std::vector<std::vector<int>>{{0, 1}, {1, 0}});
  CHECK(pi_fiber({2, 0}) == std::vector<std::vector<int>>{{0, 0}});
  for (int n = 1; n <= 4; ++n)
    for (int m = 1; m <= 4; ++m) {
      std::set<std::vector<int>> seen;
      std::size_t total = 0;
      for (const auto& j : enumerate_multiindices(n, m)) {
        const auto fib = pi_fiber(j);
        double expect = std::tgamma(m + 1.0);
        for (int c : j) expect /= std::tgamma(c + 1.0);
        CHECK(fib.size() == static_cast<std::size_t>(std::lround(expect)));
        for (const auto& k : fib) {
          CHECK(pi(k, n) == j);
          seen.insert(k);
        }
        total += fib.size();
      }
      CHECK(total == static_cast<std::size_t>(std::lround(std::pow(n, m))));
      CHECK(seen.size() == total);
    }
}

TEST_CASE("closed-form coefficient vectors") {
  const CoeffVector id = d_leibniz(CPOperator::identity(2));
  CHECK(id.values == std::vector<double>{0.0, 1.0, 0.0});
  const CoeffVector tr = d_leibniz(CPOperator::trace_channel(2, 2));
  CHECK(close(tr.values[0], 1.0));
  CHECK(close(tr.values[1], 2.0));
  CHECK(close(tr.values[2], 1.0));
  const CoeffVector cb = d_cauchy_binet(CPOperator::identity(3));
  CHECK(cb.values == d_leibniz(CPOperator::identity(3)).values);

  const auto interp = d_interpolate(CPOperator::trace_channel(2, 2).matrix_rep());
  CHECK(std::abs(interp.coeffs.values[0] - 1.0) <= 1e-10);
  CHECK(std::abs(interp.coeffs.values[1] - 2.0) <= 1e-10);
  CHECK(std::abs(interp.coeffs.values[2] - 1.0) <= 1e-10);
  const auto interp_id = d_interpolate(CPOperator::identity(3).matrix_rep());
  for (std::size_t j = 0; j < interp_id.coeffs.size(); ++j) {
    const bool one = interp_id.coeffs.index[j] == MultiIndex{1, 1, 1};
    CHECK(std::abs(interp_id.coeffs.values[j] - (one ? 1.0 : 0.0)) <= 1e-10);
  }
}

TEST_CASE("three methods and the torus oracle agree") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 4, m = 1 + (trial / 4) % 4, k = 1 + trial % 4;
    const CPOperator t = random_cp(n, m, k, 1.0, rng);
    const std::vector<double> oracle = torus_coefficients(t);
    const CoeffVector a = d_leibniz(t);
    const CoeffVector b = d_cauchy_binet(t);
    const InterpolationResult c = d_interpolate(t.matrix_rep(), static_cast<std::uint64_t>(trial));
    const double scale = *std::max_element(oracle.begin(), oracle.end());
    // The relative residual is meaningless when det T vanishes identically.
    if (scale > 1e-12) CHECK(c.residual <= 1e-8);
    for (std::size_t j = 0; j < oracle.size(); ++j) {
      CHECK(close(a.values[j], oracle[j], 1e-9, 1e-12 * std::max(1.0, scale)));
      CHECK(close(a.values[j], b.values[j]));
      CHECK(close(a.values[j], c.coeffs.values[j]));
      CHECK(b.values[j] >= 0.0);
      CHECK(a.values[j] >= -1e-10);
    }
  }
}

TEST_CASE("coefficients evaluate the determinant polynomial") {
  Rng rng(22);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 4, m = 1 + (trial / 3) % 4;
    const CPOperator t = random_cp(n, m, 3, 1.0, rng);
    const CoeffVector d = d_leibniz(t);
    for (int s = 0; s < 5; ++s) {
      std::vector<double> lam(n);
      for (double& l : lam) l = pos(rng);
      const double direct = det(apply(t, CMatrix::diagonal(std::span<const double>(lam)))).real();
      CHECK(close(d.evaluate(lam), direct));
    }
    const std::vector<double> ones(n, 1.0);
    const double sum = std::accumulate(d.values.begin(), d.values.end(), 0.0);
    CHECK(close(sum, det(apply(t, CMatrix::identity(n))).real()));
  }
}

TEST_CASE("permuting inputs permutes coefficients") {
  Rng rng(23);
  const std::size_t n = 3, m = 3;
  const CPOperator t = random_cp(n, m, 2, 1.0, rng);
  const std::vector<std::size_t> perm{2, 0, 1};  // P e_k = e_{perm[k]}
  CMatrix p(n, n);
  for (std::size_t k = 0; k < n; ++k) p(perm[k], k) = 1.0;
  const CoeffVector d = d_leibniz(t);
  const CoeffVector dp = d_leibniz(conjugate_unitary(t, p));
  for (std::size_t r = 0; r < d.size(); ++r) {
    MultiIndex moved(n);
    for (std::size_t k = 0; k < n; ++k) moved[perm[k]] = d.index[r][k];
    CHECK(std::abs(dp.values[r] - d.values[multiindex_rank(moved)]) <= 1e-10);
  }
}

TEST_CASE("non-hermitian-preserving maps are rejected") {
  Rng rng(24);
  OperatorMatrixRep rep{2, 2, random_gaussian(4, 4, 1.0, rng)};
  try {
    d_leibniz(rep);
    FAIL("expected NonRealCoefficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonRealCoefficient);
  }
}

TEST_CASE("size gates") {
  LeibnizOptions small;
  small.max_m = 2;
  CHECK_THROWS_AS(d_leibniz(CPOperator::identity(3), small), Error);
  try {
    d_cauchy_binet(random_cp(4, 4, 4, 1.0, 1), 10);
    FAIL("expected CombinatorialOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CombinatorialOverflow);
  }
}

TEST_CASE("degenerate probe grids are refused") {
  ProbeGrid grid;
  for (int i = 0; i < 10; ++i) grid.points.push_back({1.0, 1.0});
  try {
    d_interpolate(CPOperator::trace_channel(2, 2).matrix_rep(), grid);
    FAIL("expected IllConditionedGrid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IllConditionedGrid);
  }
}

TEST_CASE("lipschitz ratio") {
  const CPOperator id = CPOperator::identity(2);
  CHECK(lipschitz_ratio(id, id) == 0.0);
  for (double c : {0.5, 1.5, 3.0}) {
    // d(c id) is c^2 at (1,1): numerator |c^2 - 1|, denominator |c - 1|.
    CHECK(lipschitz_ratio(id, scale(id, c)) == doctest::Approx(c + 1.0).epsilon(1e-9));
  }
  Rng rng(25);
  const CPOperator t = random_cp(2, 3, 2, 1.0, rng);
  std::vector<CMatrix> dir;
  for (std::size_t k = 0; k < 2; ++k) dir.push_back(random_gaussian(3, 2, 1.0, rng));
  double first = 0.0, worst = 0.0;
  for (double s : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    std::vector<CMatrix> kraus = t.kraus();
    for (std::size_t k = 0; k < 2; ++k) {
      CMatrix step = dir[k];
      step *= s;
      kraus[k] += step;
    }
    const double r = lipschitz_ratio(t, CPOperator(2, 3, kraus));
    if (first == 0.0) first = r;
    worst = std::max(worst, r);
    CHECK(std::isfinite(r));
  }
  CHECK(worst <= 2.0 * first);
}

TEST_CASE("csv export") {
  std::ostringstream os;
  write_csv(os, d_leibniz(CPOperator::trace_channel(2, 2)));
  CHECK(os.str() == "j_1,j_2,d\n0,2,1\n1,1,2\n2,0,1\n");
}
