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

#ifndef CAPAX_COEFFS_HPP_
#define CAPAX_COEFFS_HPP_

// Coefficients of the polynomial lambda -> det(T(diag(lambda))). The
// polynomial is homogeneous of degree m in n variables; its monomials are
// indexed by multi-indices j in N^n with |j| = m.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "capax/cpop.hpp"

namespace capax {

using MultiIndex = std::vector<int>;

// All j in N^n with |j| = m, lexicographically ascending.
std::vector<MultiIndex> enumerate_multiindices(std::size_t n, std::size_t m);

// Every k in [n]^m (zero-based entries) with #{i : k_i = l} = j_l.
std::vector<std::vector<int>> pi_fiber(const MultiIndex& j);

// Multi-index of k: j_l = #{i : k_i = l}.
MultiIndex pi(std::span<const int> k, std::size_t n);

struct CoeffVector {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<MultiIndex> index;  // enumerate_multiindices(n, m)
  std::vector<double> values;     // aligned with index

  std::size_t size() const { return values.size(); }
  double max_abs() const;
  // sum_j d_j lambda^j
  double evaluate(std::span<const double> lambda) const;
};

// Position of j inside enumerate_multiindices(n, m).
std::size_t multiindex_rank(const MultiIndex& j);

struct LeibnizOptions {
  std::size_t max_m = 7;
  std::size_t max_n = 6;
};

// d_j = sum_{k in pi^{-1}(j)} sum_{sigma in S_m} sgn(sigma)
//         prod_i L_{(i, sigma(i)), (k_i, k_i)}.
// Throws NonRealCoefficient when a coefficient is materially complex and
// CombinatorialOverflow when the instance exceeds the configured ceiling.
CoeffVector d_leibniz(const OperatorMatrixRep& rep, const LeibnizOptions& opts = {});
CoeffVector d_leibniz(const CPOperator& t, const LeibnizOptions& opts = {});

// d_j = sum over m-subsets I of the columns {A_k e_l} whose l-counts give j
// of |det(columns in I)|^2. Nonnegative by construction.
CoeffVector d_cauchy_binet(const CPOperator& t,
                           std::uint64_t max_subsets = 5'000'000);

struct ProbeGrid {
  std::vector<std::vector<double>> points;  // positive lambda samples
};

// count points with log(lambda_l) uniform on [-log_range, log_range].
ProbeGrid log_spaced_grid(std::size_t n, std::size_t count, std::uint64_t seed,
                          double log_range = 1.0);

struct InterpolationResult {
  CoeffVector coeffs;
  double residual = 0.0;   // ||M d - b|| / ||b||, including imaginary parts
  double condition = 0.0;  // 2-norm condition of the column-scaled system
};

// Least-squares fit of det(L(diag lambda)) on the monomials lambda^j.
// Default grid: 4 |J| log-spaced samples. Throws IllConditionedGrid when the
// condition number exceeds 1e12.
InterpolationResult d_interpolate(const OperatorMatrixRep& rep,
                                  const ProbeGrid& grid);
InterpolationResult d_interpolate(const OperatorMatrixRep& rep,
                                  std::uint64_t seed = 0x5eed);

// ||d(T) - d(T2)||_inf / ||T - T2||; 0 for 0/0 and +inf for x/0.
double lipschitz_ratio(const CPOperator& a, const CPOperator& b);

// Header "j_1,...,j_n,d", one row per multi-index in order.
void write_csv(std::ostream& os, const CoeffVector& d);

}  // namespace capax

#endif  // CAPAX_COEFFS_HPP_
