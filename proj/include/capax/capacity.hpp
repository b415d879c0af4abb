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

#ifndef CAPAX_CAPACITY_HPP_
#define CAPAX_CAPACITY_HPP_

// Capacity of a completely positive map T : C^{n x n} -> C^{m x m},
//
//   cap(T) = inf_{X > 0} det(T(X))^{1/m} / det(X)^{1/n},
//
// and its restriction cap0 to positive diagonal X, computed by three routes
// that are checked against each other:
//   * PsiUnitary  - cap0(T_U) through the exponential-sum reduction, minimized
//                   over unitaries U by derivative-free search;
//   * DirectPD    - quasi-Newton on X = exp(H), tr H = 0;
//   * Scaling     - alternating row/column normalization (n = m only).

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capax/cpop.hpp"
#include "capax/expsum.hpp"

namespace capax {

enum class CapMethod { PsiDiagonal, PsiUnitary, DirectPD, Scaling };
std::string_view to_string(CapMethod method);

struct CapacityWitness {
  std::optional<CMatrix> unitary;
  std::optional<CMatrix> x;  // positive definite input attaining the value
};

struct CapacityReport {
  double value = 0.0;
  CapMethod method = CapMethod::DirectPD;
  CapacityWitness witness;
  double residual = 0.0;
  int iterations = 0;
  // Degenerate: capacity 0. NotAttained: infimum only approached at
  // infinity. RadiusReached, NoConvergence, MaxIterations: value is an
  // upper bound from an unfinished run.
  std::vector<std::string> flags;
  // cap facade only: method name -> (other - DirectPD) / DirectPD
  std::map<std::string, double> cross_checks;

  bool has_flag(std::string_view f) const;
};

struct CapacityOptions {
  double tol = 1e-10;
  int unitary_restarts = 8;
  int direct_restarts = 4;
  std::uint64_t seed = 0;
  double degenerate_floor = -40.0;  // DirectPD objective floor for cap = 0
  double radius = 60.0;             // ||H||_F ceiling for DirectPD
  int max_iterations = 2000;
  int max_steps = 500;              // scaling
  double residual_tol = 1e-12;      // scaling
  bool cross_psi = false;
  bool cross_scaling = false;
};

// det(T(X))^{1/m} / det(X)^{1/n}; 0 when det T(X) vanishes.
double capacity_ratio(const CPOperator& t, const CMatrix& x);

CapacityReport cap0(const CPOperator& t, const CapacityOptions& opts = {});
CapacityReport cap_unitary_search(const CPOperator& t, const CapacityOptions& opts = {});
CapacityReport cap_direct_pd(const CPOperator& t, const CapacityOptions& opts = {});

enum class ScalingSide { Row, Col };

struct ScalingState {
  CPOperator current;
  double log_correction = 0.0;  // cap(original) = exp(log_correction) cap(current)
  int step = 0;
  double row_residual = 0.0;    // ||T(I) - I||_F
  double col_residual = 0.0;    // ||T*(I) - (m/n) I||_F

  explicit ScalingState(CPOperator t);
};

// Row: A <- Q^{-1/2} A with Q = T(I). Col: A <- A P^{-1/2} with P = T*(I).
// Throws SingularMarginal when the marginal is not positive definite.
ScalingState scaling_step(const ScalingState& s, ScalingSide side);

// Requires n = m (NotSupported otherwise). The doubly stochastic limit is
// taken to have capacity 1.
CapacityReport cap_via_scaling(const CPOperator& t, const CapacityOptions& opts = {});

// DirectPD, with optional PsiUnitary / Scaling cross-checks.
CapacityReport cap(const CPOperator& t, const CapacityOptions& opts = {});

std::string to_json(const CapacityReport& r);

namespace detail {
// Orthonormal traceless Hermitian basis used by DirectPD.
std::vector<CMatrix> traceless_basis(std::size_t n);
// (1/m) log det T(exp H), H = sum_a theta_a basis_a, and its gradient.
// Throws SingularEvaluation when T(exp H) is not positive definite.
double direct_objective(const CPOperator& t, std::span<const double> theta,
                        std::vector<double>* grad);
}  // namespace detail

}  // namespace capax

#endif  // CAPAX_CAPACITY_HPP_
