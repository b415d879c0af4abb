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

#include <cmath>
#include <functional>

#include <json.hpp>

#include "capax/capacity.hpp"
#include "capax/error.hpp"
#include "oracles.hpp"

using namespace capax;

namespace {

CPOperator single(const CMatrix& a) { return CPOperator(a.cols(), a.rows(), {a}); }

CMatrix diag2(double a, double b) {
  const std::vector<double> d{a, b};
  return CMatrix::diagonal(std::span<const double>(d));
}

bool rel_close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("capacity ratio") {
  const CPOperator t = single(diag2(1.0, 2.0));
  CHECK(capacity_ratio(t, CMatrix::identity(2)) == doctest::Approx(2.0));
  CHECK(capacity_ratio(t, diag2(3.0, 0.5)) == doctest::Approx(2.0));
  CMatrix e11(2, 2);
  e11(0, 0) = 1.0;
  CHECK(capacity_ratio(single(e11), CMatrix::identity(2)) == 0.0);
}

TEST_CASE("diagonal capacity closed forms") {
  const CapacityReport id = cap0(CPOperator::identity(3));
  CHECK(id.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.method == CapMethod::PsiDiagonal);
  const CapacityReport tr = cap0(CPOperator::trace_channel(2, 2));
  CHECK(tr.value == doctest::Approx(2.0).epsilon(1e-10));
  REQUIRE(tr.witness.x.has_value());
  CHECK(capacity_ratio(CPOperator::trace_channel(2, 2), *tr.witness.x) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cap0(single(diag2(1.0, 2.0))).value == doctest::Approx(2.0).epsilon(1e-10));

  CMatrix e11(2, 2);
  e11(0, 0) = 1.0;
  const CapacityReport deg = cap0(single(e11));
  CHECK(deg.value == 0.0);
  CHECK(deg.has_flag("Degenerate"));
}

TEST_CASE("diagonal capacity matches the brute-force diagonal minimum") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 2, m = 2 + (trial / 2) % 2;
    const CPOperator t = random_cp(n, m, 3, 1.0, rng);
    CHECK(rel_close(cap0(t).value, oracle::diagonal_capacity_bruteforce(t), 1e-6));
  }
}

TEST_CASE("direct minimization closed forms") {
  const CapacityReport id = cap_direct_pd(CPOperator::identity(3));
  CHECK(id.value == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(id.witness.x.has_value());
  // Every positive definite X minimizes for the identity, so only check det X = 1.
  CHECK(std::abs(det(*id.witness.x) - 1.0) < 1e-8);

  CHECK(cap_direct_pd(single(diag2(1.0, 2.0))).value == doctest::Approx(2.0).epsilon(1e-9));

  CMatrix e11(2, 2);
  e11(0, 0) = 1.0;
  const CapacityReport deg = cap_direct_pd(single(e11));
  CHECK(deg.value == 0.0);
  CHECK(deg.has_flag("Degenerate"));
}

TEST_CASE("direct objective gradient matches finite differences") {
  Rng rng(32);
  std::normal_distribution<double> g(0.0, 0.4);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const CPOperator t = random_cp(n, 1 + trial % 4, 3, 1.0, rng);
    std::vector<double> theta(n * n - 1);
    for (double& v : theta) v = g(rng);
    std::vector<double> grad;
    detail::direct_objective(t, theta, &grad);
    for (std::size_t a = 0; a < theta.size(); ++a) {
      const double h = 1e-5;
      std::vector<double> tp = theta, tm = theta;
      tp[a] += h;
      tm[a] -= h;
      const double fd = (detail::direct_objective(t, tp, nullptr) -
                         detail::direct_objective(t, tm, nullptr)) / (2 * h);
      CHECK(std::abs(grad[a] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  const auto basis = detail::traceless_basis(3);
  REQUIRE(basis.size() == 8);
  for (std::size_t a = 0; a < basis.size(); ++a) {
    CHECK(std::abs(basis[a].trace()) < 1e-15);
    CHECK(basis[a] == basis[a].adjoint());
    for (std::size_t b = 0; b < basis.size(); ++b)
      CHECK(std::abs(hs_inner(basis[a], basis[b]) - (a == b ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("unitary search") {
  const CapacityReport tr = cap_unitary_search(CPOperator::trace_channel(2, 2));
  CHECK(tr.value == doctest::Approx(2.0).epsilon(1e-9));
  CapacityOptions none;
  none.unitary_restarts = 0;
  CHECK(cap_unitary_search(CPOperator::trace_channel(2, 2), none).value ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cap_unitary_search(CPOperator::identity(2)).value == doctest::Approx(1.0).epsilon(1e-10));

  Rng rng(33);
  for (int trial = 0; trial < 4; ++trial) {
    const CPOperator t = random_cp(2 + trial % 2, 2 + trial % 2, 3, 1.0, rng);
    const CapacityReport u = cap_unitary_search(t);
    const double direct = cap_direct_pd(t).value;
    CHECK(u.value >= direct * (1.0 - 1e-4));
    CHECK(rel_close(u.value, direct, 1e-4));
    REQUIRE(u.witness.unitary.has_value());
    CHECK(unitarity_defect(*u.witness.unitary) < 1e-9);
    CHECK(rel_close(cap0(conjugate_unitary(t, *u.witness.unitary)).value, u.value, 1e-12));
  }
}

TEST_CASE("scaling steps") {
  const ScalingState fixed(CPOperator::identity(3));
  CHECK(fixed.row_residual < 1e-14);
  CHECK(fixed.col_residual < 1e-14);
  const ScalingState once = scaling_step(fixed, ScalingSide::Row);
  CHECK(std::abs(once.log_correction) < 1e-12);
  CHECK(distance(once.current, fixed.current) < 1e-10);

  Rng rng(34);
  const CPOperator t = random_cp(3, 3, 4, 1.0, rng);
  const ScalingState row = scaling_step(ScalingState(t), ScalingSide::Row);
  CHECK((apply(row.current, CMatrix::identity(3)) - CMatrix::identity(3)).frobenius_norm() <= 1e-10);
  CHECK(row.row_residual <= 1e-10);
  const ScalingState col = scaling_step(row, ScalingSide::Col);
  CHECK((dual_apply(col.current, CMatrix::identity(3)) - CMatrix::identity(3)).frobenius_norm() <=
        1e-10);
  // cap(original) = exp(log_correction) cap(current).
  const double direct = cap_direct_pd(t).value;
  for (const ScalingState* s : {&row, &col})
    CHECK(rel_close(std::exp(s->log_correction) * cap_direct_pd(s->current).value, direct, 1e-8));

  CMatrix e11(2, 2);
  e11(0, 0) = 1.0;
  CHECK(kind_of([&] { scaling_step(ScalingState(single(e11)), ScalingSide::Row); }) ==
        ErrorKind::SingularMarginal);
}

TEST_CASE("operator scaling") {
  const CapacityReport id = cap_via_scaling(CPOperator::identity(3));
  CHECK(id.value == doctest::Approx(1.0));
  CHECK(id.iterations == 0);
  Rng rng(35);
  const CPOperator u = single(haar_unitary(3, rng));
  CHECK(cap_via_scaling(u).value == doctest::Approx(1.0).epsilon(1e-10));
  for (int trial = 0; trial < 4; ++trial) {
    const CPOperator t = random_cp(3, 3, 4, 1.0, rng);
    const CapacityReport s = cap_via_scaling(t);
    CHECK(!s.has_flag("NoConvergence"));
    CHECK(rel_close(s.value, cap_direct_pd(t).value, 1e-3));
  }
  CHECK(kind_of([] { cap_via_scaling(CPOperator::trace_channel(2, 3)); }) ==
        ErrorKind::NotSupported);
  CMatrix e11(2, 2);
  e11(0, 0) = 1.0;
  const CapacityReport deg = cap_via_scaling(single(e11));
  CHECK(deg.value == 0.0);
  CHECK(deg.has_flag("Degenerate"));
  CapacityOptions few;
  few.max_steps = 1;
  CHECK(cap_via_scaling(random_cp(3, 3, 2, 1.0, rng), few).has_flag("NoConvergence"));
}

TEST_CASE("capacity properties") {
  Rng rng(36);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 2 + trial % 2, m = 2 + (trial / 2) % 2;
    const CPOperator t = random_cp(n, m, 3, 1.0, rng);
    const CapacityReport r = cap(t);
    CHECK(r.value > 0.0);
    CHECK(r.value <= cap0(t).value * (1.0 + 1e-8));
    REQUIRE(r.witness.x.has_value());
    CHECK(rel_close(capacity_ratio(t, *r.witness.x), r.value, 10 * 1e-10));
    for (double c : {0.5, 2.0, 10.0}) CHECK(rel_close(cap(scale(t, c)).value, c * r.value, 1e-8));
    for (int k = 0; k < 3; ++k) {
      const CMatrix u = haar_unitary(n, rng);
      CHECK(rel_close(cap(conjugate_unitary(t, u)).value, r.value, 1e-6));
    }
  }
}

TEST_CASE("rectangular operators") {
  Rng rng(37);
  const CPOperator t = random_cp(2, 3, 3, 1.0, rng);
  const double direct = cap_direct_pd(t).value;
  CHECK(rel_close(cap_unitary_search(t).value, direct, 1e-4));
  CHECK(direct <= cap0(t).value * (1.0 + 1e-8));
}

TEST_CASE("facade records cross-checks and serializes") {
  Rng rng(38);
  const CPOperator t = random_cp(2, 2, 3, 1.0, rng);
  CapacityOptions o;
  o.cross_psi = true;
  o.cross_scaling = true;
  const CapacityReport r = cap(t, o);
  CHECK(r.method == CapMethod::DirectPD);
  REQUIRE(r.cross_checks.count("PsiUnitary") == 1);
  REQUIRE(r.cross_checks.count("Scaling") == 1);
  CHECK(std::abs(r.cross_checks.at("PsiUnitary")) <= 1e-4);
  CHECK(std::abs(r.cross_checks.at("Scaling")) <= 1e-3);
  const nlohmann::json j = nlohmann::json::parse(to_json(r));
  CHECK(j["method"] == "DirectPD");
  CHECK(j["value"].get<double>() == r.value);
  CHECK(j["flags"].is_array());
  CHECK(j["witness"]["x"].size() == 2);
  CHECK(j.contains("cross_checks"));
}
