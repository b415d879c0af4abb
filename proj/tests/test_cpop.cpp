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
#include <string>

#include "capax/cpop.hpp"
#include "capax/error.hpp"

using namespace capax;

namespace {

CMatrix psd(std::size_t n, Rng& rng) {
  const CMatrix g = random_gaussian(n, n, 1.0, rng);
  return HermitianMatrix::from_matrix(g * g.adjoint()).to_matrix();
}

double min_eig(const CMatrix& h) {
  return eigh(HermitianMatrix::from_matrix(h)).values.front();
}

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

TEST_CASE("identity and trace channels") {
  Rng rng(1);
  const CMatrix x = random_gaussian(3, 3, 1.0, rng);
  CHECK((apply(CPOperator::identity(3), x) - x).frobenius_norm() < 1e-14);
  CHECK(apply(CPOperator::identity(2), CMatrix(2, 2)).frobenius_norm() == 0.0);

  const CPOperator tr = CPOperator::trace_channel(3, 2);
  CMatrix expect = CMatrix::identity(2);
  expect *= x.trace();
  CHECK((apply(tr, x) - expect).frobenius_norm() < 1e-13);
  const CMatrix y = random_gaussian(2, 2, 1.0, rng);
  CMatrix dual_expect = CMatrix::identity(3);
  dual_expect *= y.trace();
  CHECK((dual_apply(tr, y) - dual_expect).frobenius_norm() < 1e-13);
  CHECK((dual_apply(CPOperator::identity(2), y) - y).frobenius_norm() < 1e-14);
}

TEST_CASE("construction and shape checks") {
  CHECK(kind_of([] { CPOperator(2, 2, {}); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { CPOperator(2, 2, {CMatrix(2, 3)}); }) == ErrorKind::DimensionMismatch);
  const CPOperator t = CPOperator::identity(2);
  CHECK(kind_of([&] { apply(t, CMatrix(3, 3)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { dual_apply(t, CMatrix(3, 3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("apply keeps hermitian inputs hermitian and PSD inputs PSD") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const CPOperator t = random_cp(1 + trial % 4, 1 + (trial / 4) % 4, 1 + trial % 3, 1.0, rng);
    const CMatrix x = psd(t.n(), rng);
    const CMatrix y = apply(t, x);
    CHECK(y == y.adjoint());
    CHECK(min_eig(y) >= -1e-10 * x.frobenius_norm());
  }
}

TEST_CASE("dual is the Hilbert-Schmidt adjoint") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CPOperator t = random_cp(3, 2, 3, 1.0, rng);
    const CMatrix x = random_hermitian(3, 1.0, rng).to_matrix();
    const CMatrix y = random_hermitian(2, 1.0, rng).to_matrix();
    const cd lhs = hs_inner(apply(t, x), y), rhs = hs_inner(x, dual_apply(t, y));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    const CMatrix xg = random_gaussian(3, 3, 1.0, rng);
    const CMatrix yg = random_gaussian(2, 2, 1.0, rng);
    CHECK(std::abs(hs_inner(apply(t, xg), yg) - hs_inner(xg, dual_apply(t, yg))) <= 1e-10 * 10);
  }
}

TEST_CASE("coefficients in the matrix-unit basis") {
  const CPOperator id = CPOperator::identity(2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t d = 0; d < 2; ++d) {
          const cd v = coeff(id, {a, b, c, d});
          CHECK(v == cd((a == c && b == d) ? 1.0 : 0.0));
        }
  Rng rng(4);
  const CMatrix a = random_gaussian(3, 2, 1.0, rng);
  const CPOperator single(2, 3, {a});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l)
          CHECK(std::abs(coeff(single, {i, j, k, l}) - a(i, k) * std::conj(a(j, l))) < 1e-14);
  CHECK(kind_of([&] { coeff(single, {3, 0, 0, 0}); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { coeff(single, {0, 0, 0, 2}); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("coefficients reconstruct the map") {
  Rng rng(5);
  const CPOperator t = random_cp(3, 2, 2, 1.0, rng);
  const CMatrix x = random_gaussian(3, 3, 1.0, rng);
  CMatrix rebuilt(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) rebuilt(i, j) += coeff(t, {i, j, k, l}) * x(k, l);
  CHECK((rebuilt - apply(t, x)).frobenius_norm() <= 1e-12);

  const OperatorMatrixRep& rep = t.matrix_rep();
  CHECK(rep.mat.rows() == 4);
  CHECK(rep.mat.cols() == 9);
  CMatrix vx(9, 1);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t l = 0; l < 3; ++l) vx(k * 3 + l, 0) = x(k, l);
  const CMatrix vy = rep.mat * vx;
  const CMatrix y = apply(t, x);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(vy(i * 2 + j, 0) - y(i, j)) < 1e-12);
}

TEST_CASE("unitary conjugation") {
  Rng rng(6);
  const CPOperator t = random_cp(3, 3, 2, 1.0, rng);
  const CPOperator same = conjugate_unitary(t, CMatrix::identity(3));
  CHECK(distance(same, t) < 1e-14);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix u = haar_unitary(3, rng);
    const CMatrix v = haar_unitary(3, rng);
    const CPOperator tu = conjugate_unitary(t, u);
    CHECK(std::abs(op_norm(tu) - op_norm(t)) <= 1e-9 * op_norm(t));
    const CMatrix x = random_gaussian(3, 3, 1.0, rng);
    CHECK((apply(tu, x) - apply(t, u * x * u.adjoint())).frobenius_norm() <= 1e-10 * 10);
    const CPOperator tuv = conjugate_unitary(tu, v);
    const CPOperator direct = conjugate_unitary(t, u * v);
    CHECK((apply(tuv, x) - apply(direct, x)).frobenius_norm() <= 1e-10);
  }
  CMatrix not_unitary = CMatrix::identity(3);
  not_unitary(0, 0) = 1.1;
  CHECK(kind_of([&] { conjugate_unitary(t, not_unitary); }) == ErrorKind::NotUnitary);
}

TEST_CASE("operator norm") {
  CHECK(op_norm(CPOperator::identity(3)) == doctest::Approx(1.0).epsilon(1e-10));
  Rng rng(7);
  const CPOperator t = random_cp(2, 3, 3, 1.0, rng);
  for (double c : {0.25, 2.0, 9.0})
    CHECK(op_norm(scale(t, c)) == doctest::Approx(c * op_norm(t)).epsilon(1e-9));
  const double norm = op_norm(t);
  for (int trial = 0; trial < 200; ++trial) {
    const CMatrix x = random_gaussian(2, 2, 1.0, rng);
    CHECK(apply(t, x).frobenius_norm() / x.frobenius_norm() <= norm * (1.0 + 1e-9));
  }
}

TEST_CASE("distance is a metric and obeys the Kraus telescoping bound") {
  Rng rng(8);
  const CPOperator a = random_cp(2, 2, 2, 1.0, rng);
  CHECK(distance(a, a) == 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    const CPOperator b = random_cp(2, 2, 2, 1.0, rng);
    const CPOperator c = random_cp(2, 2, 2, 1.0, rng);
    CHECK(std::abs(distance(a, b) - distance(b, a)) <= 1e-12);
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    double bound = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      bound += max_singular_value(a.kraus()[k] - b.kraus()[k]) *
               (max_singular_value(a.kraus()[k]) + max_singular_value(b.kraus()[k]));
    }
    CHECK(distance(a, b) <= bound * (1.0 + 1e-9));
  }
  CHECK(kind_of([&] { distance(a, CPOperator::identity(3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("random operators are reproducible") {
  const CPOperator a = random_cp(3, 2, 4, 0.7, 42);
  const CPOperator b = random_cp(3, 2, 4, 0.7, 42);
  CHECK(to_json(a) == to_json(b));
  CHECK(to_json(a) != to_json(random_cp(3, 2, 4, 0.7, 43)));
  CHECK(a.kraus().size() == 4);
}

TEST_CASE("json round trip") {
  const std::string id = to_json(CPOperator::identity(2));
  CHECK(to_json(from_json(id)) == id);
  Rng rng(9);
  const CPOperator t = random_cp(2, 3, 2, 1.0, rng);
  CHECK(distance(from_json(to_json(t)), t) <= 1e-15);
}

TEST_CASE("json errors name the offending field") {
  const std::string bad =
      R"({"n": 1, "m": 1, "kraus": [[[[1.0, 0.0]]], [[[1.0]]]]})";
  try {
    from_json(bad);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("kraus[1][0][0]") != std::string::npos);
  }
  CHECK(kind_of([] { from_json("{not json"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { from_json(R"({"n": 1, "m": 1})"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { from_json(R"({"n": 1, "m": 1, "kraus": [[[[1,0]]]], "x": 2})"); }) ==
        ErrorKind::ParseError);
  CHECK(kind_of([] { from_json(R"({"n": 2, "m": 1, "kraus": [[[[1,0]]]]})"); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("size warning outside the desk envelope") {
  CHECK(!size_warning(CPOperator::identity(3)).has_value());
  CHECK(size_warning(CPOperator::identity(7)).has_value());
}
