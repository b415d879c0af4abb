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

#include "capax/cpop.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "capax/error.hpp"

namespace capax {

struct CPOperator::Cache {
  std::once_flag once;
  OperatorMatrixRep rep;
};

CPOperator::CPOperator(std::size_t n, std::size_t m, std::vector<CMatrix> kraus)
    : n_(n), m_(m), kraus_(std::move(kraus)), cache_(std::make_shared<Cache>()) {
  if (n_ == 0 || m_ == 0)
    raise(ErrorKind::DimensionMismatch, "dimensions must be positive");
  if (kraus_.empty())
    raise(ErrorKind::DimensionMismatch, "Kraus family must be nonempty");
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    if (kraus_[k].rows() != m_ || kraus_[k].cols() != n_)
      raise(ErrorKind::DimensionMismatch,
            "Kraus matrix " + std::to_string(k) + " is " +
                std::to_string(kraus_[k].rows()) + "x" +
                std::to_string(kraus_[k].cols()) + ", expected " +
                std::to_string(m_) + "x" + std::to_string(n_));
    if (!kraus_[k].all_finite())
      raise(ErrorKind::ParseError,
            "Kraus matrix " + std::to_string(k) + " has non-finite entries");
  }
}

CPOperator CPOperator::identity(std::size_t n) {
  return CPOperator(n, n, {CMatrix::identity(n)});
}

CPOperator CPOperator::trace_channel(std::size_t n, std::size_t m) {
  std::vector<CMatrix> kraus;
  kraus.reserve(n * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      CMatrix a(m, n);
      a(i, l) = 1.0;
      kraus.push_back(std::move(a));
    }
  }
  return CPOperator(n, m, std::move(kraus));
}

const OperatorMatrixRep& CPOperator::matrix_rep() const {
  std::call_once(cache_->once, [this] {
    OperatorMatrixRep& rep = cache_->rep;
    rep.n = n_;
    rep.m = m_;
    rep.mat = CMatrix(m_ * m_, n_ * n_);
    // T(E_kl)_ij = sum_a A_ik conj(A_jl)
    for (const CMatrix& a : kraus_)
      for (std::size_t i = 0; i < m_; ++i)
        for (std::size_t j = 0; j < m_; ++j)
          for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t l = 0; l < n_; ++l)
              rep.mat(i * m_ + j, k * n_ + l) += a(i, k) * std::conj(a(j, l));
  });
  return cache_->rep;
}

namespace {

bool is_hermitian(const CMatrix& x) {
  if (!x.square()) return false;
  const double tol = 1e-14 * std::max(1.0, x.frobenius_norm());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (std::abs(x(i, j) - std::conj(x(j, i))) > tol) return false;
  return true;
}

}  // namespace

CMatrix apply(const CPOperator& t, const CMatrix& x) {
  if (x.rows() != t.n() || x.cols() != t.n())
    raise(ErrorKind::DimensionMismatch,
          "input must be " + std::to_string(t.n()) + "x" + std::to_string(t.n()));
  CMatrix out(t.m(), t.m());
  for (const CMatrix& a : t.kraus()) out += a * x * a.adjoint();
  if (is_hermitian(x)) out = HermitianMatrix::from_matrix(out).to_matrix();
  return out;
}

CMatrix dual_apply(const CPOperator& t, const CMatrix& y) {
  if (y.rows() != t.m() || y.cols() != t.m())
    raise(ErrorKind::DimensionMismatch,
          "input must be " + std::to_string(t.m()) + "x" + std::to_string(t.m()));
  CMatrix out(t.n(), t.n());
  for (const CMatrix& a : t.kraus()) out += a.adjoint() * y * a;
  if (is_hermitian(y)) out = HermitianMatrix::from_matrix(out).to_matrix();
  return out;
}

cd coeff(const CPOperator& t, const BasisIndex& idx) {
  if (idx.out_row >= t.m() || idx.out_col >= t.m() || idx.in_row >= t.n() ||
      idx.in_col >= t.n())
    raise(ErrorKind::IndexOutOfRange, "basis index outside the operator's dimensions");
  cd s = 0.0;
  for (const CMatrix& a : t.kraus())
    s += a(idx.out_row, idx.in_row) * std::conj(a(idx.out_col, idx.in_col));
  return s;
}

CPOperator conjugate_unitary(const CPOperator& t, const CMatrix& u) {
  if (u.rows() != t.n() || u.cols() != t.n())
    raise(ErrorKind::DimensionMismatch, "unitary must be n x n");
  if (unitarity_defect(u) > 1e-10)
    raise(ErrorKind::NotUnitary,
          "||U*U - I|| = " + std::to_string(unitarity_defect(u)));
  std::vector<CMatrix> kraus;
  kraus.reserve(t.kraus().size());
  for (const CMatrix& a : t.kraus()) kraus.push_back(a * u);
  return CPOperator(t.n(), t.m(), std::move(kraus));
}

CPOperator scale(const CPOperator& t, double c) {
  const double r = std::sqrt(c);
  std::vector<CMatrix> kraus = t.kraus();
  for (CMatrix& a : kraus) a *= r;
  return CPOperator(t.n(), t.m(), std::move(kraus));
}

double op_norm(const OperatorMatrixRep& rep) { return max_singular_value(rep.mat); }

double op_norm(const CPOperator& t) { return op_norm(t.matrix_rep()); }

double distance(const CPOperator& a, const CPOperator& b) {
  if (a.n() != b.n() || a.m() != b.m())
    raise(ErrorKind::DimensionMismatch, "operators act between different spaces");
  return max_singular_value(a.matrix_rep().mat - b.matrix_rep().mat);
}

CPOperator random_cp(std::size_t n, std::size_t m, std::size_t kraus_count,
                     double scale, Rng& rng) {
  if (n == 0 || m == 0 || kraus_count == 0)
    raise(ErrorKind::DimensionMismatch, "n, m and K must be positive");
  std::vector<CMatrix> kraus;
  kraus.reserve(kraus_count);
  for (std::size_t k = 0; k < kraus_count; ++k)
    kraus.push_back(random_gaussian(m, n, scale, rng));
  return CPOperator(n, m, std::move(kraus));
}

CPOperator random_cp(std::size_t n, std::size_t m, std::size_t kraus_count,
                     double scale, std::uint64_t seed) {
  Rng rng(seed);
  return random_cp(n, m, kraus_count, scale, rng);
}

std::optional<std::string> size_warning(const CPOperator& t) {
  if (t.n() <= 6 && t.m() <= 6 && t.kraus().size() <= 8) return std::nullopt;
  std::ostringstream os;
  os << "operator with n=" << t.n() << ", m=" << t.m()
     << ", K=" << t.kraus().size()
     << " exceeds the n,m <= 6, K <= 8 envelope; coefficient extraction is "
        "factorial in m";
  return os.str();
}

// ---------------------------------------------------------------------------

using nlohmann::json;

std::string to_json(const CPOperator& t) {
  json kraus = json::array();
  for (const CMatrix& a : t.kraus()) {
    json rows = json::array();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < a.cols(); ++j)
        row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
      rows.push_back(std::move(row));
    }
    kraus.push_back(std::move(rows));
  }
  json doc;
  doc["n"] = t.n();
  doc["m"] = t.m();
  doc["kraus"] = std::move(kraus);
  return doc.dump();
}

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  raise(ErrorKind::ParseError, field + ": " + msg);
}

std::size_t read_dim(const json& doc, const char* key) {
  if (!doc.contains(key)) parse_fail(key, "missing");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    parse_fail(key, "expected a positive integer");
  return v.get<std::size_t>();
}

}  // namespace

CPOperator from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorKind::ParseError, std::string("malformed JSON at byte ") +
                                     std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) parse_fail("<root>", "expected an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "n" && it.key() != "m" && it.key() != "kraus")
      parse_fail(it.key(), "unknown field");
  const std::size_t n = read_dim(doc, "n");
  const std::size_t m = read_dim(doc, "m");
  if (!doc.contains("kraus") || !doc["kraus"].is_array() || doc["kraus"].empty())
    parse_fail("kraus", "expected a nonempty array of matrices");

  std::vector<CMatrix> kraus;
  const json& list = doc["kraus"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const std::string kf = "kraus[" + std::to_string(k) + "]";
    const json& rows = list[k];
    if (!rows.is_array() || rows.size() != m)
      parse_fail(kf, "expected " + std::to_string(m) + " rows");
    CMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      const std::string rf = kf + "[" + std::to_string(i) + "]";
      const json& row = rows[i];
      if (!row.is_array() || row.size() != n)
        parse_fail(rf, "expected " + std::to_string(n) + " columns");
      for (std::size_t j = 0; j < n; ++j) {
        const std::string ef = rf + "[" + std::to_string(j) + "]";
        const json& z = row[j];
        if (!z.is_array() || z.size() != 2 || !z[0].is_number() ||
            !z[1].is_number())
          parse_fail(ef, "expected a [re, im] pair of numbers");
        const double re = z[0].get<double>();
        const double im = z[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
          parse_fail(ef, "non-finite complex entry");
        a(i, j) = cd(re, im);
      }
    }
    kraus.push_back(std::move(a));
  }
  return CPOperator(n, m, std::move(kraus));
}

}  // namespace capax
