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

#ifndef CAPAX_ERROR_HPP_
#define CAPAX_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace capax {

// Every failure the library reports carries one of these kinds. The CLI
// prints the kind name on stderr, so the names are part of the interface.
enum class ErrorKind {
  DimensionMismatch,
  IndexOutOfRange,
  SingularMatrix,
  NotUnitary,
  ParseError,
  NonRealCoefficient,
  CombinatorialOverflow,
  IllConditionedGrid,
  EmptySupport,
  MaxIterations,
  DeltaTooLarge,
  InfeasibleMoment,
  SupportViolation,
  SingularEvaluation,
  SingularMarginal,
  NoConvergence,
  NotSupported,
  DegenerateBase,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const { return to_string(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& what);

}  // namespace capax

#endif  // CAPAX_ERROR_HPP_
