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

#include "capax/error.hpp"

namespace capax {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonRealCoefficient: return "NonRealCoefficient";
    case ErrorKind::CombinatorialOverflow: return "CombinatorialOverflow";
    case ErrorKind::IllConditionedGrid: return "IllConditionedGrid";
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorKind::InfeasibleMoment: return "InfeasibleMoment";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::SingularEvaluation: return "SingularEvaluation";
    case ErrorKind::SingularMarginal: return "SingularMarginal";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotSupported: return "NotSupported";
    case ErrorKind::DegenerateBase: return "DegenerateBase";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

void raise(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace capax
