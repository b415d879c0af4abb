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

#include <atomic>
#include <cstdlib>
#include <string>

#include "capax/error.hpp"
#include "capax/kernels.hpp"

namespace capax::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(CAPAX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  // CAPAX_KERNELS=scalar pins the reference path, e.g. for bisecting.
  if (const char* env = std::getenv("CAPAX_KERNELS")) {
    if (std::string(env) == "scalar") return Backend::Scalar;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool available(Backend backend) {
  return backend == Backend::Scalar || cpu_has_avx2();
}

const KernelTable& table(Backend backend) {
#if defined(CAPAX_HAVE_AVX2)
  if (backend == Backend::Avx2 && cpu_has_avx2()) return avx2::kTable;
#endif
  if (backend == Backend::Avx2)
    raise(ErrorKind::NotSupported, "AVX2 kernels unavailable on this CPU");
  return scalar::kTable;
}

const KernelTable& active() { return table(current().load(std::memory_order_relaxed)); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!available(backend))
    raise(ErrorKind::NotSupported, "AVX2 kernels unavailable on this CPU");
  current().store(backend, std::memory_order_relaxed);
}

std::string_view to_string(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace capax::kernels
