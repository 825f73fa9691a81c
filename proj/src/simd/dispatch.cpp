// Copyright 2026 The puretherm Authors
//
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

#include <cstdlib>
#include <cstring>

#include "puretherm/simd/kernels.hpp"

namespace puretherm::simd {

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PURETHERM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) noexcept {
  if (!isa_supported(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &detail::scalar_table;
    case Isa::avx2:
#if defined(PURETHERM_HAVE_AVX2)
      return &detail::avx2_table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

namespace {

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("PURETHERM_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return detail::scalar_table;
    if (std::strcmp(env, "avx2") == 0) {
      if (const KernelTable* t = table_for(Isa::avx2)) return *t;
    }
  }
  if (const KernelTable* t = table_for(Isa::avx2)) return *t;
  return detail::scalar_table;
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace puretherm::simd
