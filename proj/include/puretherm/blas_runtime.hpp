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

/**
 * @file blas_runtime.hpp
 * @brief Guard against OpenBLAS kernels that miscompute on the host CPU.
 *
 * OpenBLAS 0.3.20 dispatches CPUs reporting AVX512-FP16 to its Cooperlake
 * kernels, whose dgemm and symmetric eigensolvers return wrong results for
 * mid-sized matrices. The core type is fixed when the library loads, so the
 * only remedy from inside a process is to re-execute it with
 * OPENBLAS_CORETYPE set.
 */
#pragma once

#include <string>

namespace puretherm {

/// Kernel family OpenBLAS selected, e.g. "SkylakeX".
std::string blas_core_name();

/// If OpenBLAS picked a known-bad core and OPENBLAS_CORETYPE is unset,
/// re-exec /proc/self/exe with OPENBLAS_CORETYPE=SkylakeX. Returns normally
/// when no action is needed or re-exec is impossible.
void ensure_reliable_blas(char** argv) noexcept;

/// Small dgemm against a naive product; true when they agree to 1e-10.
bool blas_self_check();

}  // namespace puretherm
