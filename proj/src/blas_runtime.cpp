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

#include "puretherm/blas_runtime.hpp"

#include <cblas.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace puretherm {

std::string blas_core_name() {
  const char* name = openblas_get_corename();
  return name ? std::string(name) : std::string();
}

void ensure_reliable_blas(char** argv) noexcept {
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  std::string core = blas_core_name();
  std::transform(core.begin(), core.end(), core.begin(), [](unsigned char c) { return std::tolower(c); });
  if (core != "cooperlake") return;
  if (::setenv("OPENBLAS_CORETYPE", "SkylakeX", 1) != 0) return;
  ::execv("/proc/self/exe", argv);
  // execv only returns on failure; carry on and let residual checks report.
}

bool blas_self_check() {
  // Sizes above the blocking threshold where the faulty kernels misbehave.
  const int n = 300;
  std::vector<double> a(n * n), b(n * n), c(n * n, 0.0);
  for (int i = 0; i < n * n; ++i) {
    a[i] = std::sin(0.37 * i + 0.1);
    b[i] = std::cos(0.23 * i - 0.4);
  }
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, a.data(), n, b.data(), n, 0.0, c.data(), n);
  double worst = 0.0;
  for (int j = 0; j < n; j += 37) {
    for (int i = 0; i < n; i += 29) {
      double ref = 0.0;
      for (int k = 0; k < n; ++k) ref += a[i + k * n] * b[k + j * n];
      worst = std::max(worst, std::abs(ref - c[i + j * n]));
    }
  }
  return worst < 1e-10 * n;
}

}  // namespace puretherm
