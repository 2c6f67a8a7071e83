// Copyright 2026 The brainrel Authors
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

#pragma once

#include <cstddef>

namespace brainrel::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_sq_dev(const double* x, std::size_t n, double center);
void min_max(const double* x, std::size_t n, double* lo, double* hi);
void correlate_valid(const double* x, std::size_t nx, const double* taps, std::size_t ntaps,
                     double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace brainrel::kernels::scalar

#if defined(BRAINREL_HAVE_AVX2)
namespace brainrel::kernels::avx2 {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sum_sq_dev(const double* x, std::size_t n, double center);
void min_max(const double* x, std::size_t n, double* lo, double* hi);
void correlate_valid(const double* x, std::size_t nx, const double* taps, std::size_t ntaps,
                     double* out);
void axpy(double alpha, const double* x, double* y, std::size_t n);

}  // namespace brainrel::kernels::avx2
#endif
