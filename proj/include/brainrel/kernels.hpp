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
#include <span>
#include <string_view>

// Data-parallel inner loops shared by the EEG, classifier and intent code.
// Every kernel has a scalar reference implementation; wider variants are
// selected once at runtime from the CPU feature set and must agree with the
// scalar path up to floating-point reassociation.
namespace brainrel::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // Sum of (x[i] - center)^2.
    double (*sum_sq_dev)(const double* x, std::size_t n, double center);
    void (*min_max)(const double* x, std::size_t n, double* lo, double* hi);
    // out[i] = sum_k taps[k] * x[i + k], for i in [0, nx - ntaps].
    void (*correlate_valid)(const double* x, std::size_t nx, const double* taps,
                            std::size_t ntaps, double* out);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

bool isa_supported(Isa isa);

// Table for a specific instruction set. Throws if the CPU or build lacks it.
const KernelTable& table(Isa isa);

// The instruction set used by the free functions below. Defaults to the
// widest supported one; BRAINREL_ISA=scalar|avx2 in the environment
// overrides the default.
Isa active_isa();
void set_active_isa(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double mean(std::span<const double> x);
// Population variance (divides by n).
double variance(std::span<const double> x);
struct Range {
    double lo;
    double hi;
};
Range min_max(std::span<const double> x);
void correlate_valid(std::span<const double> x, std::span<const double> taps,
                     std::span<double> out);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace brainrel::kernels
