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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "brainrel/kernels.hpp"
#include "kernels/kernels_impl.hpp"

namespace brainrel::kernels {

namespace {

constexpr KernelTable kScalar{
    scalar::dot,          scalar::sum,  scalar::sum_sq_dev, scalar::min_max,
    scalar::correlate_valid, scalar::axpy,
};

#if defined(BRAINREL_HAVE_AVX2)
constexpr KernelTable kAvx2{
    avx2::dot,          avx2::sum,  avx2::sum_sq_dev, avx2::min_max,
    avx2::correlate_valid, avx2::axpy,
};
#endif

Isa default_isa() {
    if (const char* env = std::getenv("BRAINREL_ISA")) {
        const std::string v(env);
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
    }
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{&table(default_isa())};
    return slot;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return "scalar";
        case Isa::avx2:
            return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(BRAINREL_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table(Isa isa) {
    if (!isa_supported(isa)) {
        throw std::runtime_error("kernels: instruction set not available: " +
                                 std::string(isa_name(isa)));
    }
#if defined(BRAINREL_HAVE_AVX2)
    if (isa == Isa::avx2) return kAvx2;
#endif
    return kScalar;
}

Isa active_isa() { return &active() == &kScalar ? Isa::scalar : Isa::avx2; }

void set_active_isa(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("kernels::dot: length mismatch");
    return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("kernels::mean: empty input");
    return sum(x) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    const double m = mean(x);
    return active().sum_sq_dev(x.data(), x.size(), m) / static_cast<double>(x.size());
}

Range min_max(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("kernels::min_max: empty input");
    Range r{};
    active().min_max(x.data(), x.size(), &r.lo, &r.hi);
    return r;
}

void correlate_valid(std::span<const double> x, std::span<const double> taps,
                     std::span<double> out) {
    if (taps.empty() || x.size() < taps.size() || out.size() != x.size() - taps.size() + 1) {
        throw std::invalid_argument("kernels::correlate_valid: bad lengths");
    }
    active().correlate_valid(x.data(), x.size(), taps.data(), taps.size(), out.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
    active().axpy(alpha, x.data(), y.data(), y.size());
}

}  // namespace brainrel::kernels
