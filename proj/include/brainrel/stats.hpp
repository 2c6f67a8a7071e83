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

#include <span>
#include <vector>

namespace brainrel::stats {

struct TestResult {
    double statistic = 0.0;
    double p = 1.0;
};

double mean(std::span<const double> x);
double median(std::vector<double> x);
// Unbiased (n - 1) standard deviation.
double stddev(std::span<const double> x);

/// Two-sided paired t-test. Throws for n < 2 or for a constant nonzero
/// difference (zero variance); identical pairs give t = 0, p = 1.
TestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Two-sided Welch t-test.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Mann-Whitney U / Wilcoxon rank-sum test, normal approximation with tie
/// correction. statistic is U for `a`; p is one-sided for a > b when
/// `greater` is set, two-sided otherwise.
TestResult rank_sum_test(std::span<const double> a, std::span<const double> b, bool greater = false);

/// Midranks (1-based) with ties averaged.
std::vector<double> midranks(std::span<const double> x);

}  // namespace brainrel::stats
