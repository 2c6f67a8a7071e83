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

#include <doctest.h>

#include <vector>

#include "brainrel/error.hpp"
#include "brainrel/stats.hpp"
#include "test_util.hpp"

using namespace brainrel;
using brainrel::testing::rel_err;

TEST_CASE("descriptive statistics") {
    const std::vector<double> x = {4.0, 1.0, 3.0, 2.0};
    CHECK(stats::mean(x) == 2.5);
    CHECK(stats::median(x) == 2.5);
    CHECK(stats::median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(rel_err(stats::stddev(x), std::sqrt(5.0 / 3.0)) < 1e-15);
    CHECK_THROWS_AS(stats::mean(std::vector<double>{}), Error);
    CHECK_THROWS_AS(stats::stddev(std::vector<double>{1.0}), Error);
}

TEST_CASE("paired t-test against reference values") {
    const std::vector<double> a = {1, 2, 3, 4, 5};
    const std::vector<double> b = {1.5, 1.9, 3.4, 3.6, 5.8};
    const auto r = stats::paired_t_test(a, b);
    CHECK(rel_err(r.statistic, -1.1117785310689905) < 1e-12);
    CHECK(rel_err(r.p, 0.3285493970418105) < 1e-9);
    const auto same = stats::paired_t_test(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.p == 1.0);
    const std::vector<double> shifted = {2, 3, 4, 5, 6};
    CHECK_THROWS_AS(stats::paired_t_test(shifted, a), Error);
    CHECK_THROWS_AS(stats::paired_t_test(a, std::vector<double>{1.0}), Error);
}

TEST_CASE("Welch t-test against reference values") {
    const std::vector<double> x = {2.1, 3.4, 1.9, 5.6, 4.4, 3.3};
    const std::vector<double> y = {1.2, 0.8, 2.5, 1.9};
    const auto r = stats::welch_t_test(x, y);
    CHECK(rel_err(r.statistic, 2.705707969270383) < 1e-12);
    CHECK(rel_err(r.p, 0.027376707826534768) < 1e-9);
    const auto flipped = stats::welch_t_test(y, x);
    CHECK(flipped.statistic == doctest::Approx(-r.statistic));
    CHECK(flipped.p == doctest::Approx(r.p));
}

TEST_CASE("rank-sum test with ties against reference values") {
    const std::vector<double> a = {3, 5, 5, 7, 9, 9, 9};
    const std::vector<double> b = {1, 2, 5, 6, 9};
    const auto two = stats::rank_sum_test(a, b);
    CHECK(two.statistic == 24.5);
    CHECK(rel_err(two.p, 0.2437414782886388) < 1e-9);
    const auto one = stats::rank_sum_test(a, b, true);
    CHECK(rel_err(one.p, 0.1218707391443194) < 1e-9);
    const std::vector<double> c = {1.0, 1.0};
    CHECK(stats::rank_sum_test(c, c).p == 1.0);
    CHECK_THROWS_AS(stats::rank_sum_test(a, std::vector<double>{}), Error);
}

TEST_CASE("midranks") {
    const std::vector<double> x = {3, 1, 3, 2, 3};
    CHECK(stats::midranks(x) == std::vector<double>{4, 1, 4, 2, 4});
    const std::vector<double> distinct = {0.3, 0.1, 0.2};
    CHECK(stats::midranks(distinct) == std::vector<double>{3, 1, 2});
    // Ranks always sum to n (n + 1) / 2.
    const auto g = brainrel::testing::gaussian(101, 7);
    double s = 0.0;
    for (double r : stats::midranks(g)) s += r;
    CHECK(s == 101.0 * 102.0 / 2.0);
}
