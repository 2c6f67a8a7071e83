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

#include <cmath>
#include <random>

#include "brainrel/classifier.hpp"
#include "brainrel/error.hpp"
#include "brainrel/evaluation.hpp"
#include "test_util.hpp"

using namespace brainrel;
using classifier::LdaModel;
using eeg::Label;
using brainrel::testing::rel_err;
using brainrel::testing::TempDir;

namespace {

struct Dataset {
    Eigen::MatrixXd x;
    std::vector<Label> labels;
};

// Two Gaussian classes with a shared covariance L L^T; class means +-shift/2.
Dataset two_gaussians(std::size_t n_rel, std::size_t n_irr, const Eigen::VectorXd& shift, std::uint64_t seed,
                      const Eigen::MatrixXd* mix = nullptr) {
    const auto p = shift.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(n_rel + n_irr), p);
    for (Eigen::Index r = 0; r < d.x.rows(); ++r) {
        Eigen::VectorXd z(p);
        for (Eigen::Index c = 0; c < p; ++c) z[c] = g(rng);
        if (mix) z = *mix * z;
        const bool rel = static_cast<std::size_t>(r) < n_rel;
        d.x.row(r) = (z + (rel ? 0.5 : -0.5) * shift).transpose();
        d.labels.push_back(rel ? Label::relevant : Label::irrelevant);
    }
    return d;
}

Eigen::MatrixXd well_conditioned_mix(Eigen::Index p) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        l(i, i) = 1.0 + 0.25 * static_cast<double>(i);
        for (Eigen::Index j = 0; j < i; ++j) l(i, j) = 0.3 / static_cast<double>(1 + i - j);
    }
    return l;
}

}  // namespace

TEST_CASE("two-dimensional toy model") {
    LdaModel m;
    m.mu_relevant = Eigen::Vector2d(2.0, 0.0);
    m.mu_irrelevant = Eigen::Vector2d(0.0, 0.0);
    m.sigma = Eigen::Matrix2d::Identity();
    m.finalize();
    CHECK(m.predict_proba(Eigen::Vector2d(1.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-15));
    const double want = 1.0 / (1.0 + std::exp(-2.0));
    CHECK(rel_err(m.predict_proba(Eigen::Vector2d(2.0, 0.0)), want) < 1e-12);
    CHECK(m.predict_proba(Eigen::Vector2d(2.0, 0.0)) == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(m.predict_proba(Eigen::Vector2d(1.0, 5.0)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(m.predict_proba(Eigen::Vector3d(1.0, 0.0, 0.0)), Error);

    LdaModel far = m;
    far.mu_relevant = Eigen::Vector2d(40.0, 0.0);
    far.finalize();
    CHECK(far.predict_proba(far.mu_relevant) >= 0.999);
}

TEST_CASE("forced shrinkage endpoints") {
    const auto d = two_gaussians(60, 90, Eigen::VectorXd::Constant(4, 1.0), 3);
    Eigen::MatrixXd centered = d.x.rowwise() - d.x.colwise().mean();
    const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(centered.rows() - 1);
    const auto zero = classifier::shrink_covariance(centered, 0.0);
    const auto one = classifier::shrink_covariance(centered, 1.0);
    CHECK(zero.lambda == 0.0);
    CHECK(one.lambda == 1.0);
    CHECK((zero.sigma - s).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd target = s.diagonal().asDiagonal();
    CHECK((one.sigma - target).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(classifier::shrink_covariance(centered.topRows(1)), Error);
    CHECK_THROWS_AS(classifier::shrink_covariance(centered, 1.5), Error);
}

TEST_CASE("analytic intensity matches a direct evaluation of the formula") {
    const auto d = two_gaussians(15, 25, Eigen::VectorXd::Constant(6, 0.5), 8);
    Eigen::MatrixXd x = d.x.rowwise() - d.x.colwise().mean();
    const double n = static_cast<double>(x.rows());
    const Eigen::Index p = x.cols();
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) continue;
            const Eigen::VectorXd w = x.col(i).cwiseProduct(x.col(j));
            const double wbar = w.mean();
            const double s_ij = n / (n - 1.0) * wbar;
            const double var = n / std::pow(n - 1.0, 3) * (w.array() - wbar).square().sum();
            num += var;
            den += s_ij * s_ij;
        }
    }
    const double want = std::clamp(num / den, 0.0, 1.0);
    CHECK(rel_err(classifier::shrinkage_intensity(x), want) < 1e-10);
}

TEST_CASE("shrinkage is consistent for large samples") {
    const Eigen::MatrixXd l = well_conditioned_mix(5);
    const Eigen::MatrixXd truth = l * l.transpose();
    const auto d = two_gaussians(2500, 2500, Eigen::VectorXd::Zero(5), 21, &l);
    Eigen::MatrixXd centered = d.x.rowwise() - d.x.colwise().mean();
    const auto sc = classifier::shrink_covariance(centered);
    CHECK(sc.lambda < 0.05);
    CHECK((sc.sigma - truth).norm() / truth.norm() < 0.1);
}

TEST_CASE("zero shrinkage reproduces the textbook discriminant") {
    const Eigen::MatrixXd l = well_conditioned_mix(5);
    Eigen::VectorXd shift(5);
    shift << 1.0, -0.5, 0.25, 0.0, 0.75;
    const auto d = two_gaussians(80, 120, shift, 5, &l);
    const auto model = classifier::train(d.x, d.labels, {.shrinkage = 0.0});

    // Independent oracle: pooled within-class covariance and an explicit inverse.
    Eigen::VectorXd mu_r = Eigen::VectorXd::Zero(5), mu_i = Eigen::VectorXd::Zero(5);
    for (Eigen::Index r = 0; r < 200; ++r) (r < 80 ? mu_r : mu_i) += d.x.row(r).transpose();
    mu_r /= 80.0;
    mu_i /= 120.0;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 5);
    for (Eigen::Index r = 0; r < 200; ++r) {
        const Eigen::VectorXd c = d.x.row(r).transpose() - (r < 80 ? mu_r : mu_i);
        s += c * c.transpose();
    }
    s /= 199.0;
    const Eigen::VectorXd want = s.inverse() * (mu_r - mu_i);
    const Eigen::VectorXd got = model.weights();
    const double scale = got.dot(want) / want.squaredNorm();
    CHECK((got - scale * want).norm() / (scale * want).norm() < 1e-9);
    CHECK(model.lambda == 0.0);
    CHECK(model.prior_relevant == doctest::Approx(0.4));

    for (Eigen::Index r = 0; r < 200; ++r) {
        const Eigen::VectorXd x = d.x.row(r).transpose();
        CHECK(std::abs(model.predict_proba(x) + model.predict_proba_irrelevant(x) - 1.0) <= 1e-12);
    }
    for (double t : {-1e3, -40.0, 0.0, 40.0, 1e3}) {
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(5, t);
        CHECK(std::abs(model.predict_proba(x) + model.predict_proba_irrelevant(x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("separable clusters give training AUC 1") {
    const auto d = two_gaussians(40, 60, Eigen::VectorXd::Constant(3, 12.0), 9);
    const auto model = classifier::train(d.x, d.labels);
    const Eigen::VectorXd p = model.predict_proba_rows(d.x);
    const std::vector<double> probs(p.data(), p.data() + p.size());
    CHECK(evaluation::auc(probs, d.labels) == 1.0);
}

TEST_CASE("permuted labels give chance-level cross-validated AUC") {
    double total = 0.0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        auto train = two_gaussians(40, 160, Eigen::VectorXd::Constant(8, 1.0), 1000 + seed);
        const auto test = two_gaussians(40, 160, Eigen::VectorXd::Constant(8, 1.0), 5000 + seed);
        std::mt19937_64 rng(seed);
        std::shuffle(train.labels.begin(), train.labels.end(), rng);
        const auto model = classifier::train(train.x, train.labels);
        const Eigen::VectorXd p = model.predict_proba_rows(test.x);
        const std::vector<double> probs(p.data(), p.data() + p.size());
        total += evaluation::auc(probs, test.labels);
    }
    CHECK(std::abs(total / seeds - 0.5) < 0.05);
}

TEST_CASE("class imbalance 153 vs 1223") {
    const auto d = two_gaussians(153, 1223, Eigen::VectorXd::Constant(20, 0.2), 4);
    classifier::LdaModel model;
    CHECK_NOTHROW(model = classifier::train(d.x, d.labels));
    CHECK(model.prior_relevant == doctest::Approx(153.0 / 1376.0));
    CHECK(model.prior_relevant + model.prior_irrelevant == doctest::Approx(1.0));
    CHECK(model.lambda >= 0.0);
    CHECK(model.lambda <= 1.0);
}

TEST_CASE("degenerate training sets") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(6, 2);
    std::vector<Label> one_class(6, Label::relevant);
    CHECK_THROWS_WITH(classifier::train(x, one_class), "degenerate training set");
    std::vector<Label> unlabeled(6, Label::unlabeled);
    unlabeled[0] = Label::relevant;
    CHECK_THROWS_WITH(classifier::train(x, unlabeled), "degenerate training set");
}

TEST_CASE("orthonormal maps leave predictions unchanged") {
    const auto d = two_gaussians(50, 150, Eigen::VectorXd::Constant(6, 0.8), 12, nullptr);
    const auto test = two_gaussians(30, 30, Eigen::VectorXd::Constant(6, 0.8), 13, nullptr);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(6, 6)).householderQ();
    const auto a = classifier::train(d.x, d.labels);
    const auto b = classifier::train(d.x * q, d.labels);
    const Eigen::VectorXd pa = a.predict_proba_rows(test.x);
    const Eigen::VectorXd pb = b.predict_proba_rows(test.x * q);
    // The diagonal target is not rotation invariant, so compare with shrinkage held fixed too.
    const auto a0 = classifier::train(d.x, d.labels, {.shrinkage = 0.0});
    const auto b0 = classifier::train(d.x * q, d.labels, {.shrinkage = 0.0});
    const Eigen::VectorXd pa0 = a0.predict_proba_rows(test.x);
    const Eigen::VectorXd pb0 = b0.predict_proba_rows(test.x * q);
    CHECK((pa0 - pb0).cwiseAbs().maxCoeff() < 1e-6);
    // Permutations and sign flips are orthonormal and preserve the diagonal target.
    Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 6; ++i) perm(i, (i + 2) % 6) = i % 2 ? -1.0 : 1.0;
    const auto c = classifier::train(d.x * perm, d.labels);
    const Eigen::VectorXd pc = c.predict_proba_rows(test.x * perm);
    CHECK((pa - pc).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(pb.size() == pa.size());
}

TEST_CASE("affine maps leave predictions unchanged at fixed shrinkage") {
    const auto d = two_gaussians(50, 150, Eigen::VectorXd::Constant(4, 0.8), 14);
    const auto test = two_gaussians(30, 30, Eigen::VectorXd::Constant(4, 0.8), 15);
    Eigen::MatrixXd a(4, 4);
    a << 2, 1, 0, 0, 0, 1, 0.5, 0, 0, 0, 3, 1, 1, 0, 0, 1;
    const Eigen::RowVectorXd t = Eigen::RowVectorXd::LinSpaced(4, -3.0, 5.0);
    const auto base = classifier::train(d.x, d.labels, {.shrinkage = 0.0});
    const auto moved = classifier::train((d.x * a).rowwise() + t, d.labels, {.shrinkage = 0.0});
    const Eigen::VectorXd p0 = base.predict_proba_rows(test.x);
    const Eigen::VectorXd p1 = moved.predict_proba_rows((test.x * a).rowwise() + t);
    CHECK((p0 - p1).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("binarize") {
    CHECK(classifier::binarize(0.51) == Label::relevant);
    CHECK(classifier::binarize(0.5) == Label::irrelevant);
    CHECK(classifier::binarize(0.0) == Label::irrelevant);
    CHECK(classifier::binarize(1.0) == Label::relevant);
}

TEST_CASE("model serialization round trip is exact") {
    TempDir dir("lda");
    const auto d = two_gaussians(30, 50, Eigen::VectorXd::Constant(5, 0.7), 16);
    const auto m = classifier::train(d.x, d.labels);
    m.save(dir / "model.txt");
    const auto back = classifier::LdaModel::load(dir / "model.txt");
    CHECK(back.mu_relevant == m.mu_relevant);
    CHECK(back.mu_irrelevant == m.mu_irrelevant);
    CHECK(back.sigma == m.sigma);
    CHECK(back.prior_relevant == m.prior_relevant);
    CHECK(back.lambda == m.lambda);
    CHECK(back.serialize() == m.serialize());
    const Eigen::VectorXd x = d.x.row(3).transpose();
    CHECK(back.predict_proba(x) == m.predict_proba(x));
    CHECK_THROWS_AS(classifier::LdaModel::deserialize("brainrel-lda 2\n"), Error);
}
