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

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "brainrel/eeg.hpp"

namespace brainrel::classifier {

struct ShrunkCovariance {
    Eigen::MatrixXd sigma;
    double lambda = 0.0;  // shrinkage intensity in [0, 1]
};

/// Analytic Schäfer-Strimmer intensity for the diagonal (unequal variance)
/// target, clipped to [0, 1]. Rows of `centered` are observations.
double shrinkage_intensity(const Eigen::MatrixXd& centered);

/// sigma = lambda * diag(S) + (1 - lambda) * S with S the unbiased sample
/// covariance of already-centered rows. `forced_lambda` bypasses the
/// analytic choice.
ShrunkCovariance shrink_covariance(const Eigen::MatrixXd& centered,
                                   std::optional<double> forced_lambda = std::nullopt);

struct TrainOptions {
    std::optional<double> shrinkage;  // unset: analytic intensity
};

/// Two-class Gaussian model with a shared shrunk covariance.
class LdaModel {
public:
    Eigen::VectorXd mu_relevant;
    Eigen::VectorXd mu_irrelevant;
    Eigen::MatrixXd sigma;
    double prior_relevant = 0.5;
    double prior_irrelevant = 0.5;
    double lambda = 0.0;

    std::size_t dim() const { return static_cast<std::size_t>(mu_relevant.size()); }

    /// Solves sigma * w = mu_rel - mu_irr through a Cholesky factorization
    /// and caches the discriminant. Throws if sigma is not positive definite.
    void finalize();

    const Eigen::VectorXd& weights() const { return weights_; }
    double bias() const { return bias_; }

    /// Log posterior odds log p(rel|x) - log p(irr|x).
    double decision(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    double predict_proba_irrelevant(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// One probability per row.
    Eigen::VectorXd predict_proba_rows(const Eigen::MatrixXd& rows) const;

    /// Versioned text format; doubles in shortest round-trip form.
    std::string serialize() const;
    static LdaModel deserialize(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static LdaModel load(const std::filesystem::path& path);

private:
    Eigen::VectorXd weights_;
    double bias_ = 0.0;
};

/// Rows labeled unlabeled are ignored. Throws "degenerate training set"
/// unless both classes are present.
LdaModel train(const Eigen::MatrixXd& features, std::span<const eeg::Label> labels,
               const TrainOptions& options = {});

/// p > 0.5 is relevant; exactly 0.5 is not.
eeg::Label binarize(double p);

}  // namespace brainrel::classifier
