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

#include "brainrel/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "brainrel/error.hpp"
#include "brainrel/io.hpp"

namespace brainrel::classifier {

namespace {

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& centered) {
    const auto n = centered.rows();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(centered.cols(), centered.cols());
    s.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / static_cast<double>(n - 1));
    return s.selfadjointView<Eigen::Lower>();
}

double shrinkage_from(const Eigen::MatrixXd& centered, const Eigen::MatrixXd& s) {
    const auto n = static_cast<double>(centered.rows());
    const auto p = centered.cols();
    if (p < 2) return 1.0;  // diag(S) == S, any intensity gives the same sigma
    // Products w_kij = x_ki x_kj: sum_k w_kij^2 is the Gram matrix of the
    // squared observations and w_bar_ij = (n - 1) / n * s_ij.
    const Eigen::MatrixXd sq = centered.array().square().matrix();
    Eigen::MatrixXd w2 = Eigen::MatrixXd::Zero(p, p);
    w2.selfadjointView<Eigen::Lower>().rankUpdate(sq.transpose());
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = j + 1; i < p; ++i) {
            const double wbar = (n - 1.0) / n * s(i, j);
            const double ss = std::max(0.0, w2(i, j) - n * wbar * wbar);
            num += n / ((n - 1.0) * (n - 1.0) * (n - 1.0)) * ss;
            den += s(i, j) * s(i, j);
        }
    }
    if (den <= 0.0) return 1.0;
    return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

double shrinkage_intensity(const Eigen::MatrixXd& centered) {
    if (centered.rows() < 2) throw Error("shrink_covariance: need at least two samples");
    return shrinkage_from(centered, sample_covariance(centered));
}

ShrunkCovariance shrink_covariance(const Eigen::MatrixXd& centered, std::optional<double> forced_lambda) {
    if (centered.rows() < 2) throw Error("shrink_covariance: need at least two samples");
    if (centered.cols() < 1) throw Error("shrink_covariance: need at least one feature");
    Eigen::MatrixXd s = sample_covariance(centered);
    double lambda = forced_lambda ? *forced_lambda : shrinkage_from(centered, s);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("shrink_covariance: intensity outside [0, 1]");
    ShrunkCovariance out;
    out.lambda = lambda;
    out.sigma = (1.0 - lambda) * s;
    out.sigma.diagonal() = s.diagonal();
    return out;
}

void LdaModel::finalize() {
    const auto p = mu_relevant.size();
    if (p == 0 || mu_irrelevant.size() != p || sigma.rows() != p || sigma.cols() != p) {
        throw Error("lda: inconsistent model dimensions");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw Error("lda: covariance is not positive definite");
    weights_ = llt.solve(mu_relevant - mu_irrelevant);
    bias_ = -0.5 * weights_.dot(mu_relevant + mu_irrelevant) + std::log(prior_relevant / prior_irrelevant);
}

double LdaModel::decision(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) {
        throw Error("lda: feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(dim()));
    }
    return weights_.dot(x) + bias_;
}

namespace {

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double LdaModel::predict_proba(const Eigen::Ref<const Eigen::VectorXd>& x) const { return logistic(decision(x)); }

double LdaModel::predict_proba_irrelevant(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return logistic(-decision(x));
}

Eigen::VectorXd LdaModel::predict_proba_rows(const Eigen::MatrixXd& rows) const {
    if (static_cast<std::size_t>(rows.cols()) != dim()) throw Error("lda: feature matrix width mismatch");
    Eigen::VectorXd z = rows * weights_;
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = logistic(z[k] + bias_);
    return z;
}

LdaModel train(const Eigen::MatrixXd& features, std::span<const eeg::Label> labels, const TrainOptions& options) {
    if (static_cast<std::size_t>(features.rows()) != labels.size()) {
        throw Error("lda: feature rows and labels differ in count");
    }
    const auto p = features.cols();
    Eigen::VectorXd sum_rel = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd sum_irr = Eigen::VectorXd::Zero(p);
    Eigen::Index n_rel = 0;
    Eigen::Index n_irr = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto row = features.row(static_cast<Eigen::Index>(k)).transpose();
        if (labels[k] == eeg::Label::relevant) {
            sum_rel += row;
            ++n_rel;
        } else if (labels[k] == eeg::Label::irrelevant) {
            sum_irr += row;
            ++n_irr;
        }
    }
    if (n_rel == 0 || n_irr == 0) throw Error("degenerate training set");

    LdaModel m;
    m.mu_relevant = sum_rel / static_cast<double>(n_rel);
    m.mu_irrelevant = sum_irr / static_cast<double>(n_irr);
    Eigen::MatrixXd resid(n_rel + n_irr, p);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto row = features.row(static_cast<Eigen::Index>(k));
        if (labels[k] == eeg::Label::relevant) {
            resid.row(r++) = row - m.mu_relevant.transpose();
        } else if (labels[k] == eeg::Label::irrelevant) {
            resid.row(r++) = row - m.mu_irrelevant.transpose();
        }
    }
    auto shrunk = shrink_covariance(resid, options.shrinkage);
    m.sigma = std::move(shrunk.sigma);
    m.lambda = shrunk.lambda;
    const double n = static_cast<double>(n_rel + n_irr);
    m.prior_relevant = static_cast<double>(n_rel) / n;
    m.prior_irrelevant = static_cast<double>(n_irr) / n;
    m.finalize();
    return m;
}

eeg::Label binarize(double p) { return p > 0.5 ? eeg::Label::relevant : eeg::Label::irrelevant; }

// ---------------------------------------------------------------------------

namespace {

void put_vec(std::ostringstream& out, const char* key, const Eigen::VectorXd& v) {
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << io::format_double(v[i]);
    out << '\n';
}

double parse_double(const std::string& tok) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) throw Error("lda model: bad number '" + tok + "'");
    return v;
}

std::istringstream expect_line(std::istringstream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line)) throw Error("lda model: missing '" + key + "' line");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key) throw Error("lda model: expected '" + key + "', found '" + k + "'");
    return ls;
}

Eigen::VectorXd read_vec(std::istringstream& in, const std::string& key, Eigen::Index n) {
    auto ls = expect_line(in, key);
    Eigen::VectorXd v(n);
    std::string tok;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(ls >> tok)) throw Error("lda model: '" + key + "' is short");
        v[i] = parse_double(tok);
    }
    if (ls >> tok) throw Error("lda model: '" + key + "' is long");
    return v;
}

double read_scalar(std::istringstream& in, const std::string& key) {
    auto ls = expect_line(in, key);
    std::string tok;
    if (!(ls >> tok)) throw Error("lda model: '" + key + "' has no value");
    return parse_double(tok);
}

}  // namespace

std::string LdaModel::serialize() const {
    std::ostringstream out;
    out << "brainrel-lda 1\n";
    out << "dim " << dim() << '\n';
    out << "lambda " << io::format_double(lambda) << '\n';
    out << "prior_relevant " << io::format_double(prior_relevant) << '\n';
    out << "prior_irrelevant " << io::format_double(prior_irrelevant) << '\n';
    put_vec(out, "mu_relevant", mu_relevant);
    put_vec(out, "mu_irrelevant", mu_irrelevant);
    for (Eigen::Index i = 0; i < sigma.rows(); ++i) put_vec(out, "sigma", sigma.row(i).transpose());
    return out.str();
}

LdaModel LdaModel::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    if (header != "brainrel-lda 1") throw Error("lda model: unsupported header '" + header + "'");
    auto dl = expect_line(in, "dim");
    long long p = 0;
    if (!(dl >> p) || p <= 0) throw Error("lda model: bad dimension");
    LdaModel m;
    m.lambda = read_scalar(in, "lambda");
    m.prior_relevant = read_scalar(in, "prior_relevant");
    m.prior_irrelevant = read_scalar(in, "prior_irrelevant");
    m.mu_relevant = read_vec(in, "mu_relevant", p);
    m.mu_irrelevant = read_vec(in, "mu_irrelevant", p);
    m.sigma.resize(p, p);
    for (long long i = 0; i < p; ++i) m.sigma.row(i) = read_vec(in, "sigma", p).transpose();
    m.finalize();
    return m;
}

void LdaModel::save(const std::filesystem::path& path) const { io::write_file_atomic(path, serialize()); }

LdaModel LdaModel::load(const std::filesystem::path& path) {
    try {
        return deserialize(io::read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace brainrel::classifier
