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

#include "brainrel/intent.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "brainrel/error.hpp"
#include "brainrel/io.hpp"
#include "brainrel/kernels.hpp"
#include "brainrel/text.hpp"

namespace brainrel::intent {

namespace {

Feedback collect(std::span<const WordPrediction> predictions, const corpus::TermDocumentMatrix& index,
                 bool threshold) {
    Feedback fb;
    std::map<std::size_t, double> best;
    for (const auto& p : predictions) {
        if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
            throw Error("feedback: probability for '" + p.word + "' outside [0, 1]");
        }
        if (threshold && !(p.probability > 0.5)) continue;
        const auto term = text::term_of_word(p.word);
        if (!term) continue;
        const auto i = index.term_index(*term);
        if (!i) {
            fb.warnings.push_back("term '" + *term + "' (word '" + p.word + "') is not in the index; dropped");
            continue;
        }
        auto [it, inserted] = best.emplace(*i, p.probability);
        if (!inserted) it->second = std::max(it->second, p.probability);
    }
    for (const auto& [i, s] : best) fb.entries.push_back({i, s});
    return fb;
}

}  // namespace

Feedback assemble_feedback(std::span<const WordPrediction> predictions, const corpus::TermDocumentMatrix& index) {
    return collect(predictions, index, true);
}

Feedback fallback_feedback(std::span<const WordPrediction> predictions, const corpus::TermDocumentMatrix& index) {
    return collect(predictions, index, false);
}

IntentModel linrel_score(const Feedback& feedback, const corpus::TermDocumentMatrix& index,
                         const IntentParams& params) {
    if (feedback.empty()) throw Error("no positive terms");
    if (!(params.lambda > 0.0)) throw Error("linrel: lambda must be positive");
    const auto f = static_cast<Eigen::Index>(feedback.entries.size());
    const std::size_t n_terms = index.num_terms();

    // Documents touched by any feedback row; other columns of K_t are zero
    // and drop out of both K_t K_t^T and K_t k_i^T.
    std::map<std::size_t, Eigen::Index> cols;
    for (const auto& e : feedback.entries) {
        if (e.term >= n_terms) throw Error("linrel: feedback term index out of range");
        for (const auto& p : index.term_row(e.term)) cols.emplace(p.index, 0);
    }
    Eigen::Index next = 0;
    for (auto& [doc, col] : cols) col = next++;

    Eigen::MatrixXd kt = Eigen::MatrixXd::Zero(f, next);
    Eigen::VectorXd s(f);
    for (Eigen::Index a = 0; a < f; ++a) {
        const auto& e = feedback.entries[static_cast<std::size_t>(a)];
        s[a] = e.score;
        for (const auto& p : index.term_row(e.term)) kt(a, cols.at(p.index)) = p.weight;
    }

    Eigen::MatrixXd gram = kt * kt.transpose();
    gram.diagonal().array() += params.lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) throw Error("linrel: regularized Gram matrix is not positive definite");

    // B(:, i) = K_t k_i^T, accumulated document by document.
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(f, static_cast<Eigen::Index>(n_terms));
    for (const auto& [doc, col] : cols) {
        const Eigen::VectorXd kcol = kt.col(col);
        for (const auto& p : index.doc_column(doc)) {
            b.col(static_cast<Eigen::Index>(p.index)) += p.weight * kcol;
        }
    }
    const Eigen::MatrixXd a = llt.solve(b);

    IntentModel model;
    model.lambda = params.lambda;
    model.c = params.c;
    model.w.resize(n_terms);
    const std::span<const double> sv(s.data(), static_cast<std::size_t>(f));
    for (std::size_t i = 0; i < n_terms; ++i) {
        const std::span<const double> ai(a.col(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(f));
        model.w[i] = kernels::dot(ai, sv) + params.c / 2.0 * std::sqrt(kernels::dot(ai, ai));
    }
    return model;
}

std::vector<QueryTerm> select_query(const IntentModel& model, const corpus::TermDocumentMatrix& index,
                                    std::size_t m_terms) {
    if (model.w.size() != index.num_terms()) throw Error("select_query: model does not match the index");
    std::vector<QueryTerm> pos;
    for (std::size_t i = 0; i < model.w.size(); ++i) {
        if (!std::isfinite(model.w[i])) throw Error("select_query: non-finite intent score");
        if (model.w[i] > 0.0) pos.push_back({i, model.w[i]});
    }
    if (pos.empty()) throw Error("select_query: no term has a positive intent score");
    std::sort(pos.begin(), pos.end(), [&](const QueryTerm& x, const QueryTerm& y) {
        if (x.weight != y.weight) return x.weight > y.weight;
        return index.term(x.term) < index.term(y.term);
    });
    if (pos.size() > m_terms) pos.resize(m_terms);
    return pos;
}

std::string intent_dump(const IntentModel& model, const corpus::TermDocumentMatrix& index) {
    std::vector<std::size_t> order(model.w.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (model.w[x] != model.w[y]) return model.w[x] > model.w[y];
        return index.term(x) < index.term(y);
    });
    std::string out;
    for (auto i : order) out += index.term(i) + '\t' + io::format_double(model.w[i]) + '\n';
    return out;
}

}  // namespace brainrel::intent
