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

#include "brainrel/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "brainrel/error.hpp"

namespace brainrel::retrieval {

namespace {

void check_mu(double mu) {
    if (!(mu > 0.0)) throw Error("retrieval: mu must be positive");
}

}  // namespace

double smoothed_prob(std::size_t term, std::size_t doc, const corpus::TermDocumentMatrix& index, double mu) {
    check_mu(mu);
    if (doc >= index.num_docs()) throw Error("smoothed_prob: unknown document index " + std::to_string(doc));
    if (term >= index.num_terms()) throw Error("smoothed_prob: unknown term index " + std::to_string(term));
    const double c = index.count(term, doc);
    return (c + mu * index.collection_prob(term)) / (static_cast<double>(index.doc_length(doc)) + mu);
}

double score_document(std::span<const intent::QueryTerm> query, std::size_t doc,
                      const corpus::TermDocumentMatrix& index, double mu) {
    double s = 0.0;
    for (const auto& q : query) {
        if (q.weight == 0.0) continue;
        s += q.weight * std::log(smoothed_prob(q.term, doc, index, mu));
    }
    return s;
}

std::vector<double> score_all(std::span<const intent::QueryTerm> query, const corpus::TermDocumentMatrix& index,
                              double mu) {
    check_mu(mu);
    const std::size_t n = index.num_docs();
    // Every document starts from the zero-count score; postings then add
    // w_i ln(1 + c / (mu p_i)).
    double base = 0.0;
    double total_weight = 0.0;
    for (const auto& q : query) {
        if (q.term >= index.num_terms()) throw Error("score_all: unknown term index");
        if (q.weight == 0.0) continue;
        base += q.weight * std::log(mu * index.collection_prob(q.term));
        total_weight += q.weight;
    }
    std::vector<double> scores(n);
    for (std::size_t j = 0; j < n; ++j) {
        scores[j] = base - total_weight * std::log(static_cast<double>(index.doc_length(j)) + mu);
    }
    for (const auto& q : query) {
        if (q.weight == 0.0) continue;
        const double mp = mu * index.collection_prob(q.term);
        for (const auto& p : index.term_row(q.term)) {
            scores[p.index] += q.weight * std::log1p(static_cast<double>(p.count) / mp);
        }
    }
    return scores;
}

RankedList rank(std::span<const intent::QueryTerm> query, const corpus::TermDocumentMatrix& index, std::size_t k,
                double mu) {
    if (index.num_docs() == 0) throw Error("rank: empty corpus");
    if (query.empty()) throw Error("rank: empty query");
    const auto scores = score_all(query, index, mu);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return index.doc_id(a) < index.doc_id(b);
    };
    const std::size_t depth = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(depth), order.end(), better);
    RankedList out;
    out.k = k;
    for (std::size_t r = 0; r < depth; ++r) out.entries.push_back({order[r], scores[order[r]]});
    return out;
}

std::string ranked_jsonl(const RankedList& list, const corpus::TermDocumentMatrix& index) {
    std::string out;
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
        const auto& e = list.entries[r];
        nlohmann::ordered_json j = {{"rank", r + 1},
                                    {"doc_id", index.doc_id(e.doc)},
                                    {"title", index.doc_title(e.doc)},
                                    {"score", e.score}};
        out += j.dump() + '\n';
    }
    return out;
}

}  // namespace brainrel::retrieval
