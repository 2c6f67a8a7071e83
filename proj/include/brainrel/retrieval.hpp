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
#include <string>
#include <vector>

#include "brainrel/corpus.hpp"
#include "brainrel/intent.hpp"

namespace brainrel::retrieval {

inline constexpr double kDefaultMu = 2000.0;
inline constexpr std::size_t kDefaultDepth = 30;

struct RankedEntry {
    std::size_t doc = 0;  // document index
    double score = 0.0;   // log query likelihood
};

struct RankedList {
    std::vector<RankedEntry> entries;  // descending score, ties by doc id
    std::size_t k = kDefaultDepth;
};

/// Dirichlet-smoothed document language model:
///   (c(i|d) + mu p(i|C)) / (|d| + mu)
double smoothed_prob(std::size_t term, std::size_t doc, const corpus::TermDocumentMatrix& index,
                     double mu = kDefaultMu);

/// sum_i w_i ln smoothed_prob(i, doc), i.e. the log of the weighted
/// query likelihood with real-valued exponents.
double score_document(std::span<const intent::QueryTerm> query, std::size_t doc,
                      const corpus::TermDocumentMatrix& index, double mu = kDefaultMu);

/// Scores every document term-at-a-time; entry j is document j.
std::vector<double> score_all(std::span<const intent::QueryTerm> query, const corpus::TermDocumentMatrix& index,
                              double mu = kDefaultMu);

RankedList rank(std::span<const intent::QueryTerm> query, const corpus::TermDocumentMatrix& index,
                std::size_t k = kDefaultDepth, double mu = kDefaultMu);

/// One JSON object per line: rank (1-based), doc_id, title, score.
std::string ranked_jsonl(const RankedList& list, const corpus::TermDocumentMatrix& index);

}  // namespace brainrel::retrieval
