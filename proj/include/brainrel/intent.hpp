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

namespace brainrel::intent {

struct WordPrediction {
    std::string word;
    double probability = 0.0;
};

struct FeedbackEntry {
    std::size_t term = 0;  // vocabulary index
    double score = 0.0;    // in [0, 1]
};

struct Feedback {
    std::vector<FeedbackEntry> entries;  // sorted by term, one per term
    std::vector<std::string> warnings;

    bool empty() const { return entries.empty(); }
};

/// Words predicted relevant (p > 0.5) mapped to vocabulary terms; repeated
/// terms keep their highest probability. Words without an indexed term are
/// dropped, with a warning when the term is simply missing from the index.
Feedback assemble_feedback(std::span<const WordPrediction> predictions, const corpus::TermDocumentMatrix& index);

/// Every read term with its raw (max) probability; used when no prediction
/// clears the threshold.
Feedback fallback_feedback(std::span<const WordPrediction> predictions, const corpus::TermDocumentMatrix& index);

struct IntentParams {
    double lambda = 0.5;
    double c = 2.0;
};

struct IntentModel {
    std::vector<double> w;  // one score per vocabulary term
    double lambda = 0.5;
    double c = 2.0;
};

/// LinRel upper-confidence scores for every vocabulary term:
///   a_i = k_i K_t^T (K_t K_t^T + lambda I)^-1,   w_i = a_i . s + (c / 2) |a_i|
/// where K_t holds the tf-idf rows of the feedback terms and s their scores.
/// This equals k_i (K_t^T K_t + lambda I)^-1 K_t^T but only needs a
/// |feedback| × |feedback| factorization.
IntentModel linrel_score(const Feedback& feedback, const corpus::TermDocumentMatrix& index,
                         const IntentParams& params = {});

struct QueryTerm {
    std::size_t term = 0;
    double weight = 0.0;
};

/// Up to m_terms terms with positive score, highest first; equal scores are
/// ordered by the term string. Throws if no score is positive.
std::vector<QueryTerm> select_query(const IntentModel& model, const corpus::TermDocumentMatrix& index,
                                    std::size_t m_terms);

/// "term<TAB>weight" per line, descending weight.
std::string intent_dump(const IntentModel& model, const corpus::TermDocumentMatrix& index);

}  // namespace brainrel::intent
