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

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brainrel/classifier.hpp"
#include "brainrel/corpus.hpp"
#include "brainrel/eeg.hpp"
#include "brainrel/intent.hpp"
#include "brainrel/retrieval.hpp"

namespace brainrel::evaluation {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Mann-Whitney formulation, ties count one half. Throws unless both
/// classes occur among the labeled entries (unlabeled ones are skipped).
double auc(std::span<const double> scores, std::span<const eeg::Label> labels);

/// tp / (tp + fp); nullopt when nothing was predicted relevant.
std::optional<double> precision(std::span<const eeg::Label> predicted, std::span<const eeg::Label> truth);

/// (w_tp * tp) / (w_tp * tp + w_fp * fp) where w_tp and w_fp sum the
/// per-word weights of the true and false positives. nullopt when nothing
/// was predicted relevant or the denominator vanishes.
std::optional<double> weighted_precision(std::span<const eeg::Label> predicted, std::span<const eeg::Label> truth,
                                         std::span<const double> weights);

struct DocumentJudgments {
    std::string topic;                  // id of the topic's source document
    std::map<std::string, int> scores;  // doc id -> 0..3
};

/// Sum of the judged scores of the first `depth` ranked documents;
/// unjudged documents count 0.
double cumulative_gain(const retrieval::RankedList& ranked, const DocumentJudgments& judgments,
                       const corpus::TermDocumentMatrix& index, std::size_t depth);

// ---------------------------------------------------------------------------
// Protocol
// ---------------------------------------------------------------------------

struct ExperimentBlock {
    int id = 0;
    std::string relevant_doc;
    std::string irrelevant_doc;
    std::vector<eeg::Epoch> epochs;
};

struct ParticipantData {
    std::string participant;
    double fs = 0.0;
    std::vector<std::string> channels;
    std::vector<ExperimentBlock> blocks;
    std::map<std::string, DocumentJudgments> judgments;  // keyed by topic

    const DocumentJudgments& judgments_for(const ExperimentBlock& b) const;
};

struct PipelineParams {
    classifier::TrainOptions classifier;
    intent::IntentParams intent;
    std::size_t m_terms = 30;
    double mu = retrieval::kDefaultMu;
    std::size_t depth = retrieval::kDefaultDepth;
    std::size_t permutations = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Everything produced for one held-out block.
struct BlockOutcome {
    int block = 0;
    std::vector<double> probabilities;  // per epoch of the block
    std::optional<double> auc;
    std::optional<double> precision;
    std::optional<double> weighted_precision_rel;
    std::optional<double> weighted_precision_irr;
    bool fallback_feedback = false;
    std::vector<intent::QueryTerm> query;
    retrieval::RankedList ranked;
    double cg10 = 0.0;
    double cg20 = 0.0;
    double cg30 = 0.0;
    std::optional<double> p_class;
    std::optional<double> p_retrieval;
};

struct ParticipantOutcome {
    std::string participant;
    std::vector<BlockOutcome> blocks;
    std::optional<double> mean_auc;
    double mean_cg30 = 0.0;
    // Participant-level p-values on the block means; the AUC null relabels every
    // block (training and held-out) and reruns the whole leave-one-block-out.
    std::optional<double> p_class;
    std::optional<double> p_retrieval;
    std::vector<double> null_mean_auc;
    std::vector<double> null_mean_cg30;
};

/// Precomputed features per block; reused across folds and permutations.
class PreparedParticipant {
public:
    PreparedParticipant(const ParticipantData& data, const corpus::TermDocumentMatrix& index);

    const ParticipantData& data() const { return *data_; }
    const corpus::TermDocumentMatrix& index() const { return *index_; }
    std::size_t num_blocks() const { return features_.size(); }
    std::size_t block_position(int block_id) const;
    const eeg::FeatureMatrix& features(std::size_t b) const { return features_[b]; }

    /// Stacked features and labels of every block except `held_out`.
    void training_set(std::size_t held_out, Eigen::MatrixXd& x, std::vector<eeg::Label>& labels) const;

    /// Predicts block `b` with `model` and runs metrics, intent and retrieval.
    BlockOutcome evaluate_block(std::size_t b, const classifier::LdaModel& model, const PipelineParams& params) const;

    /// Ranking statistics only (no classification metrics), for null runs.
    double retrieval_cg(std::size_t b, std::span<const double> probabilities, const PipelineParams& params,
                        std::size_t depth) const;

private:
    const ParticipantData* data_;
    const corpus::TermDocumentMatrix* index_;
    std::vector<eeg::FeatureMatrix> features_;
};

/// Train on all blocks but b, evaluate on b, for every b. p-values are left empty.
std::vector<BlockOutcome> leave_one_block_out(const PreparedParticipant& prepared, const PipelineParams& params);

struct PermutationResult {
    double observed = 0.0;
    std::optional<double> p;
    std::vector<double> null;
};

/// Training labels permuted within each block, `permutations` times; AUC on the held-out block's
/// true labels. p = (#{null >= observed} + 1) / (k + 1).
PermutationResult permutation_test_classification(const PreparedParticipant& prepared, int block_id,
                                                  const PipelineParams& params);

/// Same permutations, statistic CG@depth of the retrieved list.
PermutationResult permutation_test_retrieval(const PreparedParticipant& prepared, int block_id,
                                             const PipelineParams& params);

/// Leave-one-block-out plus both permutation tests for every block and for
/// the participant-level block means, sharing one set of null trainings.
ParticipantOutcome evaluate_participant(const PreparedParticipant& prepared, const PipelineParams& params);

double permutation_p(double observed, std::span<const double> null);

/// Runs fn(i) for i in [0, n) on `threads` workers; each index exactly once.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace brainrel::evaluation
