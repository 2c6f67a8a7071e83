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

#include "brainrel/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "brainrel/error.hpp"
#include "brainrel/rng.hpp"
#include "brainrel/stats.hpp"

namespace brainrel::evaluation {

using eeg::Label;

double auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw Error("auc: scores and labels differ in length");
    std::vector<double> s;
    std::vector<bool> pos;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (labels[k] == Label::unlabeled) continue;
        s.push_back(scores[k]);
        pos.push_back(labels[k] == Label::relevant);
    }
    const auto n_pos = static_cast<double>(std::count(pos.begin(), pos.end(), true));
    const auto n_neg = static_cast<double>(pos.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) throw Error("auc: both classes are required");
    const auto ranks = stats::midranks(s);
    double r = 0.0;
    for (std::size_t k = 0; k < ranks.size(); ++k)
        if (pos[k]) r += ranks[k];
    return (r - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::optional<double> precision(std::span<const Label> predicted, std::span<const Label> truth) {
    if (predicted.size() != truth.size()) throw Error("precision: length mismatch");
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        if (predicted[k] != Label::relevant) continue;
        if (truth[k] == Label::relevant) {
            ++tp;
        } else if (truth[k] == Label::irrelevant) {
            ++fp;
        }
    }
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> weighted_precision(std::span<const Label> predicted, std::span<const Label> truth,
                                         std::span<const double> weights) {
    if (predicted.size() != truth.size() || weights.size() != truth.size()) {
        throw Error("weighted_precision: length mismatch");
    }
    double tp = 0.0;
    double fp = 0.0;
    double w_tp = 0.0;
    double w_fp = 0.0;
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        if (predicted[k] != Label::relevant) continue;
        if (truth[k] == Label::relevant) {
            tp += 1.0;
            w_tp += weights[k];
        } else if (truth[k] == Label::irrelevant) {
            fp += 1.0;
            w_fp += weights[k];
        }
    }
    if (tp + fp == 0.0) return std::nullopt;
    const double den = w_tp * tp + w_fp * fp;
    if (den == 0.0) return std::nullopt;
    return w_tp * tp / den;
}

double cumulative_gain(const retrieval::RankedList& ranked, const DocumentJudgments& judgments,
                       const corpus::TermDocumentMatrix& index, std::size_t depth) {
    double cg = 0.0;
    const std::size_t n = std::min(depth, ranked.entries.size());
    for (std::size_t r = 0; r < n; ++r) {
        auto it = judgments.scores.find(index.doc_id(ranked.entries[r].doc));
        if (it != judgments.scores.end()) cg += it->second;
    }
    return cg;
}

double permutation_p(double observed, std::span<const double> null) {
    const auto ge = std::count_if(null.begin(), null.end(), [&](double v) { return v >= observed; });
    return (static_cast<double>(ge) + 1.0) / (static_cast<double>(null.size()) + 1.0);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------

const DocumentJudgments& ParticipantData::judgments_for(const ExperimentBlock& b) const {
    static const DocumentJudgments kEmpty;
    auto it = judgments.find(b.relevant_doc);
    return it == judgments.end() ? kEmpty : it->second;
}

PreparedParticipant::PreparedParticipant(const ParticipantData& data, const corpus::TermDocumentMatrix& index)
    : data_(&data), index_(&index) {
    if (data.blocks.size() < 2) throw Error("leave-one-block-out needs at least two blocks");
    for (const auto& b : data.blocks) {
        index.require_doc(b.relevant_doc);
        index.require_doc(b.irrelevant_doc);
        features_.push_back(eeg::extract_features(b.epochs, data.fs));
        if (b.epochs.empty()) throw Error("block " + std::to_string(b.id) + " has no epochs");
    }
}

std::size_t PreparedParticipant::block_position(int block_id) const {
    for (std::size_t b = 0; b < data_->blocks.size(); ++b)
        if (data_->blocks[b].id == block_id) return b;
    throw Error("unknown block " + std::to_string(block_id));
}

void PreparedParticipant::training_set(std::size_t held_out, Eigen::MatrixXd& x, std::vector<Label>& labels) const {
    Eigen::Index rows = 0;
    Eigen::Index cols = features_.front().x.cols();
    for (std::size_t b = 0; b < features_.size(); ++b) {
        if (b == held_out) continue;
        for (auto l : features_[b].labels) rows += l != Label::unlabeled;
    }
    x.resize(rows, cols);
    labels.clear();
    labels.reserve(static_cast<std::size_t>(rows));
    Eigen::Index r = 0;
    for (std::size_t b = 0; b < features_.size(); ++b) {
        if (b == held_out) continue;
        const auto& f = features_[b];
        if (f.x.cols() != cols) throw Error("blocks differ in feature width");
        for (std::size_t k = 0; k < f.labels.size(); ++k) {
            if (f.labels[k] == Label::unlabeled) continue;
            x.row(r++) = f.x.row(static_cast<Eigen::Index>(k));
            labels.push_back(f.labels[k]);
        }
    }
}

namespace {

struct RetrievalRun {
    bool fallback = false;
    std::vector<intent::QueryTerm> query;
    retrieval::RankedList ranked;
};

RetrievalRun run_retrieval(const ExperimentBlock& block, std::span<const double> probabilities,
                           const corpus::TermDocumentMatrix& index, const PipelineParams& params) {
    std::vector<intent::WordPrediction> preds;
    preds.reserve(block.epochs.size());
    for (std::size_t k = 0; k < block.epochs.size(); ++k) preds.push_back({block.epochs[k].word, probabilities[k]});
    RetrievalRun run;
    auto fb = intent::assemble_feedback(preds, index);
    if (fb.empty()) {
        fb = intent::fallback_feedback(preds, index);
        run.fallback = true;
    }
    if (fb.empty()) return run;
    const auto model = intent::linrel_score(fb, index, params.intent);
    try {
        run.query = intent::select_query(model, index, params.m_terms);
    } catch (const Error&) {
        return run;  // nothing positive to search for: empty list, zero gain
    }
    run.ranked = retrieval::rank(run.query, index, params.depth, params.mu);
    return run;
}

}  // namespace

double PreparedParticipant::retrieval_cg(std::size_t b, std::span<const double> probabilities,
                                         const PipelineParams& params, std::size_t depth) const {
    const auto& block = data_->blocks.at(b);
    const auto run = run_retrieval(block, probabilities, *index_, params);
    return cumulative_gain(run.ranked, data_->judgments_for(block), *index_, depth);
}

BlockOutcome PreparedParticipant::evaluate_block(std::size_t b, const classifier::LdaModel& model,
                                                 const PipelineParams& params) const {
    const auto& block = data_->blocks.at(b);
    const auto& f = features_.at(b);
    BlockOutcome out;
    out.block = block.id;
    const Eigen::VectorXd p = model.predict_proba_rows(f.x);
    out.probabilities.assign(p.data(), p.data() + p.size());

    const bool has_rel = std::count(f.labels.begin(), f.labels.end(), Label::relevant) > 0;
    const bool has_irr = std::count(f.labels.begin(), f.labels.end(), Label::irrelevant) > 0;
    if (has_rel && has_irr) out.auc = auc(out.probabilities, f.labels);

    std::vector<Label> predicted;
    std::vector<double> w_rel;
    std::vector<double> w_irr;
    for (std::size_t k = 0; k < block.epochs.size(); ++k) {
        predicted.push_back(classifier::binarize(out.probabilities[k]));
        w_rel.push_back(index_->word_tfidf(block.epochs[k].word, block.relevant_doc));
        w_irr.push_back(index_->word_tfidf(block.epochs[k].word, block.irrelevant_doc));
    }
    out.precision = precision(predicted, f.labels);
    out.weighted_precision_rel = weighted_precision(predicted, f.labels, w_rel);
    out.weighted_precision_irr = weighted_precision(predicted, f.labels, w_irr);

    auto run = run_retrieval(block, out.probabilities, *index_, params);
    out.fallback_feedback = run.fallback;
    out.query = std::move(run.query);
    out.ranked = std::move(run.ranked);
    const auto& judg = data_->judgments_for(block);
    out.cg10 = cumulative_gain(out.ranked, judg, *index_, 10);
    out.cg20 = cumulative_gain(out.ranked, judg, *index_, 20);
    out.cg30 = cumulative_gain(out.ranked, judg, *index_, 30);
    return out;
}

std::vector<BlockOutcome> leave_one_block_out(const PreparedParticipant& prepared, const PipelineParams& params) {
    const std::size_t n = prepared.num_blocks();
    std::vector<BlockOutcome> out(n);
    parallel_for(n, params.threads, [&](std::size_t b) {
        Eigen::MatrixXd x;
        std::vector<Label> labels;
        prepared.training_set(b, x, labels);
        const auto model = classifier::train(x, labels, params.classifier);
        out[b] = prepared.evaluate_block(b, model, params);
    });
    return out;
}

namespace {

struct NullSample {
    std::optional<double> auc;              // held-out block scored on its true labels
    std::optional<double> auc_relabelled;   // held-out block scored on its permuted labels
    double cg = 0.0;
};

// Labels of block c under permutation i: shuffled among its labeled epochs
// with a stream keyed by the block, so every fold of one permutation sees the
// same relabelling.
std::vector<Label> permuted_block_labels(const PreparedParticipant& prepared, std::size_t c, std::size_t i,
                                         std::uint64_t seed) {
    std::vector<Label> labels = prepared.features(c).labels;
    std::vector<Label> labeled;
    for (auto l : labels) {
        if (l != Label::unlabeled) labeled.push_back(l);
    }
    const int id = prepared.data().blocks[c].id;
    Rng rng(derive_seed(seed, "permutation", static_cast<std::uint64_t>(id), i));
    std::shuffle(labeled.begin(), labeled.end(), rng);
    std::size_t k = 0;
    for (auto& l : labels) {
        if (l != Label::unlabeled) l = labeled[k++];
    }
    return labels;
}

// One permuted-label training for block b, permutation i.
NullSample null_sample(const PreparedParticipant& prepared, std::size_t b, std::size_t i,
                       const Eigen::MatrixXd& x, const PipelineParams& params) {
    std::vector<Label> permuted;
    for (std::size_t c = 0; c < prepared.num_blocks(); ++c) {
        if (c == b) continue;
        for (auto l : permuted_block_labels(prepared, c, i, params.seed)) {
            if (l != Label::unlabeled) permuted.push_back(l);
        }
    }
    const auto model = classifier::train(x, permuted, params.classifier);
    const auto& f = prepared.features(b);
    const Eigen::VectorXd p = model.predict_proba_rows(f.x);
    const std::vector<double> probs(p.data(), p.data() + p.size());
    NullSample s;
    const bool has_rel = std::count(f.labels.begin(), f.labels.end(), Label::relevant) > 0;
    const bool has_irr = std::count(f.labels.begin(), f.labels.end(), Label::irrelevant) > 0;
    if (has_rel && has_irr) {
        s.auc = auc(probs, f.labels);
        s.auc_relabelled = auc(probs, permuted_block_labels(prepared, b, i, params.seed));
    }
    s.cg = prepared.retrieval_cg(b, probs, params, 30);
    return s;
}

std::vector<NullSample> block_null(const PreparedParticipant& prepared, std::size_t b, const PipelineParams& params) {
    Eigen::MatrixXd x;
    std::vector<Label> labels;
    prepared.training_set(b, x, labels);
    std::vector<NullSample> out(params.permutations);
    parallel_for(params.permutations, params.threads,
                 [&](std::size_t i) { out[i] = null_sample(prepared, b, i, x, params); });
    return out;
}

}  // namespace

PermutationResult permutation_test_classification(const PreparedParticipant& prepared, int block_id,
                                                  const PipelineParams& params) {
    const std::size_t b = prepared.block_position(block_id);
    Eigen::MatrixXd x;
    std::vector<Label> labels;
    prepared.training_set(b, x, labels);
    const auto model = classifier::train(x, labels, params.classifier);
    const auto& f = prepared.features(b);
    const Eigen::VectorXd p = model.predict_proba_rows(f.x);
    PermutationResult res;
    const std::vector<double> probs(p.data(), p.data() + p.size());
    res.observed = auc(probs, f.labels);
    for (const auto& s : block_null(prepared, b, params)) res.null.push_back(*s.auc);
    res.p = permutation_p(res.observed, res.null);
    return res;
}

PermutationResult permutation_test_retrieval(const PreparedParticipant& prepared, int block_id,
                                             const PipelineParams& params) {
    const std::size_t b = prepared.block_position(block_id);
    Eigen::MatrixXd x;
    std::vector<Label> labels;
    prepared.training_set(b, x, labels);
    const auto model = classifier::train(x, labels, params.classifier);
    const auto& f = prepared.features(b);
    const Eigen::VectorXd p = model.predict_proba_rows(f.x);
    PermutationResult res;
    const std::vector<double> probs(p.data(), p.data() + p.size());
    res.observed = prepared.retrieval_cg(b, probs, params, 30);
    for (const auto& s : block_null(prepared, b, params)) res.null.push_back(s.cg);
    res.p = permutation_p(res.observed, res.null);
    return res;
}

ParticipantOutcome evaluate_participant(const PreparedParticipant& prepared, const PipelineParams& params) {
    ParticipantOutcome out;
    out.participant = prepared.data().participant;
    out.blocks = leave_one_block_out(prepared, params);
    const std::size_t n_blocks = prepared.num_blocks();
    const std::size_t k = params.permutations;

    std::vector<Eigen::MatrixXd> xs(n_blocks);
    std::vector<std::vector<Label>> ls(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) prepared.training_set(b, xs[b], ls[b]);

    std::vector<NullSample> nulls(n_blocks * k);
    parallel_for(n_blocks * k, params.threads, [&](std::size_t t) {
        const std::size_t b = t / k;
        const std::size_t i = t % k;
        nulls[t] = null_sample(prepared, b, i, xs[b], params);
    });

    double auc_sum = 0.0;
    std::size_t auc_blocks = 0;
    double cg_sum = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        auto& bo = out.blocks[b];
        std::vector<double> null_cg(k);
        for (std::size_t i = 0; i < k; ++i) null_cg[i] = nulls[b * k + i].cg;
        if (k > 0) bo.p_retrieval = permutation_p(bo.cg30, null_cg);
        cg_sum += bo.cg30;
        if (bo.auc) {
            std::vector<double> null_auc(k);
            for (std::size_t i = 0; i < k; ++i) null_auc[i] = *nulls[b * k + i].auc;
            if (k > 0) bo.p_class = permutation_p(*bo.auc, null_auc);
            auc_sum += *bo.auc;
            ++auc_blocks;
        }
    }
    out.mean_cg30 = cg_sum / static_cast<double>(n_blocks);
    if (auc_blocks > 0) out.mean_auc = auc_sum / static_cast<double>(auc_blocks);

    out.null_mean_auc.assign(k, 0.0);
    out.null_mean_cg30.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double a = 0.0;
        double c = 0.0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            if (out.blocks[b].auc) a += *nulls[b * k + i].auc_relabelled;
            c += nulls[b * k + i].cg;
        }
        out.null_mean_auc[i] = auc_blocks > 0 ? a / static_cast<double>(auc_blocks) : 0.0;
        out.null_mean_cg30[i] = c / static_cast<double>(n_blocks);
    }
    if (k > 0) {
        if (out.mean_auc) out.p_class = permutation_p(*out.mean_auc, out.null_mean_auc);
        out.p_retrieval = permutation_p(out.mean_cg30, out.null_mean_cg30);
    }
    return out;
}

}  // namespace brainrel::evaluation
