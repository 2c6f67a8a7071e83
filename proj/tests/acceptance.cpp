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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "brainrel/classifier.hpp"
#include "brainrel/corpus.hpp"
#include "brainrel/evaluation.hpp"
#include "brainrel/intent.hpp"
#include "brainrel/io.hpp"
#include "brainrel/pipeline.hpp"
#include "brainrel/retrieval.hpp"
#include "brainrel/simulator.hpp"
#include "brainrel/stats.hpp"

using namespace brainrel;
using eeg::Label;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

corpus::TermDocumentMatrix index_of(const std::vector<std::pair<std::string, std::string>>& docs) {
    std::vector<corpus::Document> d;
    for (const auto& [id, text] : docs) d.push_back({id, id, text});
    return corpus::TermDocumentMatrix::build(d);
}

// ---------------------------------------------------------------------------

Verdict formulas() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr Label R = Label::relevant, I = Label::irrelevant;

    const std::vector<Label> truth = {R, R, R, I};
    const std::vector<Label> all_rel = {R, R, R, R};
    v.require(rel_err(*evaluation::precision(all_rel, truth), 0.75) < 1e-9, "precision tp=3 fp=1");
    const std::vector<Label> pred2 = {R, R};
    const std::vector<Label> truth2 = {R, I};
    v.require(rel_err(*evaluation::weighted_precision(pred2, truth2, std::vector<double>{5.0, 1.0}), 5.0 / 6.0) < 1e-9,
              "weighted precision 5/6");
    v.require(*evaluation::weighted_precision(pred2, truth2, std::vector<double>{5.0, 0.0}) == 1.0,
              "weighted precision w_fp=0");
    v.require(*evaluation::weighted_precision(pred2, truth2, std::vector<double>{0.0, 1.0}) == 0.0,
              "weighted precision w_tp=0");

    const auto cg_index = index_of({{"a", "atom"}, {"b", "bank"}, {"c", "money"}});
    retrieval::RankedList list;
    for (std::size_t j = 0; j < 3; ++j) list.entries.push_back({j, 0.0});
    v.require(evaluation::cumulative_gain(list, {"a", {{"a", 3}, {"b", 2}, {"c", 0}}}, cg_index, 3) == 5.0, "CG 3,2,0");

    std::string d1, d2;
    for (int k = 0; k < 100; ++k) d1 += "alpha ";
    for (int k = 0; k < 98; ++k) d2 += "alpha ";
    d2 += "beta beta";
    const auto lm = index_of({{"d1", d1}, {"d2", d2}});
    v.require(rel_err(retrieval::smoothed_prob(*lm.term_index("beta"), 0, lm, 2000.0), 20.0 / 2100.0) < 1e-9,
              "Dirichlet 20/2100");
    const auto with_empty = index_of({{"d1", "atom money"}, {"d2", "the of"}});
    v.require(rel_err(retrieval::smoothed_prob(0, 1, with_empty), with_empty.collection_prob(0)) < 1e-9,
              "Dirichlet empty document");

    // Unit weight in one document: scale lambda by the squared tf-idf of a lone term.
    const auto lr = index_of({{"d1", "atom"}, {"d2", "money"}});
    const double k2 = std::pow(lr.tfidf(*lr.term_index("atom"), 0), 2);
    intent::Feedback fb;
    fb.entries.push_back({*lr.term_index("atom"), 1.0});
    const auto m = intent::linrel_score(fb, lr, {.lambda = 0.5 * k2, .c = 2.0});
    v.require(rel_err(m.w[*lr.term_index("atom")], 4.0 / 3.0) < 1e-9, "LinRel 4/3");
    v.require(m.w[*lr.term_index("monei")] == 0.0, "LinRel orthogonal term");

    const auto three = index_of({{"d1", "atom atom nucleus"}, {"d2", "nucleus money"}, {"d3", "money bank bank"}});
    intent::Feedback fb3;
    fb3.entries = {{*three.term_index("atom"), 0.9}, {*three.term_index("nucleu"), 0.7}};
    const auto m3 = intent::linrel_score(fb3, three);
    v.require(rel_err(m3.w[*three.term_index("atom")], 1.7772040735444965) < 1e-9 &&
                  rel_err(m3.w[*three.term_index("monei")], 0.3780709493657348) < 1e-9 &&
                  rel_err(m3.w[*three.term_index("nucleu")], 0.5875663581721832) < 1e-9 &&
                  m3.w[*three.term_index("bank")] == 0.0,
              "LinRel three-document oracle");

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < 1.0, "runtime < 1 s");
    v.note("runtime " + fmt(secs, 3) + " s");
    return v;
}

Verdict lda_oracle() {
    Verdict v;
    Eigen::MatrixXd l = Eigen::MatrixXd::Identity(5, 5);
    for (int i = 0; i < 5; ++i) {
        l(i, i) = 1.0 + 0.25 * i;
        for (int j = 0; j < i; ++j) l(i, j) = 0.3 / (1 + i - j);
    }
    Eigen::VectorXd shift(5);
    shift << 1.0, -0.5, 0.25, 0.0, 0.75;
    std::mt19937_64 rng(2026);
    std::normal_distribution<double> g;
    const int n_rel = 120, n_irr = 180;
    Eigen::MatrixXd x(n_rel + n_irr, 5);
    std::vector<Label> labels;
    for (int r = 0; r < x.rows(); ++r) {
        Eigen::VectorXd z(5);
        for (int c = 0; c < 5; ++c) z[c] = g(rng);
        const bool rel = r < n_rel;
        x.row(r) = (l * z + (rel ? 0.5 : -0.5) * shift).transpose();
        labels.push_back(rel ? Label::relevant : Label::irrelevant);
    }
    const auto model = classifier::train(x, labels, {.shrinkage = 0.0});

    const Eigen::VectorXd mu1 = x.topRows(n_rel).colwise().mean().transpose();
    const Eigen::VectorXd mu2 = x.bottomRows(n_irr).colwise().mean().transpose();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 5);
    for (int r = 0; r < x.rows(); ++r) {
        const Eigen::VectorXd c = x.row(r).transpose() - (r < n_rel ? mu1 : mu2);
        s += c * c.transpose();
    }
    s /= static_cast<double>(x.rows() - 1);
    const Eigen::VectorXd want = s.inverse() * (mu1 - mu2);
    const Eigen::VectorXd got = model.weights();
    const double scale = got.dot(want) / want.squaredNorm();
    const double err = (got - scale * want).norm() / (scale * want).norm();
    v.require(scale > 0.0 && err < 1e-9, "direction matches S^-1 (mu1 - mu2)");
    v.note("direction error " + fmt(err, 3));

    double worst = 0.0;
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 10000; ++k) {
        Eigen::VectorXd p(5);
        for (int c = 0; c < 5; ++c) p[c] = u(rng) * (k % 10 == 0 ? 100.0 : 1.0);
        worst = std::max(worst, std::abs(model.predict_proba(p) + model.predict_proba_irrelevant(p) - 1.0));
    }
    for (int r = 0; r < x.rows(); ++r) {
        const Eigen::VectorXd p = x.row(r).transpose();
        worst = std::max(worst, std::abs(model.predict_proba(p) + model.predict_proba_irrelevant(p) - 1.0));
    }
    v.require(worst <= 1e-12, "posterior normalization");
    v.note("normalization error " + fmt(worst, 3));
    return v;
}

Verdict linrel_oracle() {
    Verdict v;
    const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "omega",
                                            "kappa", "sigma", "theta", "zeta", "lambda"};
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed + 77);
        std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len(1, 6), ndoc(2, 6);
        std::vector<std::pair<std::string, std::string>> docs;
        const auto nd = ndoc(rng);
        for (std::size_t j = 0; j < nd; ++j) {
            std::string t;
            for (std::size_t k = 0, l = len(rng); k < l; ++k) t += words[pick(rng)] + " ";
            docs.emplace_back("d" + std::to_string(j), t);
        }
        const auto index = index_of(docs);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        intent::Feedback fb;
        for (std::size_t i = 0; i < index.num_terms(); ++i)
            if (u(rng) < 0.5 || (fb.empty() && i + 1 == index.num_terms())) fb.entries.push_back({i, u(rng)});
        const double lambda = 0.1 + u(rng);
        const double c = 3.0 * u(rng);
        const auto model = intent::linrel_score(fb, index, {.lambda = lambda, .c = c});

        const auto n = static_cast<Eigen::Index>(index.num_terms());
        const auto d = static_cast<Eigen::Index>(index.num_docs());
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                k(i, j) = index.tfidf(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        const auto f = static_cast<Eigen::Index>(fb.entries.size());
        Eigen::MatrixXd kt(f, d);
        Eigen::VectorXd s(f);
        for (Eigen::Index a = 0; a < f; ++a) {
            kt.row(a) = k.row(static_cast<Eigen::Index>(fb.entries[static_cast<std::size_t>(a)].term));
            s[a] = fb.entries[static_cast<std::size_t>(a)].score;
        }
        const Eigen::MatrixXd core =
            (kt.transpose() * kt + lambda * Eigen::MatrixXd::Identity(d, d)).inverse() * kt.transpose();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::RowVectorXd a = k.row(i) * core;
            const double want = a.dot(s.transpose()) + c / 2.0 * a.norm();
            worst = std::max(worst, std::abs(model.w[static_cast<std::size_t>(i)] - want) / std::max(1.0, std::abs(want)));
        }
    }
    v.require(worst < 1e-9, "dense oracle agreement");
    v.note("max error " + fmt(worst, 3));

    const auto three = index_of({{"d1", "atom atom nucleus"}, {"d2", "nucleus money"}, {"d3", "money bank bank"}});
    intent::Feedback fb;
    fb.entries = {{*three.term_index("atom"), 0.9}, {*three.term_index("nucleu"), 0.7}};
    double big = 0.0;
    for (double w : intent::linrel_score(fb, three, {.lambda = 1e9, .c = 2.0}).w) big = std::max(big, std::abs(w));
    v.require(big < 1e-6, "lambda -> infinity drives w to 0");
    for (auto& e : fb.entries) e.score = 0.0;
    const auto zero_s = intent::linrel_score(fb, three, {.lambda = 0.5, .c = 2.0});
    bool bonus_only = true;
    for (double w : zero_s.w) bonus_only = bonus_only && w >= 0.0;
    const auto no_bonus = intent::linrel_score(fb, three, {.lambda = 0.5, .c = 0.0});
    for (double w : no_bonus.w) bonus_only = bonus_only && w == 0.0;
    v.require(bonus_only, "s = 0 leaves only the exploration bonus");
    return v;
}

Verdict smoothing_normalization() {
    Verdict v;
    const auto c = simulator::generate_corpus({});
    const auto index = corpus::TermDocumentMatrix::build(c.documents);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> pick(0, index.num_docs() - 1);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto j = pick(rng);
        double s = 0.0;
        for (std::size_t i = 0; i < index.num_terms(); ++i) s += retrieval::smoothed_prob(i, j, index, 2000.0);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    v.require(worst <= 1e-9, "sum = 1 +- 1e-9");
    v.note(std::to_string(index.num_docs()) + " docs, " + std::to_string(index.num_terms()) + " terms, max |sum - 1| " +
           fmt(worst, 3));
    return v;
}

Verdict null_calibration() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    simulator::SimulationConfig cfg;
    cfg.n400_amp = 0.0;
    cfg.p600_amp = 0.0;
    evaluation::PipelineParams params;

    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = 500 + seed;
        const auto ds = simulator::simulate_participant(cfg);
        const auto index = corpus::TermDocumentMatrix::build(ds.corpus.documents);
        const evaluation::PreparedParticipant prepared(ds.participant, index);
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& b : evaluation::leave_one_block_out(prepared, params)) {
            if (b.auc) {
                s += *b.auc;
                ++n;
            }
        }
        total += s / static_cast<double>(n);
    }
    const double mean_auc = total / 20.0;
    v.require(mean_auc >= 0.45 && mean_auc <= 0.55, "mean AUC in [0.45, 0.55]");
    v.note("mean AUC over 20 seeds " + fmt(mean_auc));

    params.permutations = 200;
    int significant = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        cfg.seed = 1000 + run;
        const auto ds = simulator::simulate_participant(cfg);
        const auto index = corpus::TermDocumentMatrix::build(ds.corpus.documents);
        const evaluation::PreparedParticipant prepared(ds.participant, index);
        params.seed = run + 1;
        const int block = static_cast<int>(run % ds.participant.blocks.size()) + 1;
        const auto res = evaluation::permutation_test_classification(prepared, block, params);
        significant += *res.p < 0.05;
    }
    v.require(significant <= 10, "p < 0.05 in <= 10% of runs");
    v.note(std::to_string(significant) + "/100 runs with p < 0.05 (k = 200)");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.require(secs < 600.0, "runtime < 10 min");
    v.note("runtime " + fmt(secs, 3) + " s");
    return v;
}

// Criteria 6, 7, 8 and 9 share one cohort of simulated participants.
struct Cohort {
    std::vector<simulator::SimulatedDataset> data;
    std::vector<evaluation::ParticipantOutcome> outcomes;
};

const Cohort& cohort() {
    static const Cohort c = [] {
        Cohort out;
        evaluation::PipelineParams params;
        params.permutations = 200;
        for (std::uint64_t p = 1; p <= 20; ++p) {
            simulator::SimulationConfig cfg;
            cfg.participant = "SIM" + std::to_string(100 + p).substr(1);
            cfg.seed = p;
            out.data.push_back(simulator::simulate_participant(cfg));
            const auto& ds = out.data.back();
            const auto index = corpus::TermDocumentMatrix::build(ds.corpus.documents);
            const evaluation::PreparedParticipant prepared(ds.participant, index);
            params.seed = p;
            out.outcomes.push_back(evaluation::evaluate_participant(prepared, params));
        }
        return out;
    }();
    return c;
}

Verdict effect_detection() {
    Verdict v;
    const auto& c = cohort();
    int significant = 0;
    double mean_auc = 0.0;
    for (const auto& o : c.outcomes) {
        significant += o.p_class && *o.p_class < 0.05;
        mean_auc += o.mean_auc.value_or(0.0) / static_cast<double>(c.outcomes.size());
    }
    const double share = significant / static_cast<double>(c.outcomes.size());
    v.require(share >= 0.7, "share significant >= 0.7");
    v.note(std::to_string(significant) + "/20 participants with p < 0.05; mean AUC " + fmt(mean_auc));
    return v;
}

Verdict retrieval_gain() {
    Verdict v;
    const auto& c = cohort();
    int significant = 0;
    double cg10 = 0.0, cg20 = 0.0, cg30 = 0.0, null30 = 0.0;
    for (const auto& o : c.outcomes) {
        significant += o.p_retrieval && *o.p_retrieval < 0.05;
        for (const auto& b : o.blocks) {
            cg10 += b.cg10;
            cg20 += b.cg20;
            cg30 += b.cg30;
        }
        null30 += stats::mean(o.null_mean_cg30);
    }
    const double blocks = 20.0 * 8.0;
    const double share = significant / 20.0;
    v.require(share >= 0.7, "share significant >= 0.7");
    v.note(std::to_string(significant) + "/20 participants with p < 0.05; mean CG@10 " + fmt(cg10 / blocks) +
           ", CG@20 " + fmt(cg20 / blocks) + ", CG@30 " + fmt(cg30 / blocks) + " (null CG@30 " + fmt(null30 / 20.0) +
           ")");
    return v;
}

Verdict tfidf_separation() {
    Verdict v;
    const auto& c = cohort();
    std::vector<double> rel, irr;
    int individually = 0;
    for (const auto& ds : c.data) {
        const auto index = corpus::TermDocumentMatrix::build(ds.corpus.documents);
        std::vector<double> r, i;
        for (const auto& b : ds.participant.blocks) {
            for (const auto& e : b.epochs) {
                const double w = index.word_tfidf(e.word, b.relevant_doc);
                (e.label == Label::relevant ? r : i).push_back(w);
            }
        }
        individually += stats::rank_sum_test(r, i, true).p < 0.01;
        rel.insert(rel.end(), r.begin(), r.end());
        irr.insert(irr.end(), i.begin(), i.end());
    }
    const double med_rel = stats::median(rel);
    const double med_irr = stats::median(irr);
    const double p = stats::rank_sum_test(rel, irr, true).p;
    v.require(med_rel > med_irr, "median relevant > median irrelevant");
    v.require(p < 0.01, "rank-sum p < 0.01");
    v.note("medians " + fmt(med_rel) + " / " + fmt(med_irr) + " (reference 5.00 / 1.46), p " + fmt(p, 3) + ", " +
           std::to_string(individually) + "/20 participants individually p < 0.01");
    return v;
}

Verdict weighted_asymmetry() {
    Verdict v;
    const auto& c = cohort();
    int holds = 0;
    double rel_sum = 0.0, irr_sum = 0.0;
    for (const auto& o : c.outcomes) {
        double r = 0.0, i = 0.0;
        std::size_t nr = 0, ni = 0;
        for (const auto& b : o.blocks) {
            if (b.weighted_precision_rel) {
                r += *b.weighted_precision_rel;
                ++nr;
            }
            if (b.weighted_precision_irr) {
                i += *b.weighted_precision_irr;
                ++ni;
            }
        }
        const double mr = nr ? r / static_cast<double>(nr) : 0.0;
        const double mi = ni ? i / static_cast<double>(ni) : 0.0;
        holds += mr > mi;
        rel_sum += mr;
        irr_sum += mi;
    }
    v.require(holds >= 16, ">= 80% of participants");
    v.note(std::to_string(holds) + "/20 participants; mean weighted precision rel " + fmt(rel_sum / 20.0) + " vs irr " +
           fmt(irr_sum / 20.0));
    return v;
}

Verdict determinism() {
    Verdict v;
    pipeline::PipelineConfig cfg;
    cfg.set("evaluation.permutations", "50");
    cfg.set("simulation.seed", "9");
    const auto ds = simulator::simulate_participant(cfg.simulation());
    const auto index = corpus::TermDocumentMatrix::build(ds.corpus.documents);
    const evaluation::PreparedParticipant prepared(ds.participant, index);
    std::vector<std::string> results, summaries;
    for (const char* threads : {"1", "4", "0"}) {
        cfg.set("evaluation.threads", threads);
        const auto o = evaluation::evaluate_participant(prepared, cfg.params());
        results.push_back(pipeline::results_jsonl(o, cfg.hash(), cfg.get_uint("evaluation.seed")));
        summaries.push_back(pipeline::summary_json(o, cfg.hash(), cfg.get_uint("evaluation.seed")));
    }
    const auto dir = std::filesystem::temp_directory_path() / ("brainrel-acceptance-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    bool same_files = true;
    for (std::size_t k = 0; k < results.size(); ++k) {
        io::write_file_atomic(dir / ("r" + std::to_string(k) + ".jsonl"), results[k]);
        same_files = same_files && io::read_file(dir / ("r" + std::to_string(k) + ".jsonl")) ==
                                       io::read_file(dir / "r0.jsonl");
        same_files = same_files && summaries[k] == summaries[0];
    }
    std::filesystem::remove_all(dir);
    v.require(same_files, "byte-identical results across runs and thread counts");
    v.note("3 runs (threads 1, 4, auto), config hash " + cfg.hash());
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"formula unit suite", formulas},
        {"LDA oracle equivalence", lda_oracle},
        {"LinRel brute-force equivalence", linrel_oracle},
        {"smoothing normalization", smoothing_normalization},
        {"null calibration", null_calibration},
        {"effect detection", effect_detection},
        {"retrieval gain", retrieval_gain},
        {"tf-idf separation", tfidf_separation},
        {"weighted-precision asymmetry", weighted_asymmetry},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !v.pass;
        std::printf("criterion %zu %s: %s -- %s [%.1f s]\n", k + 1, v.pass ? "PASS" : "FAIL",
                    criteria[k].first.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
