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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "brainrel/classifier.hpp"
#include "brainrel/corpus.hpp"
#include "brainrel/eeg.hpp"
#include "brainrel/epoch_io.hpp"
#include "brainrel/error.hpp"
#include "brainrel/evaluation.hpp"
#include "brainrel/intent.hpp"
#include "brainrel/io.hpp"
#include "brainrel/kernels.hpp"
#include "brainrel/pipeline.hpp"
#include "brainrel/retrieval.hpp"
#include "brainrel/simulator.hpp"

namespace fs = std::filesystem;
using namespace brainrel;
using nlohmann::ordered_json;

namespace {

struct Common {
    std::string config_file;
    std::vector<std::string> overrides;
    bool quiet = false;
};

pipeline::PipelineConfig resolve(const Common& common) {
    auto cfg = common.config_file.empty() ? pipeline::PipelineConfig{}
                                          : pipeline::PipelineConfig::from_file(common.config_file);
    for (const auto& kv : common.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void log_config(const pipeline::PipelineConfig& cfg, const char* command) {
    spdlog::info("command {} (kernels: {})", command,
                 kernels::active_isa() == kernels::Isa::avx2 ? "avx2" : "scalar");
    for (const auto& [k, v] : cfg.values()) {
        spdlog::info("config {} = {}{}", k, v, cfg.is_default(k) ? " (default)" : "");
    }
    spdlog::info("config hash {} seed {}", cfg.hash(), cfg.get("evaluation.seed"));
}

// Flag value if given, otherwise the config path, otherwise an error.
std::string path_of(const std::string& flag, const pipeline::PipelineConfig& cfg, const std::string& key) {
    if (!flag.empty()) return flag;
    const auto& v = cfg.get(key);
    if (v.empty()) throw Error("missing path: pass the flag or set " + key);
    return v;
}

corpus::TermDocumentMatrix load_index(const std::string& index_flag, const std::string& corpus_flag,
                                      const pipeline::PipelineConfig& cfg) {
    const auto index_path = index_flag.empty() ? cfg.get("paths.index") : index_flag;
    if (!index_path.empty()) return corpus::TermDocumentMatrix::load(index_path);
    const auto corpus_path = path_of(corpus_flag, cfg, "paths.corpus");
    const auto docs = corpus::read_corpus_jsonl(corpus_path);
    return corpus::TermDocumentMatrix::build(docs);
}

struct DataFlags {
    std::string epochs, blocks, judgments, index, corpus, output;
};

void add_data_flags(CLI::App* cmd, DataFlags& f) {
    cmd->add_option("--epochs", f.epochs, "Epoch file");
    cmd->add_option("--blocks", f.blocks, "Blocks JSON file");
    cmd->add_option("--judgments", f.judgments, "Judgments JSONL file");
    cmd->add_option("--index", f.index, "Persisted index (built from --corpus when absent)");
    cmd->add_option("--corpus", f.corpus, "Corpus JSONL file");
    cmd->add_option("-o,--output", f.output, "Output directory");
}

evaluation::ParticipantData load_data(const DataFlags& f, const pipeline::PipelineConfig& cfg) {
    return pipeline::load_participant(path_of(f.epochs, cfg, "paths.epochs"), path_of(f.blocks, cfg, "paths.blocks"),
                                      path_of(f.judgments, cfg, "paths.judgments"));
}

// ---------------------------------------------------------------------------

int cmd_index(const Common& common, const std::string& corpus_flag, const std::string& out_flag) {
    const auto cfg = resolve(common);
    log_config(cfg, "index");
    const auto docs = corpus::read_corpus_jsonl(path_of(corpus_flag, cfg, "paths.corpus"));
    const auto index = corpus::TermDocumentMatrix::build(docs);
    const auto out = path_of(out_flag, cfg, "paths.index");
    index.save(out);
    spdlog::info("indexed {} documents, {} terms -> {}", index.num_docs(), index.num_terms(), out);
    return 0;
}

int cmd_preprocess(const Common& common, const std::string& recording, const std::string& out_flag,
                   const std::string& participant) {
    const auto cfg = resolve(common);
    log_config(cfg, "preprocess");
    const auto raw = pipeline::read_recording(recording);
    const auto filtered = eeg::filter(raw);
    auto cut = eeg::cut_epochs(filtered);
    for (const auto& w : cut.warnings) spdlog::warn("{}", w);
    auto cleaned = eeg::reject_artifacts(cut.epochs);
    const auto& r = cleaned.report;

    eeg::EpochSet set;
    set.participant = participant;
    set.fs = raw.fs;
    for (auto c : r.kept_channels) set.channels.push_back(raw.channels[c]);
    set.epochs = std::move(cleaned.epochs);

    const fs::path out = path_of(out_flag, cfg, "paths.epochs");
    eeg::write_epochs(out, set);

    ordered_json report;
    report["participant"] = participant;
    report["epochs_in"] = r.epochs_in;
    report["epochs_accepted"] = r.epochs_accepted;
    report["epochs_rejected"] = r.epochs_rejected;
    report["relevant_accepted"] = r.relevant_accepted;
    report["irrelevant_accepted"] = r.irrelevant_accepted;
    std::vector<std::string> removed;
    for (auto c : r.removed_channels) removed.push_back(raw.channels[c]);
    report["channels_kept"] = set.channels;
    report["channels_removed"] = removed;
    report["invalid_per_channel"] = r.invalid_per_channel;
    report["warnings"] = cut.warnings;
    report["config_hash"] = cfg.hash();
    report["seed"] = cfg.get_uint("evaluation.seed");
    io::write_file_atomic(fs::path(out).concat(".report.json"), report.dump(2) + "\n");
    spdlog::info("{} of {} epochs accepted, {} channels removed -> {}", r.epochs_accepted, r.epochs_in,
                 r.removed_channels.size(), out.string());
    return 0;
}

int cmd_run_block(const Common& common, const DataFlags& f, int block_id) {
    const auto cfg = resolve(common);
    log_config(cfg, "run-block");
    const auto params = cfg.params();
    const auto data = load_data(f, cfg);
    const auto index = load_index(f.index, f.corpus, cfg);
    const evaluation::PreparedParticipant prepared(data, index);
    const auto b = prepared.block_position(block_id);

    Eigen::MatrixXd x;
    std::vector<eeg::Label> labels;
    prepared.training_set(b, x, labels);
    const auto model = classifier::train(x, labels, params.classifier);
    const auto outcome = prepared.evaluate_block(b, model, params);
    const auto& block = data.blocks[b];

    const fs::path out = path_of(f.output, cfg, "paths.output");
    fs::create_directories(out);
    const auto stem = "block" + std::to_string(block_id);

    std::string preds;
    for (std::size_t i = 0; i < block.epochs.size(); ++i) {
        preds += ordered_json{{"word", block.epochs[i].word},
                              {"label", eeg::label_name(block.epochs[i].label)},
                              {"probability", outcome.probabilities[i]},
                              {"predicted", eeg::label_name(classifier::binarize(outcome.probabilities[i]))}}
                     .dump() +
                 "\n";
    }
    io::write_file_atomic(out / (stem + ".predictions.jsonl"), preds);
    io::write_file_atomic(out / (stem + ".ranked.jsonl"), retrieval::ranked_jsonl(outcome.ranked, index));

    std::string query;
    for (const auto& q : outcome.query) query += index.term(q.term) + "\t" + io::format_double(q.weight) + "\n";
    io::write_file_atomic(out / (stem + ".query.tsv"), query);

    evaluation::ParticipantOutcome single;
    single.participant = data.participant;
    single.blocks.push_back(outcome);
    io::write_file_atomic(out / (stem + ".results.jsonl"),
                          pipeline::results_jsonl(single, cfg.hash(), cfg.get_uint("evaluation.seed")));
    model.save(out / (stem + ".model.txt"));
    spdlog::info("block {}: auc {} cg30 {}", block_id, outcome.auc ? io::format_double(*outcome.auc) : "n/a",
                 io::format_double(outcome.cg30));
    return 0;
}

int cmd_evaluate(const Common& common, const DataFlags& f) {
    const auto cfg = resolve(common);
    log_config(cfg, "evaluate");
    const auto params = cfg.params();
    const auto data = load_data(f, cfg);
    const auto index = load_index(f.index, f.corpus, cfg);
    const evaluation::PreparedParticipant prepared(data, index);
    const auto outcome = evaluation::evaluate_participant(prepared, params);

    const fs::path out = path_of(f.output, cfg, "paths.output");
    fs::create_directories(out);
    const auto seed = cfg.get_uint("evaluation.seed");
    io::write_file_atomic(out / (data.participant + ".results.jsonl"),
                          pipeline::results_jsonl(outcome, cfg.hash(), seed));
    io::write_file_atomic(out / (data.participant + ".summary.json"),
                          pipeline::summary_json(outcome, cfg.hash(), seed));
    spdlog::info("{}: {} blocks, mean auc {}, p_class {}, p_retrieval {}", data.participant, outcome.blocks.size(),
                 outcome.mean_auc ? io::format_double(*outcome.mean_auc) : "n/a",
                 outcome.p_class ? io::format_double(*outcome.p_class) : "n/a",
                 outcome.p_retrieval ? io::format_double(*outcome.p_retrieval) : "n/a");
    return 0;
}

int cmd_simulate(const Common& common, const std::string& out_flag, bool with_recording) {
    const auto cfg = resolve(common);
    log_config(cfg, "simulate");
    const auto sim = cfg.simulation();
    spdlog::info("simulation seed {}", sim.seed);
    const auto ds = simulator::simulate_participant(sim);
    const fs::path out = path_of(out_flag, cfg, "paths.output");
    pipeline::write_simulation(out, ds, sim, with_recording);
    std::size_t n = 0;
    for (const auto& b : ds.participant.blocks) n += b.epochs.size();
    spdlog::info("wrote {} documents, {} blocks, {} epochs -> {}", ds.corpus.documents.size(),
                 ds.participant.blocks.size(), n, out.string());
    return 0;
}

int cmd_report(const Common& common, const std::vector<std::string>& results, const std::string& out_flag) {
    const auto cfg = resolve(common);
    log_config(cfg, "report");
    std::vector<fs::path> paths(results.begin(), results.end());
    const fs::path out = path_of(out_flag, cfg, "paths.output");
    pipeline::write_report(paths, out);
    spdlog::info("report from {} results files -> {}", paths.size(), out.string());
    return 0;
}

std::string json_escape(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_color_mt("brainrel");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

    CLI::App app{"Brain-relevance feedback pipeline: EEG term relevance, search intent and retrieval"};
    app.require_subcommand(1);
    Common common;
    app.add_option("-c,--config", common.config_file, "Config file with 'key = value' lines");
    app.add_option("--set", common.overrides, "Override a config key (key=value), repeatable");
    app.add_flag("-q,--quiet", common.quiet, "Only log warnings and errors");

    std::string corpus_path, out_path, recording, participant = "P01";
    std::vector<std::string> results;
    int block_id = 0;
    bool with_recording = false;
    DataFlags run_flags, eval_flags;

    auto* index = app.add_subcommand("index", "Build and persist the term-document index");
    index->add_option("--corpus", corpus_path, "Corpus JSONL file");
    index->add_option("-o,--output", out_path, "Index file");

    auto* preprocess = app.add_subcommand("preprocess", "Filter, epoch and clean a raw recording");
    preprocess->add_option("recording", recording, "Recording JSON file")->required();
    preprocess->add_option("-o,--output", out_path, "Epoch file");
    preprocess->add_option("--participant", participant, "Participant id");

    auto* run_block = app.add_subcommand("run-block", "Train on the other blocks, predict and retrieve for one");
    add_data_flags(run_block, run_flags);
    run_block->add_option("--block", block_id, "Block id")->required();

    auto* evaluate = app.add_subcommand("evaluate", "Leave-one-block-out evaluation with permutation tests");
    add_data_flags(evaluate, eval_flags);

    auto* simulate = app.add_subcommand("simulate", "Write a synthetic participant dataset");
    simulate->add_option("-o,--output", out_path, "Output directory");
    simulate->add_flag("--recording", with_recording, "Also write one block of continuous raw data");

    auto* report = app.add_subcommand("report", "Summary and per-block CSV tables from results files");
    report->add_option("results", results, "Results JSONL files")->required();
    report->add_option("-o,--output", out_path, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (common.quiet) spdlog::set_level(spdlog::level::warn);

    const auto* cmd = app.get_subcommands().front();
    try {
        if (cmd == index) return cmd_index(common, corpus_path, out_path);
        if (cmd == preprocess) return cmd_preprocess(common, recording, out_path, participant);
        if (cmd == run_block) return cmd_run_block(common, run_flags, block_id);
        if (cmd == evaluate) return cmd_evaluate(common, eval_flags);
        if (cmd == simulate) return cmd_simulate(common, out_path, with_recording);
        if (cmd == report) return cmd_report(common, results, out_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"error\":%s,\"command\":%s}\n", json_escape(e.what()).c_str(),
                     json_escape(cmd->get_name()).c_str());
        return 1;
    }
    return 2;
}
