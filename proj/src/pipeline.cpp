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

#include "brainrel/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "brainrel/epoch_io.hpp"
#include "brainrel/error.hpp"
#include "brainrel/io.hpp"
#include "brainrel/rng.hpp"
#include "brainrel/stats.hpp"

namespace brainrel::pipeline {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::map<std::string, std::string>& defaults() {
    static const std::map<std::string, std::string> d = {
        {"paths.corpus", ""},
        {"paths.index", ""},
        {"paths.epochs", ""},
        {"paths.blocks", ""},
        {"paths.judgments", ""},
        {"paths.output", ""},
        {"classifier.shrinkage", "auto"},
        {"classifier.threshold", "0.5"},
        {"features.windows", "7"},
        {"features.start_ms", "250"},
        {"features.end_ms", "950"},
        {"intent.lambda", "0.5"},
        {"intent.c", "2"},
        {"intent.m_terms", "30"},
        {"retrieval.mu", "2000"},
        {"retrieval.k", "30"},
        {"evaluation.permutations", "1000"},
        {"evaluation.seed", "1"},
        {"evaluation.threads", "0"},
        {"simulation.participant", "SIM01"},
        {"simulation.n_channels", "16"},
        {"simulation.fs", "200"},
        {"simulation.n_blocks", "8"},
        {"simulation.trials_per_block", "6"},
        {"simulation.noise_sd", "8"},
        {"simulation.n400_amp", "0.8"},
        {"simulation.p600_amp", "1"},
        {"simulation.affected_channels", "8,10,11,12,13,14"},
        {"simulation.seed", "1"},
        {"simulation.artifact_rate", "0"},
    };
    return d;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw Error("config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw Error("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

PipelineConfig::PipelineConfig() : values_(defaults()) {}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    PipelineConfig cfg;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(path.string() + ":" + std::to_string(n) + ": expected key = value");
        try {
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return cfg;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (!defaults().contains(key)) throw Error("config: unknown key '" + key + "'");
    values_[key] = value;
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error("config: unknown key '" + key + "'");
    return it->second;
}

bool PipelineConfig::is_default(const std::string& key) const { return get(key) == defaults().at(key); }

double PipelineConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

std::uint64_t PipelineConfig::get_uint(const std::string& key) const { return to_uint(key, get(key)); }

void PipelineConfig::validate() const {
    const auto& shrink = get("classifier.shrinkage");
    if (shrink != "auto") {
        const double v = to_double("classifier.shrinkage", shrink);
        if (!(v >= 0.0 && v <= 1.0)) throw Error("config: classifier.shrinkage must be 'auto' or in [0, 1]");
    }
    if (get_double("classifier.threshold") != 0.5) throw Error("config: classifier.threshold is fixed at 0.5");
    if (get_uint("features.windows") != 7 || get_double("features.start_ms") != 250.0 ||
        get_double("features.end_ms") != 950.0) {
        throw Error("config: feature windows are fixed at 7 windows over [250, 950) ms");
    }
    if (!(get_double("intent.lambda") > 0.0)) throw Error("config: intent.lambda must be positive");
    if (!(get_double("intent.c") >= 0.0)) throw Error("config: intent.c must be non-negative");
    if (get_uint("intent.m_terms") == 0) throw Error("config: intent.m_terms must be positive");
    if (!(get_double("retrieval.mu") > 0.0)) throw Error("config: retrieval.mu must be positive");
    if (get_uint("retrieval.k") == 0) throw Error("config: retrieval.k must be positive");
    get_uint("evaluation.permutations");
    get_uint("evaluation.seed");
    get_uint("evaluation.threads");
    simulation().validate();
}

std::string PipelineConfig::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

std::string PipelineConfig::hash() const {
    std::string text;
    for (const auto& [k, v] : values_) {
        if (k.starts_with("paths.") || k == "evaluation.threads") continue;
        text += k + "=" + v + "\n";
    }
    return hex64(fnv1a(text));
}

evaluation::PipelineParams PipelineConfig::params() const {
    evaluation::PipelineParams p;
    if (get("classifier.shrinkage") != "auto") p.classifier.shrinkage = get_double("classifier.shrinkage");
    p.intent.lambda = get_double("intent.lambda");
    p.intent.c = get_double("intent.c");
    p.m_terms = get_uint("intent.m_terms");
    p.mu = get_double("retrieval.mu");
    p.depth = get_uint("retrieval.k");
    p.permutations = get_uint("evaluation.permutations");
    p.seed = get_uint("evaluation.seed");
    p.threads = static_cast<unsigned>(get_uint("evaluation.threads"));
    return p;
}

simulator::SimulationConfig PipelineConfig::simulation() const {
    simulator::SimulationConfig s;
    s.participant = get("simulation.participant");
    s.n_channels = get_uint("simulation.n_channels");
    s.fs = get_double("simulation.fs");
    s.n_blocks = get_uint("simulation.n_blocks");
    s.trials_per_block = get_uint("simulation.trials_per_block");
    s.noise_sd = get_double("simulation.noise_sd");
    s.n400_amp = get_double("simulation.n400_amp");
    s.p600_amp = get_double("simulation.p600_amp");
    s.seed = get_uint("simulation.seed");
    s.artifact_rate = get_double("simulation.artifact_rate");
    s.affected_channels.clear();
    std::stringstream ss(get("simulation.affected_channels"));
    for (std::string tok; std::getline(ss, tok, ',');) {
        s.affected_channels.push_back(to_uint("simulation.affected_channels", trim(tok)));
    }
    return s;
}

// ---------------------------------------------------------------------------

void write_blocks(const std::filesystem::path& path, const evaluation::ParticipantData& data) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : data.blocks) {
        blocks.push_back({{"id", b.id}, {"relevant_doc", b.relevant_doc}, {"irrelevant_doc", b.irrelevant_doc}});
    }
    ordered_json root = {{"participant", data.participant}, {"blocks", blocks}};
    io::write_file_atomic(path, root.dump(2) + "\n");
}

void write_judgments(const std::filesystem::path& path,
                     const std::map<std::string, evaluation::DocumentJudgments>& judgments) {
    std::string out;
    for (const auto& [topic, j] : judgments) {
        for (const auto& [doc, score] : j.scores) {
            out += ordered_json{{"topic", topic}, {"doc_id", doc}, {"score", score}}.dump() + "\n";
        }
    }
    io::write_file_atomic(path, out);
}

std::map<std::string, evaluation::DocumentJudgments> read_judgments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open judgments file: " + path.string());
    std::map<std::string, evaluation::DocumentJudgments> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            const auto j = json::parse(line);
            const auto topic = j.at("topic").get<std::string>();
            const int score = j.at("score").get<int>();
            if (score < 0 || score > 3) throw Error("score outside 0..3");
            auto& dj = out[topic];
            dj.topic = topic;
            dj.scores[j.at("doc_id").get<std::string>()] = score;
        } catch (const std::exception& e) {
            throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

evaluation::ParticipantData load_participant(const std::filesystem::path& epochs,
                                             const std::filesystem::path& blocks,
                                             const std::filesystem::path& judgments) {
    auto set = eeg::read_epochs(epochs);
    evaluation::ParticipantData data;
    data.participant = set.participant;
    data.fs = set.fs;
    data.channels = set.channels;
    data.judgments = read_judgments(judgments);
    json root;
    try {
        root = json::parse(io::read_file(blocks));
        for (const auto& b : root.at("blocks")) {
            evaluation::ExperimentBlock eb;
            eb.id = b.at("id").get<int>();
            eb.relevant_doc = b.at("relevant_doc").get<std::string>();
            eb.irrelevant_doc = b.at("irrelevant_doc").get<std::string>();
            data.blocks.push_back(std::move(eb));
        }
    } catch (const json::exception& e) {
        throw Error(blocks.string() + ": " + e.what());
    }
    for (auto& e : set.epochs) {
        auto it = std::find_if(data.blocks.begin(), data.blocks.end(),
                               [&](const evaluation::ExperimentBlock& b) { return b.id == e.block; });
        if (it == data.blocks.end()) {
            throw Error(epochs.string() + ": epoch for word '" + e.word + "' references unknown block " +
                        std::to_string(e.block));
        }
        it->epochs.push_back(std::move(e));
    }
    return data;
}

void write_recording(const std::filesystem::path& path, const eeg::Recording& rec) {
    ordered_json events = ordered_json::array();
    for (const auto& e : rec.events) {
        events.push_back({{"sample", e.sample},
                          {"word", e.word},
                          {"block", e.block},
                          {"kind", e.kind == eeg::StimulusKind::word ? "word" : "separator"},
                          {"label", eeg::label_name(e.label)}});
    }
    ordered_json root = {{"fs", rec.fs}, {"channels", rec.channels}, {"traces", rec.traces}, {"events", events}};
    io::write_file_atomic(path, root.dump() + "\n");
}

eeg::Recording read_recording(const std::filesystem::path& path) {
    eeg::Recording rec;
    try {
        const auto root = json::parse(io::read_file(path));
        rec.fs = root.at("fs").get<double>();
        rec.channels = root.at("channels").get<std::vector<std::string>>();
        rec.traces = root.at("traces").get<std::vector<std::vector<double>>>();
        std::size_t k = 0;
        for (const auto& e : root.at("events")) {
            eeg::Event ev;
            ev.sample = e.at("sample").get<std::size_t>();
            ev.word = e.at("word").get<std::string>();
            ev.block = e.value("block", 0);
            const auto kind = e.value("kind", std::string("word"));
            if (kind != "word" && kind != "separator") {
                throw Error("event " + std::to_string(k) + ": kind must be word or separator");
            }
            ev.kind = kind == "word" ? eeg::StimulusKind::word : eeg::StimulusKind::separator;
            const auto label = e.value("label", std::string("unlabeled"));
            if (label == "relevant") {
                ev.label = eeg::Label::relevant;
            } else if (label == "irrelevant") {
                ev.label = eeg::Label::irrelevant;
            } else if (label == "unlabeled") {
                ev.label = eeg::Label::unlabeled;
            } else {
                throw Error("event " + std::to_string(k) + ": unknown label '" + label + "'");
            }
            rec.events.push_back(std::move(ev));
            ++k;
        }
        rec.validate();
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return rec;
}

void write_simulation(const std::filesystem::path& dir, const simulator::SimulatedDataset& ds,
                      const simulator::SimulationConfig& config, bool with_recording) {
    std::filesystem::create_directories(dir);
    corpus::write_corpus_jsonl(dir / "corpus.jsonl", ds.corpus.documents);
    write_judgments(dir / "judgments.jsonl", ds.corpus.judgments);
    const auto& p = ds.participant;
    eeg::EpochSet set;
    set.participant = p.participant;
    set.fs = p.fs;
    set.channels = p.channels;
    for (const auto& b : p.blocks) set.epochs.insert(set.epochs.end(), b.epochs.begin(), b.epochs.end());
    eeg::write_epochs(dir / (p.participant + ".epochs"), set);
    write_blocks(dir / (p.participant + ".blocks.json"), p);
    if (with_recording) {
        write_recording(dir / (p.participant + ".recording.json"),
                        simulator::simulate_recording(config, ds.corpus, 1));
    }
}

// ---------------------------------------------------------------------------

std::string results_jsonl(const evaluation::ParticipantOutcome& outcome, const std::string& config_hash,
                          std::uint64_t seed) {
    std::string out;
    for (const auto& b : outcome.blocks) {
        ordered_json j;
        j["participant"] = outcome.participant;
        j["block"] = b.block;
        j["auc"] = optional_json(b.auc);
        j["precision"] = optional_json(b.precision);
        j["weighted_precision_rel"] = optional_json(b.weighted_precision_rel);
        j["weighted_precision_irr"] = optional_json(b.weighted_precision_irr);
        j["cg10"] = b.cg10;
        j["cg20"] = b.cg20;
        j["cg30"] = b.cg30;
        j["p_class"] = optional_json(b.p_class);
        j["p_retrieval"] = optional_json(b.p_retrieval);
        j["fallback_feedback"] = b.fallback_feedback;
        j["config_hash"] = config_hash;
        j["seed"] = seed;
        out += j.dump() + "\n";
    }
    return out;
}

std::string summary_json(const evaluation::ParticipantOutcome& outcome, const std::string& config_hash,
                         std::uint64_t seed) {
    ordered_json j;
    j["participant"] = outcome.participant;
    j["blocks"] = outcome.blocks.size();
    j["mean_auc"] = optional_json(outcome.mean_auc);
    j["mean_cg30"] = outcome.mean_cg30;
    j["p_class"] = optional_json(outcome.p_class);
    j["p_retrieval"] = optional_json(outcome.p_retrieval);
    j["permutations"] = outcome.null_mean_cg30.size();
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

namespace {

struct Row {
    std::string participant;
    int block = 0;
    std::optional<double> auc, precision, wp_rel, wp_irr, p_class, p_retrieval;
    double cg10 = 0, cg20 = 0, cg30 = 0;
};

std::optional<double> opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string fmt(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

std::optional<double> mean_of(const std::vector<Row>& rows, std::optional<double> Row::*field) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (r.*field) {
            s += *(r.*field);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return s / static_cast<double>(n);
}

}  // namespace

void write_report(const std::vector<std::filesystem::path>& results, const std::filesystem::path& out_dir) {
    std::map<std::string, std::vector<Row>> by_participant;
    for (const auto& path : results) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open results file: " + path.string());
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (trim(line).empty()) continue;
            try {
                const auto j = json::parse(line);
                Row r;
                r.participant = j.at("participant").get<std::string>();
                r.block = j.at("block").get<int>();
                r.auc = opt(j, "auc");
                r.precision = opt(j, "precision");
                r.wp_rel = opt(j, "weighted_precision_rel");
                r.wp_irr = opt(j, "weighted_precision_irr");
                r.p_class = opt(j, "p_class");
                r.p_retrieval = opt(j, "p_retrieval");
                r.cg10 = j.at("cg10").get<double>();
                r.cg20 = j.at("cg20").get<double>();
                r.cg30 = j.at("cg30").get<double>();
                by_participant[r.participant].push_back(r);
            } catch (const json::exception& e) {
                throw Error(path.string() + ":" + std::to_string(n) + ": " + e.what());
            }
        }
    }
    std::filesystem::create_directories(out_dir);

    std::string summary =
        "participant,blocks,mean_auc,mean_precision,mean_weighted_precision_rel,mean_weighted_precision_irr,"
        "mean_cg10,mean_cg20,mean_cg30,blocks_p_class_below_0.05,blocks_p_retrieval_below_0.05\n";
    std::string fig4 = "participant,block,auc,p_class\n";
    std::string fig6 = "participant,block,precision,weighted_precision_rel,weighted_precision_irr\n";
    std::string fig7 = "participant,block,cg10,cg20,cg30,p_retrieval\n";
    for (const auto& [pid, rows] : by_participant) {
        double cg10 = 0, cg20 = 0, cg30 = 0;
        std::size_t sig_c = 0, sig_r = 0;
        for (const auto& r : rows) {
            cg10 += r.cg10;
            cg20 += r.cg20;
            cg30 += r.cg30;
            sig_c += r.p_class && *r.p_class < 0.05;
            sig_r += r.p_retrieval && *r.p_retrieval < 0.05;
            const std::string head = pid + "," + std::to_string(r.block) + ",";
            fig4 += head + fmt(r.auc) + "," + fmt(r.p_class) + "\n";
            fig6 += head + fmt(r.precision) + "," + fmt(r.wp_rel) + "," + fmt(r.wp_irr) + "\n";
            fig7 += head + io::format_double(r.cg10) + "," + io::format_double(r.cg20) + "," +
                    io::format_double(r.cg30) + "," + fmt(r.p_retrieval) + "\n";
        }
        const double n = static_cast<double>(rows.size());
        summary += pid + "," + std::to_string(rows.size()) + "," + fmt(mean_of(rows, &Row::auc)) + "," +
                   fmt(mean_of(rows, &Row::precision)) + "," + fmt(mean_of(rows, &Row::wp_rel)) + "," +
                   fmt(mean_of(rows, &Row::wp_irr)) + "," + io::format_double(cg10 / n) + "," +
                   io::format_double(cg20 / n) + "," + io::format_double(cg30 / n) + "," + std::to_string(sig_c) +
                   "," + std::to_string(sig_r) + "\n";
    }
    io::write_file_atomic(out_dir / "summary.csv", summary);
    io::write_file_atomic(out_dir / "auc_by_block.csv", fig4);
    io::write_file_atomic(out_dir / "precision_by_block.csv", fig6);
    io::write_file_atomic(out_dir / "gain_by_block.csv", fig7);
}

}  // namespace brainrel::pipeline
