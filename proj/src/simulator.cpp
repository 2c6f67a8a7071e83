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

#include "brainrel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "brainrel/error.hpp"
#include "brainrel/text.hpp"

namespace brainrel::simulator {

using eeg::Label;

void SimulationConfig::validate() const {
    if (n_channels == 0 || n_channels > 64) throw Error("simulation: n_channels must be in 1..64");
    if (fs < 80.0) throw Error("simulation: fs must be at least 80 Hz");
    if (n_blocks < 1) throw Error("simulation: need at least one block");
    if (trials_per_block < 1) throw Error("simulation: need at least one trial per block");
    if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw Error("simulation: noise_sd must be positive");
    if (!std::isfinite(n400_amp) || !std::isfinite(p600_amp)) throw Error("simulation: amplitudes must be finite");
    if (affected_channels.empty()) throw Error("simulation: affected_channels must not be empty");
    for (auto c : affected_channels)
        if (c >= n_channels) throw Error("simulation: affected channel " + std::to_string(c) + " out of range");
    if (n_topics < 2) throw Error("simulation: need at least two topics");
    if (docs_per_topic < 1 || topic_vocabulary < 1) throw Error("simulation: empty topics");
    if (sentences_per_doc < trials_per_block) throw Error("simulation: documents shorter than a block");
    if (words_per_sentence < 2) throw Error("simulation: sentences too short");
    if (!(topical_share > 0.0 && topical_share < 1.0)) throw Error("simulation: topical_share must be in (0, 1)");
    if (!(secondary_topic_rate >= 0.0 && secondary_topic_rate <= 1.0)) {
        throw Error("simulation: secondary_topic_rate must be in [0, 1]");
    }
    if (!(artifact_rate >= 0.0 && artifact_rate <= 1.0)) throw Error("simulation: artifact_rate must be in [0, 1]");
}

std::vector<std::string> channel_names(std::size_t n_channels) {
    static const std::vector<std::string> k16 = {"Fp1", "Fp2", "F3",  "Fz",  "F4", "FC1", "FC2", "C3",
                                                 "Cz",  "C4",  "CP1", "CP2", "P3", "Pz",  "P4",  "Oz"};
    static const std::vector<std::string> k32 = {
        "Fp1", "Fp2", "F7",  "F3",  "Fz",  "F4", "F8", "FC5", "FC1", "FC2", "FC6", "T7", "C3", "Cz",  "C4", "T8",
        "TP9", "CP5", "CP1", "CP2", "CP6", "TP10", "P7", "P3", "Pz", "P4", "P8", "PO9", "O1", "Oz", "O2", "PO10"};
    if (n_channels == 16) return k16;
    std::vector<std::string> out;
    for (std::size_t c = 0; c < n_channels; ++c) {
        out.push_back(c < k32.size() ? k32[c] : "E" + std::to_string(c + 1));
    }
    return out;
}

namespace {

const std::vector<std::string>& filler_pool() {
    static const std::vector<std::string> words = {
        "time",    "people",   "year",    "way",      "day",     "thing",    "life",     "world",    "school",
        "state",   "family",   "group",   "country",  "problem", "hand",     "part",     "place",    "case",
        "week",    "company",  "system",  "question", "work",    "number",   "night",    "point",    "home",
        "water",   "room",     "area",    "money",    "story",   "fact",     "month",    "right",    "book",
        "job",     "word",     "business", "issue",   "side",    "kind",     "head",     "street",    "service",
        "friend",  "power",    "hour",    "game",     "line",    "end",      "member",   "law",      "car",
        "city",    "name",     "team",    "minute",   "idea",    "body",     "back",     "face",     "level",
        "office",  "door",     "health",  "person",   "art",     "history",  "party",    "result",   "change",
        "morning", "reason",   "moment",  "air",      "force",   "education", "several", "large",    "small",
        "early",   "later",    "often",   "among",    "known",   "called",   "made",     "given",    "first"};
    return words;
}

std::string pseudo_word(Rng& rng) {
    static constexpr std::string_view cons = "bdfgklmnprstvz";
    static constexpr std::string_view vow = "aeiou";
    std::uniform_int_distribution<std::size_t> c(0, cons.size() - 1);
    std::uniform_int_distribution<std::size_t> v(0, vow.size() - 1);
    std::string w;
    for (int s = 0; s < 3; ++s) {
        w += cons[c(rng)];
        w += vow[v(rng)];
    }
    w += cons[c(rng)];
    return w;
}

std::size_t zipf_pick(Rng& rng, std::size_t n, double exponent = 0.8) {
    std::vector<double> w(n);
    for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    std::discrete_distribution<std::size_t> d(w.begin(), w.end());
    return d(rng);
}

std::string topic_doc_id(std::size_t t, std::size_t d) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "T%02zu-D%02zu", t, d);
    return buf;
}

// Sentences of a generated document; text is "w w w. w w w. ..." so splitting
// on '.' and blanks recovers the displayed words.
std::vector<std::vector<std::string>> split_sentences(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::stringstream ss(text);
    std::string sentence;
    while (std::getline(ss, sentence, '.')) {
        std::istringstream ws(sentence);
        std::vector<std::string> words;
        for (std::string w; ws >> w;) words.push_back(w);
        if (!words.empty()) out.push_back(std::move(words));
    }
    return out;
}

struct StreamItem {
    std::string word;
    Label label = Label::irrelevant;
    bool separator = false;
};

struct BlockPlan {
    int id = 0;
    std::size_t relevant_topic = 0;
    std::size_t irrelevant_topic = 0;
    std::string relevant_doc;
    std::string irrelevant_doc;
    std::vector<StreamItem> stream;
};

std::vector<BlockPlan> plan_blocks(const SimulationConfig& config, const SimulatedCorpus& corpus) {
    Rng design(derive_seed(config.seed, "design"));
    std::vector<std::size_t> order(corpus.topics.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), design);

    std::map<std::string, std::string> text_of;
    for (const auto& d : corpus.documents) text_of[d.id] = d.text;

    std::vector<BlockPlan> plans;
    for (std::size_t b = 0; b < config.n_blocks; ++b) {
        BlockPlan p;
        p.id = static_cast<int>(b + 1);
        p.relevant_topic = order[(2 * b) % order.size()];
        p.irrelevant_topic = order[(2 * b + 1) % order.size()];
        p.relevant_doc = corpus.topics[p.relevant_topic].doc_ids.front();
        p.irrelevant_doc = corpus.topics[p.irrelevant_topic].doc_ids.front();
        const auto rel_sent = split_sentences(text_of.at(p.relevant_doc));
        const auto irr_sent = split_sentences(text_of.at(p.irrelevant_doc));
        const std::set<std::string> topical(corpus.topics[p.relevant_topic].words.begin(),
                                            corpus.topics[p.relevant_topic].words.end());
        Rng rng(derive_seed(config.seed, "block-order", b));
        for (std::size_t t = 0; t < config.trials_per_block; ++t) {
            const bool rel_first = std::bernoulli_distribution(0.5)(rng);
            for (int half = 0; half < 2; ++half) {
                const bool from_rel = (half == 0) == rel_first;
                const auto& s = from_rel ? rel_sent.at(t) : irr_sent.at(t);
                for (const auto& w : s) {
                    const bool relevant = from_rel && topical.contains(w);
                    p.stream.push_back({w, relevant ? Label::relevant : Label::irrelevant, false});
                }
                p.stream.push_back({"3333333", Label::unlabeled, true});
            }
        }
        plans.push_back(std::move(p));
    }
    return plans;
}

double raised_cosine(double t_ms, double from_ms, double to_ms) {
    if (t_ms < from_ms || t_ms > to_ms) return 0.0;
    return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (t_ms - from_ms) / (to_ms - from_ms)));
}

}  // namespace

SimulatedCorpus generate_corpus(const SimulationConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.seed, "corpus"));
    SimulatedCorpus out;

    const auto& pool = filler_pool();
    std::vector<std::string> fillers = pool;
    std::shuffle(fillers.begin(), fillers.end(), rng);
    out.universal_filler.assign(fillers.begin(), fillers.begin() + 8);
    out.common_filler.assign(fillers.begin() + 8, fillers.begin() + 48);
    std::vector<std::string> generic = out.universal_filler;
    generic.insert(generic.end(), out.common_filler.begin(), out.common_filler.end());
    const std::set<std::string> generic_set(generic.begin(), generic.end());
    auto is_generic = [&](const std::string& w) { return generic_set.contains(w); };

    std::set<std::string> used_stems;
    for (const auto& w : pool) used_stems.insert(text::stem(w));
    for (std::size_t t = 0; t < config.n_topics; ++t) {
        Topic topic;
        char name[16];
        std::snprintf(name, sizeof(name), "T%02zu", t);
        topic.name = name;
        while (topic.words.size() < config.topic_vocabulary) {
            auto w = pseudo_word(rng);
            if (text::is_stop_word(w)) continue;
            if (text::stem(text::stem(w)) != text::stem(w)) continue;
            if (!used_stems.insert(text::stem(w)).second) continue;
            topic.words.push_back(std::move(w));
        }
        out.topics.push_back(std::move(topic));
    }

    const auto stops = text::stop_words();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_stop(0, stops.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_topic(0, config.n_topics - 1);

    for (std::size_t t = 0; t < config.n_topics; ++t) {
        for (std::size_t d = 0; d < config.docs_per_topic; ++d) {
            // The first document of each topic is the one shown while reading;
            // it stays single-topic.
            std::optional<std::size_t> secondary;
            if (d > 0 && u(rng) < config.secondary_topic_rate) {
                std::size_t s = pick_topic(rng);
                if (s == t) s = (s + 1) % config.n_topics;
                secondary = s;
            }
            std::vector<std::vector<std::string>> sentences(config.sentences_per_doc);
            for (auto& s : sentences) {
                for (std::size_t k = 0; k < config.words_per_sentence; ++k) {
                    const double r = u(rng);
                    if (r < config.topical_share) {
                        const std::size_t src = secondary && u(rng) < 0.25 ? *secondary : t;
                        s.push_back(out.topics[src].words[zipf_pick(rng, out.topics[src].words.size())]);
                    } else if (r < config.topical_share + 0.12) {
                        s.emplace_back(stops[pick_stop(rng)]);
                    } else {
                        s.push_back(generic[zipf_pick(rng, generic.size(), 1.1)]);
                    }
                }
            }
            // Every generic word must occur in every document (idf 0): a generic
            // row with small but nonzero tf-idf would give LinRel a high-leverage
            // direction into arbitrary topics. Missing words replace surplus copies.
            std::map<std::string, std::size_t> seen;
            for (const auto& s : sentences) {
                for (const auto& w : s) ++seen[w];
            }
            for (const auto& f : generic) {
                if (seen[f] > 0) continue;
                bool placed = false;
                for (auto& s : sentences) {
                    for (auto& w : s) {
                        if (is_generic(w) && seen[w] > 1) {
                            --seen[w];
                            w = f;
                            seen[f] = 1;
                            placed = true;
                            break;
                        }
                    }
                    if (placed) break;
                }
                if (!placed) throw Error("simulation: documents too short for the generic vocabulary");
            }
            std::string text;
            for (const auto& s : sentences) {
                for (std::size_t k = 0; k < s.size(); ++k) {
                    if (k) text += ' ';
                    text += s[k];
                }
                text += ". ";
            }
            text.pop_back();
            const auto id = topic_doc_id(t, d);
            out.documents.push_back({id, out.topics[t].name + " article " + std::to_string(d), text});
            out.topics[t].doc_ids.push_back(id);

            auto& own = out.judgments[out.topics[t].doc_ids.front()];
            own.topic = out.topics[t].doc_ids.front();
            own.scores[id] = secondary ? 2 : 3;
            if (secondary) {
                // Secondary topics may not have a source document yet; key by id pattern.
                const auto key = topic_doc_id(*secondary, 0);
                auto& other = out.judgments[key];
                other.topic = key;
                other.scores[id] = 1;
            }
        }
    }
    return out;
}

double template_value(Label label, bool affected, double t_ms, const SimulationConfig& config) {
    if (!affected) return 0.0;
    if (label == Label::irrelevant) return -config.n400_amp * raised_cosine(t_ms, 350.0, 500.0);
    if (label == Label::relevant) return config.p600_amp * raised_cosine(t_ms, 500.0, 850.0);
    return 0.0;
}

eeg::Epoch generate_epoch(Label label, const SimulationConfig& config, Rng& rng) {
    eeg::Epoch e;
    e.n_channels = config.n_channels;
    e.n_samples = eeg::epoch_samples(config.fs);
    e.label = label;
    e.data.resize(e.n_channels * e.n_samples);
    std::normal_distribution<double> noise(0.0, config.noise_sd);
    std::vector<bool> affected(config.n_channels, false);
    for (auto c : config.affected_channels) affected.at(c) = true;
    for (std::size_t c = 0; c < e.n_channels; ++c) {
        auto ch = e.channel(c);
        for (std::size_t s = 0; s < e.n_samples; ++s) {
            const double t = eeg::kEpochStartMs + 1000.0 * static_cast<double>(s) / config.fs;
            ch[s] = template_value(label, affected[c], t, config) + noise(rng);
        }
    }
    if (config.artifact_rate > 0.0 && std::bernoulli_distribution(config.artifact_rate)(rng)) {
        std::uniform_real_distribution<double> when(0.0, 1000.0);
        const double centre = when(rng);
        for (std::size_t c = 0; c < std::min<std::size_t>(2, e.n_channels); ++c) {
            auto ch = e.channel(c);
            for (std::size_t s = 0; s < e.n_samples; ++s) {
                const double t = eeg::kEpochStartMs + 1000.0 * static_cast<double>(s) / config.fs;
                const double z = (t - centre) / 50.0;
                ch[s] += config.artifact_amp * std::exp(-0.5 * z * z);
            }
        }
    }
    eeg::baseline_correct(e, eeg::prestimulus_samples(config.fs));
    return e;
}

SimulatedDataset simulate_participant(const SimulationConfig& config) {
    config.validate();
    SimulatedDataset ds;
    ds.corpus = generate_corpus(config);
    auto& p = ds.participant;
    p.participant = config.participant;
    p.fs = config.fs;
    p.channels = channel_names(config.n_channels);
    p.judgments = ds.corpus.judgments;
    for (auto& plan : plan_blocks(config, ds.corpus)) {
        evaluation::ExperimentBlock block;
        block.id = plan.id;
        block.relevant_doc = plan.relevant_doc;
        block.irrelevant_doc = plan.irrelevant_doc;
        Rng rng(derive_seed(config.seed, "epochs", static_cast<std::uint64_t>(plan.id)));
        for (const auto& item : plan.stream) {
            if (item.separator) continue;
            auto e = generate_epoch(item.label, config, rng);
            e.word = item.word;
            e.block = plan.id;
            block.epochs.push_back(std::move(e));
        }
        p.blocks.push_back(std::move(block));
    }
    return ds;
}

eeg::Recording simulate_recording(const SimulationConfig& config, const SimulatedCorpus& corpus,
                                  std::size_t max_blocks) {
    config.validate();
    const auto plans = plan_blocks(config, corpus);
    const auto spacing = static_cast<std::size_t>(std::lround(1.5 * config.fs));
    const std::size_t lead = spacing;
    std::size_t n_items = 0;
    const std::size_t n_blocks = std::min(max_blocks, plans.size());
    for (std::size_t b = 0; b < n_blocks; ++b) n_items += plans[b].stream.size();
    const std::size_t total = lead + n_items * spacing + spacing;

    eeg::Recording rec;
    rec.fs = config.fs;
    rec.channels = channel_names(config.n_channels);
    rec.traces.assign(config.n_channels, std::vector<double>(total));
    Rng rng(derive_seed(config.seed, "recording"));
    std::normal_distribution<double> noise(0.0, config.noise_sd);
    for (auto& tr : rec.traces)
        for (double& v : tr) v = noise(rng);

    std::vector<bool> affected(config.n_channels, false);
    for (auto c : config.affected_channels) affected.at(c) = true;
    std::size_t onset = lead;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (const auto& item : plans[b].stream) {
            eeg::Event ev;
            ev.sample = onset;
            ev.word = item.word;
            ev.block = plans[b].id;
            ev.kind = item.separator ? eeg::StimulusKind::separator : eeg::StimulusKind::word;
            ev.label = item.label;
            rec.events.push_back(ev);
            if (!item.separator) {
                for (std::size_t c = 0; c < config.n_channels; ++c) {
                    if (!affected[c]) continue;
                    for (std::size_t s = 0; s < spacing && onset + s < total; ++s) {
                        const double t = 1000.0 * static_cast<double>(s) / config.fs;
                        rec.traces[c][onset + s] += template_value(item.label, true, t, config);
                    }
                }
            }
            onset += spacing;
        }
    }
    return rec;
}

}  // namespace brainrel::simulator
