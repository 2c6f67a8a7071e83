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
#include <map>
#include <string>
#include <vector>

#include "brainrel/corpus.hpp"
#include "brainrel/eeg.hpp"
#include "brainrel/evaluation.hpp"
#include "brainrel/rng.hpp"

namespace brainrel::simulator {

struct SimulationConfig {
    std::string participant = "SIM01";
    std::size_t n_channels = 16;
    double fs = 200.0;
    std::size_t n_blocks = 8;
    std::size_t trials_per_block = 6;
    double noise_sd = 8.0;   // µV, white Gaussian per channel and sample
    double n400_amp = 0.8;   // µV negativity on irrelevant words, [350, 500] ms
    double p600_amp = 1.0;   // µV positivity on relevant words, [500, 850] ms
    std::vector<std::size_t> affected_channels = {8, 10, 11, 12, 13, 14};  // Cz CP1 CP2 P3 Pz P4
    std::uint64_t seed = 1;

    // Corpus shape.
    std::size_t n_topics = 16;
    std::size_t docs_per_topic = 10;
    std::size_t topic_vocabulary = 40;
    std::size_t sentences_per_doc = 14;
    std::size_t words_per_sentence = 12;
    double topical_share = 0.35;
    double secondary_topic_rate = 0.3;

    // Blink-like transients on the first two channels; off by default.
    double artifact_rate = 0.0;
    double artifact_amp = 60.0;

    /// Throws brainrel::Error when an invariant does not hold.
    void validate() const;
};

std::vector<std::string> channel_names(std::size_t n_channels);

struct Topic {
    std::string name;
    std::vector<std::string> words;  // surface forms, disjoint across topics
    std::vector<std::string> doc_ids;
};

struct SimulatedCorpus {
    std::vector<corpus::Document> documents;
    std::vector<Topic> topics;
    // Generic vocabulary; every word of both lists occurs in every document.
    std::vector<std::string> universal_filler;
    std::vector<std::string> common_filler;
    std::map<std::string, evaluation::DocumentJudgments> judgments;  // keyed by topic source doc
};

SimulatedCorpus generate_corpus(const SimulationConfig& config);

/// Noise-free template value of one channel at time t_ms.
double template_value(eeg::Label label, bool affected, double t_ms, const SimulationConfig& config);

/// Baseline-corrected synthetic epoch for one word.
eeg::Epoch generate_epoch(eeg::Label label, const SimulationConfig& config, Rng& rng);

struct SimulatedDataset {
    SimulatedCorpus corpus;
    evaluation::ParticipantData participant;
};

/// Corpus, eight (by default) reading blocks and their epochs.
SimulatedDataset simulate_participant(const SimulationConfig& config);

/// Continuous recording of the same reading blocks, words 1.5 s apart with a
/// separator between sentences, for exercising the preprocessing path.
eeg::Recording simulate_recording(const SimulationConfig& config, const SimulatedCorpus& corpus,
                                  std::size_t max_blocks = 1);

}  // namespace brainrel::simulator
