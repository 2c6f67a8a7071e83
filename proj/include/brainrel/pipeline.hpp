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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "brainrel/evaluation.hpp"
#include "brainrel/simulator.hpp"

namespace brainrel::pipeline {

/// Flat dotted-key configuration ("intent.lambda = 0.5"). Every key has a
/// default; files and command-line overrides may only set known keys.
class PipelineConfig {
public:
    PipelineConfig();

    static PipelineConfig from_file(const std::filesystem::path& path);

    /// Throws brainrel::Error for unknown keys.
    void set(const std::string& key, const std::string& value);
    const std::string& get(const std::string& key) const;
    bool has(const std::string& key) const { return values_.contains(key); }
    bool is_default(const std::string& key) const;

    double get_double(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;

    /// Checks every invariant before any work starts.
    void validate() const;

    /// Sorted "key = value" lines for every key.
    std::string canonical() const;
    /// FNV-1a over the canonical form minus paths and thread count.
    std::string hash() const;

    evaluation::PipelineParams params() const;
    simulator::SimulationConfig simulation() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Participant dataset on disk: an epoch file, a blocks file and a judgments file.
//
// blocks.json:     {"participant": ..., "blocks": [{"id", "relevant_doc", "irrelevant_doc"}]}
// judgments.jsonl: one {"topic", "doc_id", "score"} object per line, score 0..3
evaluation::ParticipantData load_participant(const std::filesystem::path& epochs,
                                             const std::filesystem::path& blocks,
                                             const std::filesystem::path& judgments);

void write_blocks(const std::filesystem::path& path, const evaluation::ParticipantData& data);
void write_judgments(const std::filesystem::path& path,
                     const std::map<std::string, evaluation::DocumentJudgments>& judgments);
std::map<std::string, evaluation::DocumentJudgments> read_judgments(const std::filesystem::path& path);

/// Writes corpus.jsonl, judgments.jsonl, <participant>.epochs, <participant>.blocks.json
/// (and, when requested, <participant>.recording.json with one block of raw data).
void write_simulation(const std::filesystem::path& dir, const simulator::SimulatedDataset& ds,
                      const simulator::SimulationConfig& config, bool with_recording);

/// Raw continuous recording as JSON: fs, channels, traces, events.
void write_recording(const std::filesystem::path& path, const eeg::Recording& rec);
eeg::Recording read_recording(const std::filesystem::path& path);

/// One JSON object per block: auc, precision, weighted_precision_rel,
/// weighted_precision_irr, cg10, cg20, cg30, p_class, p_retrieval.
std::string results_jsonl(const evaluation::ParticipantOutcome& outcome, const std::string& config_hash,
                          std::uint64_t seed);
std::string summary_json(const evaluation::ParticipantOutcome& outcome, const std::string& config_hash,
                         std::uint64_t seed);

/// Per-participant summary plus plot-data CSVs built from results files.
void write_report(const std::vector<std::filesystem::path>& results, const std::filesystem::path& out_dir);

}  // namespace brainrel::pipeline
