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

#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "brainrel/io.hpp"
#include "test_util.hpp"

using namespace brainrel;
using brainrel::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = 0;
    std::string err;
};

// Runs the CLI with stderr captured to a file inside `dir`.
Run cli(const TempDir& dir, const std::string& args) {
    const auto log = dir / "stderr.txt";
    const std::string cmd = std::string("'") + BRAINREL_CLI + "' " + args + " 2> '" + log.string() + "'";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = io::read_file(log);
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kSmall = "--set simulation.n_blocks=3 --set evaluation.permutations=9 --set evaluation.threads=2";

}  // namespace

TEST_CASE("simulate, evaluate, run-block and report") {
    TempDir dir("cli");
    const auto data = dir / "data";
    auto r = cli(dir, kSmall + " simulate --recording -o " + q(data));
    REQUIRE(r.status == 0);
    CHECK(r.err.find("config retrieval.mu = 2000 (default)") != std::string::npos);
    CHECK(r.err.find("config simulation.n_blocks = 3\n") != std::string::npos);
    CHECK(r.err.find("config hash ") != std::string::npos);
    CHECK(fs::exists(data / "SIM01.recording.json"));

    const std::string inputs = " --epochs " + q(data / "SIM01.epochs") + " --blocks " + q(data / "SIM01.blocks.json") +
                               " --judgments " + q(data / "judgments.jsonl");
    r = cli(dir, kSmall + " index --corpus " + q(data / "corpus.jsonl") + " -o " + q(dir / "index.bin"));
    REQUIRE(r.status == 0);

    r = cli(dir, kSmall + " evaluate" + inputs + " --corpus " + q(data / "corpus.jsonl") + " -o " + q(dir / "e1"));
    REQUIRE(r.status == 0);
    r = cli(dir, kSmall + " --set evaluation.threads=1 evaluate" + inputs + " --index " + q(dir / "index.bin") +
                     " -o " + q(dir / "e2"));
    REQUIRE(r.status == 0);
    const auto a = io::read_file(dir / "e1" / "SIM01.results.jsonl");
    CHECK(a == io::read_file(dir / "e2" / "SIM01.results.jsonl"));
    CHECK(io::read_file(dir / "e1" / "SIM01.summary.json") == io::read_file(dir / "e2" / "SIM01.summary.json"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 3);

    r = cli(dir, kSmall + " run-block --block 2" + inputs + " --index " + q(dir / "index.bin") + " -o " +
                     q(dir / "rb"));
    REQUIRE(r.status == 0);
    for (const char* f : {"block2.predictions.jsonl", "block2.ranked.jsonl", "block2.query.tsv",
                          "block2.results.jsonl", "block2.model.txt"}) {
        CHECK(fs::exists(dir / "rb" / f));
    }
    // The single-block run matches the same fold of the full evaluation.
    const auto block_line = io::read_file(dir / "rb" / "block2.results.jsonl");
    const auto rb = nlohmann::json::parse(block_line);
    const auto full = nlohmann::json::parse(a.substr(a.find('\n') + 1, a.find('\n', a.find('\n') + 1) - a.find('\n') - 1));
    CHECK(rb["auc"] == full["auc"]);
    CHECK(rb["cg30"] == full["cg30"]);

    r = cli(dir, kSmall + " report " + q(dir / "e1" / "SIM01.results.jsonl") + " -o " + q(dir / "rep"));
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "rep" / "summary.csv"));

    r = cli(dir, "preprocess " + q(data / "SIM01.recording.json") + " -o " + q(dir / "pre.epochs"));
    REQUIRE(r.status == 0);
    CHECK(fs::exists(dir / "pre.epochs"));
    const auto rep = nlohmann::json::parse(io::read_file(dir / "pre.epochs.report.json"));
    CHECK(rep.contains("epochs_in"));
}

TEST_CASE("errors produce one JSON line and a nonzero exit") {
    TempDir dir("cli");
    auto r = cli(dir, "--set retrieval.mu=-1 simulate -o " + q(dir / "x"));
    CHECK(r.status == 1);
    const auto last = r.err.substr(r.err.rfind('{'));
    const auto j = nlohmann::json::parse(last);
    CHECK(j["command"] == "simulate");
    CHECK(j["error"] == "config: retrieval.mu must be positive");

    r = cli(dir, "evaluate --epochs " + q(dir / "missing.epochs"));
    CHECK(r.status == 1);
    CHECK(r.err.find("\"command\":\"evaluate\"") != std::string::npos);

    r = cli(dir, "--set bogus.key=1 report x");
    CHECK(r.status == 1);
    CHECK(r.err.find("unknown key 'bogus.key'") != std::string::npos);
}
