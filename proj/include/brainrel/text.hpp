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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace brainrel::text {

/// Splits on every non-alphanumeric byte (non-ASCII bytes included), lowercases,
/// and drops empty and all-digit tokens. Order is preserved.
std::vector<std::string> tokenize(std::string_view text);

/// The 33-word English stop list shipped with Lucene 4.10.
std::span<const std::string_view> stop_words();
bool is_stop_word(std::string_view token);
std::vector<std::string> remove_stopwords(std::span<const std::string> tokens);

/// Porter (1980) suffix stripper, all five steps. Expects a lowercase token.
std::string stem(std::string_view token);

/// tokenize -> remove_stopwords -> stem.
std::vector<std::string> analyze(std::string_view text);

/// Term for a single displayed word, or nullopt when the word yields nothing
/// indexable (stop word, separator string, punctuation). A word that tokenizes
/// into several pieces maps to the stem of its first non-stop piece.
std::optional<std::string> term_of_word(std::string_view word);

}  // namespace brainrel::text
