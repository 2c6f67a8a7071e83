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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace brainrel::corpus {

struct Document {
    std::string id;
    std::string title;
    std::string text;
};

struct Posting {
    std::uint32_t index;  // document index in a term row, term index in a document row
    std::uint32_t count;
    double weight;  // tf-idf
};

/// Sparse tf-idf term-document index with the collection statistics the
/// language-model ranker needs. Immutable once built.
///
/// weight(i, j) = c(i|j) * ln(N / df(i)), so a term present in every document
/// carries weight 0 everywhere.
class TermDocumentMatrix {
public:
    static TermDocumentMatrix build(std::span<const Document> docs);

    std::size_t num_terms() const { return vocabulary_.size(); }
    std::size_t num_docs() const { return doc_ids_.size(); }

    /// Sorted lexicographically; term index i is the position in this list.
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const std::string& term(std::size_t i) const { return vocabulary_.at(i); }
    std::optional<std::size_t> term_index(std::string_view term) const;

    const std::string& doc_id(std::size_t j) const { return doc_ids_.at(j); }
    const std::string& doc_title(std::size_t j) const { return doc_titles_.at(j); }
    std::optional<std::size_t> doc_index(std::string_view id) const;
    /// Throws brainrel::Error for an unknown id.
    std::size_t require_doc(std::string_view id) const;

    std::span<const Posting> term_row(std::size_t i) const;
    std::span<const Posting> doc_column(std::size_t j) const;

    std::uint32_t count(std::size_t i, std::size_t j) const;
    double tfidf(std::size_t i, std::size_t j) const;
    double idf(std::size_t i) const { return idf_.at(i); }
    std::size_t doc_freq(std::size_t i) const { return term_row(i).size(); }
    std::uint64_t doc_length(std::size_t j) const { return doc_lengths_.at(j); }
    double collection_prob(std::size_t i) const { return collection_probs_.at(i); }
    std::uint64_t collection_length() const { return collection_length_; }

    /// Stored weight of an already-stemmed term; 0 when the term is not in
    /// the vocabulary or not in the document. Unknown doc ids throw.
    double tfidf_of(std::string_view term, std::string_view doc_id) const;

    /// Weight of a displayed word after the tokenize/stop/stem pipeline.
    double word_tfidf(std::string_view word, std::string_view doc_id) const;

    void save(const std::filesystem::path& path) const;
    static TermDocumentMatrix load(const std::filesystem::path& path);

private:
    std::vector<std::string> vocabulary_;
    std::unordered_map<std::string, std::size_t> term_lookup_;
    std::vector<std::string> doc_ids_;
    std::vector<std::string> doc_titles_;
    std::unordered_map<std::string, std::size_t> doc_lookup_;

    // CSR by term and by document over the same nonzeros.
    std::vector<std::size_t> term_offsets_;
    std::vector<Posting> term_postings_;
    std::vector<std::size_t> doc_offsets_;
    std::vector<Posting> doc_postings_;

    std::vector<double> idf_;
    std::vector<std::uint64_t> doc_lengths_;
    std::vector<double> collection_probs_;
    std::uint64_t collection_length_ = 0;

    struct DocTerms {
        std::string id;
        std::string title;
        std::vector<std::pair<std::string, std::uint32_t>> counts;
    };
    static TermDocumentMatrix from_counts(std::vector<DocTerms> docs);
};

/// One JSON object per line with string fields id, title, text.
std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const std::filesystem::path& path, std::span<const Document> docs);

}  // namespace brainrel::corpus
