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

#include "brainrel/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "brainrel/error.hpp"
#include "brainrel/io.hpp"
#include "brainrel/text.hpp"

namespace brainrel::corpus {

using nlohmann::json;

TermDocumentMatrix TermDocumentMatrix::build(std::span<const Document> docs) {
    if (docs.empty()) throw Error("empty corpus");
    std::vector<DocTerms> counted;
    counted.reserve(docs.size());
    for (const auto& d : docs) {
        std::map<std::string, std::uint32_t> counts;
        for (auto& t : text::analyze(d.text)) ++counts[t];
        counted.push_back({d.id, d.title, {counts.begin(), counts.end()}});
    }
    return from_counts(std::move(counted));
}

TermDocumentMatrix TermDocumentMatrix::from_counts(std::vector<DocTerms> docs) {
    if (docs.empty()) throw Error("empty corpus");
    TermDocumentMatrix m;
    const std::size_t n_docs = docs.size();

    std::map<std::string, std::size_t> df;
    for (std::size_t j = 0; j < n_docs; ++j) {
        auto& d = docs[j];
        if (!m.doc_lookup_.emplace(d.id, j).second) throw Error("duplicate document id '" + d.id + "'");
        m.doc_ids_.push_back(d.id);
        m.doc_titles_.push_back(d.title);
        std::sort(d.counts.begin(), d.counts.end());
        for (const auto& [t, c] : d.counts) {
            if (c == 0) throw Error("document '" + d.id + "' has a zero count for '" + t + "'");
            ++df[t];
        }
    }
    for (const auto& [t, f] : df) {
        m.term_lookup_.emplace(t, m.vocabulary_.size());
        m.vocabulary_.push_back(t);
        m.idf_.push_back(std::log(static_cast<double>(n_docs) / static_cast<double>(f)));
    }

    const std::size_t n_terms = m.vocabulary_.size();
    std::vector<std::uint64_t> term_totals(n_terms, 0);
    m.doc_lengths_.assign(n_docs, 0);
    m.doc_offsets_.assign(n_docs + 1, 0);
    for (std::size_t j = 0; j < n_docs; ++j) {
        for (const auto& [t, c] : docs[j].counts) {
            const std::size_t i = m.term_lookup_.at(t);
            m.doc_postings_.push_back({static_cast<std::uint32_t>(i), c, c * m.idf_[i]});
            m.doc_lengths_[j] += c;
            term_totals[i] += c;
        }
        m.doc_offsets_[j + 1] = m.doc_postings_.size();
    }

    // Transpose the document-major postings into term rows (documents stay ordered).
    m.term_offsets_.assign(n_terms + 1, 0);
    for (const auto& p : m.doc_postings_) ++m.term_offsets_[p.index + 1];
    for (std::size_t i = 0; i < n_terms; ++i) m.term_offsets_[i + 1] += m.term_offsets_[i];
    m.term_postings_.resize(m.doc_postings_.size());
    std::vector<std::size_t> cursor(m.term_offsets_.begin(), m.term_offsets_.end() - 1);
    for (std::size_t j = 0; j < n_docs; ++j) {
        for (std::size_t k = m.doc_offsets_[j]; k < m.doc_offsets_[j + 1]; ++k) {
            const auto& p = m.doc_postings_[k];
            m.term_postings_[cursor[p.index]++] = {static_cast<std::uint32_t>(j), p.count, p.weight};
        }
    }

    for (auto len : m.doc_lengths_) m.collection_length_ += len;
    if (m.collection_length_ == 0) throw Error("corpus has no indexable terms");
    m.collection_probs_.resize(n_terms);
    for (std::size_t i = 0; i < n_terms; ++i) {
        m.collection_probs_[i] =
            static_cast<double>(term_totals[i]) / static_cast<double>(m.collection_length_);
    }
    return m;
}

std::optional<std::size_t> TermDocumentMatrix::term_index(std::string_view term) const {
    auto it = term_lookup_.find(std::string(term));
    if (it == term_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> TermDocumentMatrix::doc_index(std::string_view id) const {
    auto it = doc_lookup_.find(std::string(id));
    if (it == doc_lookup_.end()) return std::nullopt;
    return it->second;
}

std::size_t TermDocumentMatrix::require_doc(std::string_view id) const {
    auto j = doc_index(id);
    if (!j) throw Error("unknown document id '" + std::string(id) + "'");
    return *j;
}

std::span<const Posting> TermDocumentMatrix::term_row(std::size_t i) const {
    if (i >= num_terms()) throw Error("term index out of range");
    return {term_postings_.data() + term_offsets_[i], term_offsets_[i + 1] - term_offsets_[i]};
}

std::span<const Posting> TermDocumentMatrix::doc_column(std::size_t j) const {
    if (j >= num_docs()) throw Error("document index out of range");
    return {doc_postings_.data() + doc_offsets_[j], doc_offsets_[j + 1] - doc_offsets_[j]};
}

namespace {

const Posting* find_posting(std::span<const Posting> row, std::size_t index) {
    auto it = std::lower_bound(row.begin(), row.end(), index,
                               [](const Posting& p, std::size_t v) { return p.index < v; });
    if (it == row.end() || it->index != index) return nullptr;
    return &*it;
}

}  // namespace

std::uint32_t TermDocumentMatrix::count(std::size_t i, std::size_t j) const {
    const Posting* p = find_posting(term_row(i), j);
    return p ? p->count : 0;
}

double TermDocumentMatrix::tfidf(std::size_t i, std::size_t j) const {
    const Posting* p = find_posting(term_row(i), j);
    return p ? p->weight : 0.0;
}

double TermDocumentMatrix::tfidf_of(std::string_view term, std::string_view doc_id) const {
    const std::size_t j = require_doc(doc_id);
    auto i = term_index(term);
    return i ? tfidf(*i, j) : 0.0;
}

double TermDocumentMatrix::word_tfidf(std::string_view word, std::string_view doc_id) const {
    const std::size_t j = require_doc(doc_id);
    auto t = text::term_of_word(word);
    if (!t) return 0.0;
    auto i = term_index(*t);
    return i ? tfidf(*i, j) : 0.0;
}

void TermDocumentMatrix::save(const std::filesystem::path& path) const {
    json docs = json::array();
    for (std::size_t j = 0; j < num_docs(); ++j) {
        json counts = json::object();
        for (const auto& p : doc_column(j)) counts[vocabulary_[p.index]] = p.count;
        docs.push_back({{"id", doc_ids_[j]}, {"title", doc_titles_[j]}, {"counts", counts}});
    }
    json root = {{"format", "brainrel-index"}, {"version", 1}, {"documents", docs}};
    io::write_file_atomic(path, root.dump() + "\n");
}

TermDocumentMatrix TermDocumentMatrix::load(const std::filesystem::path& path) {
    json root;
    try {
        root = json::parse(io::read_file(path));
    } catch (const json::exception& e) {
        throw Error(path.string() + ": malformed index: " + e.what());
    }
    if (root.value("format", "") != "brainrel-index" || root.value("version", 0) != 1) {
        throw Error(path.string() + ": not a version 1 brainrel index");
    }
    std::vector<DocTerms> docs;
    try {
        for (const auto& d : root.at("documents")) {
            DocTerms dt{d.at("id").get<std::string>(), d.at("title").get<std::string>(), {}};
            for (const auto& [t, c] : d.at("counts").items()) {
                dt.counts.emplace_back(t, c.get<std::uint32_t>());
            }
            docs.push_back(std::move(dt));
        }
    } catch (const json::exception& e) {
        throw Error(path.string() + ": malformed index: " + e.what());
    }
    return from_counts(std::move(docs));
}

std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path.string());
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            docs.push_back({j.at("id").get<std::string>(), j.value("title", std::string{}),
                            j.at("text").get<std::string>()});
        } catch (const json::exception& e) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (docs.back().text.empty()) {
            throw Error(path.string() + ":" + std::to_string(line_no) + ": empty text for document '" +
                        docs.back().id + "'");
        }
    }
    return docs;
}

void write_corpus_jsonl(const std::filesystem::path& path, std::span<const Document> docs) {
    std::string out;
    for (const auto& d : docs) {
        out += json{{"id", d.id}, {"title", d.title}, {"text", d.text}}.dump();
        out += '\n';
    }
    io::write_file_atomic(path, out);
}

}  // namespace brainrel::corpus
