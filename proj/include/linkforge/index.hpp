#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linkforge/corpus.hpp"

namespace linkforge {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

enum class QueryKind { title, lastname_year, lastname };

struct Query {
    std::vector<std::string> terms;  // never empty
    QueryKind kind = QueryKind::title;
};

// Title-first query construction: a title longer than 20 characters (raw
// codepoints, before normalization) queries the title field; otherwise the
// first author's last name plus year, then the last name alone. Returns
// nullopt when no field is usable. A long title that normalizes to zero
// tokens falls through to the name branches.
std::optional<Query> build_query(const std::optional<std::string>& title,
                                 const std::optional<std::string>& last_name,
                                 std::optional<int> year);

/// Ranked doc ids with scores, non-increasing, at most k entries.
using RankedCandidates = std::vector<std::pair<std::string, double>>;

enum class IndexField : std::uint8_t { title = 0, name_year = 1 };

/// In-memory inverted index over one field. Immutable once built; queries
/// allocate no shared state and may run from any number of threads.
class InvertedIndex {
public:
    /// Text is normalized with normalize_title and split on whitespace.
    /// Duplicate doc ids throw. An empty doc list builds an empty index.
    static InvertedIndex build(const std::vector<std::pair<std::string, std::string>>& docs,
                               IndexField field);

    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    IndexField field() const { return field_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::uint32_t doc_length(const std::string& doc_id) const;

    // Okapi BM25 with the OR (union) reading of the query: every term in
    // query.terms contributes
    //   idf(t) * tf*(k1+1) / (tf + k1*(1 - b + b*len/avglen))
    // where idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)). Terms repeated in
    // the query contribute once per occurrence. Unknown doc_id throws.
    double bm25_score(const Query& query, const std::string& doc_id,
                      const Bm25Params& params = {}) const;

    /// The k best positive-score docs, ties broken by ascending doc id.
    RankedCandidates query_top_k(const Query& query, std::size_t k,
                                 const Bm25Params& params = {}) const;

    void save(std::ostream& os) const;
    static InvertedIndex load(std::istream& is);

private:
    IndexField field_ = IndexField::title;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::size_t> id_to_idx_;
    // Postings sorted by doc index; map keeps the on-disk layout canonical.
    std::map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>> postings_;
    double avg_doc_length_ = 0.0;

    double term_contribution(const std::string& term, std::uint32_t doc_idx,
                             const Bm25Params& params) const;
};

enum class IndexSource : std::uint8_t { papers = 0, citations = 1 };

// The blocking structure for one reference corpus: a title index plus a
// composite index over all author last names and the year, so the non-title
// query branches have a field to hit. Built over papers for header matching
// or over every citation (doc ids are citation raw_ids) for citation
// matching.
class BlockingIndex {
public:
    static BlockingIndex build(const Corpus& corpus, IndexSource source);

    IndexSource source() const { return source_; }
    const InvertedIndex& title_index() const { return title_; }
    const InvertedIndex& name_year_index() const { return name_year_; }

    /// Routes by query kind: title queries hit the title field, the name
    /// branches hit the composite field.
    RankedCandidates query_top_k(const Query& query, std::size_t k,
                                 const Bm25Params& params = {}) const;

    void save(const std::filesystem::path& path) const;
    static BlockingIndex load(const std::filesystem::path& path);

    /// Composite name+year text for one record, as indexed.
    static std::string name_year_text(const std::vector<std::string>& authors,
                                      std::optional<int> year);

private:
    IndexSource source_ = IndexSource::papers;
    InvertedIndex title_;
    InvertedIndex name_year_;
};

}  // namespace linkforge
