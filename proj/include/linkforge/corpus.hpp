#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

namespace linkforge {

/// A citation parsed from a reference string. Citations never carry an
/// abstract. raw_id is "<owning paper id>#<ordinal>" when absent from input.
struct CitationRecord {
    std::string raw_id;
    std::optional<std::string> title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::string cited_by;

    bool operator==(const CitationRecord&) const = default;
};

/// One paper entity. Missing fields are absent optionals, never "".
struct PaperRecord {
    std::string id;
    std::optional<std::string> title;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> abstract;
    std::vector<CitationRecord> citations;

    bool operator==(const PaperRecord&) const = default;
};

enum class CorpusRole { target, reference };

constexpr int kMinYear = 1000;
constexpr int kMaxYear = 3000;

/// Immutable after loading; concurrent reads are safe.
class Corpus {
public:
    explicit Corpus(CorpusRole role = CorpusRole::target) : role_(role) {}

    CorpusRole role() const { return role_; }
    std::size_t size() const { return records_.size(); }
    bool contains(const std::string& id) const { return index_.count(id) > 0; }

    /// Throws on duplicate or empty id, year out of range, or a citation
    /// whose cited_by names a different record. Assigns citation raw_ids.
    void add(PaperRecord record);

    const PaperRecord& get(const std::string& id) const;
    const std::vector<PaperRecord>& records() const { return records_; }

    void to_jsonl(std::ostream& os) const;
    std::string to_jsonl_string() const;

private:
    CorpusRole role_;
    std::vector<PaperRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct LoadReport {
    std::size_t loaded = 0;
    std::size_t malformed = 0;
    std::vector<std::string> warnings;
};

// Reads one JSON record per line:
//   {"id": str, "title": str|null, "authors": [str], "year": int|null,
//    "venue": str|null, "abstract": str|null,
//    "citations": [{"title": str|null, "authors": [str], "year": int|null}]}
// Malformed lines are skipped and reported through `report`; a duplicate id
// or a file with zero well-formed records is fatal.
Corpus load_corpus(const std::filesystem::path& path, CorpusRole role,
                   LoadReport* report = nullptr);

Corpus corpus_from_jsonl(std::istream& is, CorpusRole role, LoadReport* report = nullptr);

/// Citation list of one paper, in input order. Unknown id throws.
const std::vector<CitationRecord>& get_citations(const Corpus& corpus, const std::string& paper_id);

}  // namespace linkforge
