#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkforge/classifier.hpp"
#include "linkforge/corpus.hpp"
#include "linkforge/index.hpp"
#include "linkforge/tem.hpp"

namespace linkforge {

enum class Provenance : std::uint8_t { hmm = 0, cmm_title = 1, cmm_bow = 2 };

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

/// One accepted match. score is the classifier probability for header
/// matches, 1 - title distance for cmm_title, and the citation bag-of-words
/// Jaccard for cmm_bow.
struct MatchResult {
    std::string target_id;
    std::string reference_id;
    Provenance provenance = Provenance::hmm;
    double score = 0.0;

    bool operator==(const MatchResult&) const = default;
};

struct MatcherConfig {
    std::size_t k_candidates = 10;
    double theta_title = 0.35;
    double theta_ref = 0.5;
    double theta_tq = 0.2;
    bool use_abstract = true;
    Bm25Params bm25;
};

enum class MatchMode : std::uint8_t { hmm = 0, cmm = 1, imm = 2 };

MatchMode match_mode_from_name(const std::string& name);
const char* match_mode_name(MatchMode mode);

// Everything a match run shares across workers. All members are immutable
// once prepare() has run; the citation owner table and per-paper citation
// token sets are precomputed there.
struct MatcherContext {
    const Corpus* reference = nullptr;
    const BlockingIndex* paper_index = nullptr;        // over reference papers
    const BlockingIndex* citation_index = nullptr;     // over reference citations, optional
    const Model* header_model = nullptr;
    const Model* citation_model = nullptr;             // optional, trained without abstracts
    const TemModel* tem = nullptr;                     // optional, gates CMM inside IMM
    MatcherConfig config;

    void prepare();

    const std::pair<const PaperRecord*, const CitationRecord*>* find_citation(
        const std::string& raw_id) const;
    const std::set<std::string>& citation_bow(const std::string& paper_id) const;

private:
    std::unordered_map<std::string, std::pair<const PaperRecord*, const CitationRecord*>>
        citation_owners_;
    std::unordered_map<std::string, std::set<std::string>> citation_bows_;
    static const std::set<std::string> kEmptyBow;
};

struct StageCounts {
    std::uint64_t targets = 0;
    std::uint64_t queried = 0;                // records that produced a query
    std::uint64_t candidates_retrieved = 0;   // blocking hits, both levels
    std::uint64_t classified_positive = 0;    // positive pair decisions, both levels
    std::uint64_t tem_gated = 0;              // low-quality titles sent to CMM
    std::uint64_t cmm_invoked = 0;
    std::uint64_t matched = 0;
    std::uint64_t errors = 0;

    StageCounts& operator+=(const StageCounts& other);
};

/// Header matching: block by query, classify candidates in rank order,
/// first positive wins.
std::optional<MatchResult> hmm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts = nullptr);

// Citation matching: for each citation of t, block against the reference
// citation index and classify; a positive pair nominates the citing paper,
// accepted when the title distance beats theta_title or the citation
// bag-of-words Jaccard beats theta_ref.
std::optional<MatchResult> cmm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts = nullptr);

/// HMM first; on a miss the TEM gate decides if CMM is worth running.
std::optional<MatchResult> imm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts = nullptr);

struct BatchStats {
    StageCounts counts;
    double wall_ms = 0.0;
    int workers = 1;
    MatchMode mode = MatchMode::hmm;
};

/// Matches every target record; output preserves target order and is
/// identical for any worker count. Per-record failures are counted, not fatal.
std::pair<std::vector<MatchResult>, BatchStats> batch_match(const Corpus& target,
                                                            const MatcherContext& ctx,
                                                            MatchMode mode, int workers = 1);

}  // namespace linkforge
