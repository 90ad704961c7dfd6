#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "linkforge/classifier.hpp"
#include "linkforge/corpus.hpp"
#include "linkforge/index.hpp"
#include "linkforge/matcher.hpp"

namespace linkforge {

/// Known true matches plus targets known to have no reference counterpart.
/// A target id never appears on both sides.
struct GroundTruth {
    std::set<std::pair<std::string, std::string>> pairs;
    std::set<std::string> unmatched_targets;

    void add_pair(std::string target_id, std::string reference_id);
    void add_unmatched(std::string target_id);

    void save(const std::filesystem::path& path) const;
    static GroundTruth load(const std::filesystem::path& path);
};

/// Truth restricted to a subset of target ids.
GroundTruth restrict_truth(const GroundTruth& truth, const std::set<std::string>& target_ids);
std::vector<MatchResult> filter_matches(const std::vector<MatchResult>& matches,
                                        const std::set<std::string>& target_ids);

struct ProvenanceCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
};

/// precision = tp/(tp+fp) and recall = tp/(tp+fn), both 1.0 on 0/0 so that
/// empty-prediction runs stay comparable across sweep cells.
struct EvalReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 0.0;
    std::map<std::string, ProvenanceCounts> by_provenance;
};

EvalReport evaluate(const std::vector<MatchResult>& matches, const GroundTruth& truth);

/// Per-field corruption probabilities for the benchmark generator.
struct NoiseSpec {
    double title_char_error_rate = 0.05;
    double title_truncate_prob = 0.15;
    double title_garbage_prob = 0.20;
    double drop_abstract_prob = 0.30;
    double drop_year_prob = 0.20;
    double drop_author_prob = 0.15;
    double author_initialize_prob = 0.30;
    double citation_subset_frac = 0.70;
    std::uint64_t seed = 42;

    /// "key = value" lines; '#' starts a comment. Unknown keys throw.
    static NoiseSpec from_kv_file(const std::filesystem::path& path);
};

/// Copy provenance for one target citation, for citation-model training.
struct CitationLink {
    std::string target_citation;
    std::string reference_citation;
};

void save_citation_links(const std::vector<CitationLink>& links,
                         const std::filesystem::path& path);
std::vector<CitationLink> load_citation_links(const std::filesystem::path& path);

struct Benchmark {
    Corpus target{CorpusRole::target};
    Corpus reference{CorpusRole::reference};
    GroundTruth truth;
    std::vector<CitationLink> citation_links;
};

/// Deterministic synthetic clean corpus: distinct multi-word titles, authors,
/// years, venues, abstracts and 8..18 citations per paper, a fifth of which
/// come from a shared pool so papers can share citations.
Corpus make_clean_corpus(std::size_t n, std::uint64_t seed);

// Builds a benchmark from a clean corpus: the reference is the clean corpus
// itself, targets are noise-transformed copies of a match_frac sample (the
// true matches) plus n_unmatched fresh records with no counterpart. Fully
// deterministic for a fixed spec.seed.
Benchmark generate_benchmark(const Corpus& clean, const NoiseSpec& spec, double match_frac,
                             std::size_t n_unmatched);

// Labeled header pairs for classifier training: every target's blocking
// candidates, labeled against the truth, plus the true pair itself.
Dataset make_training_pairs(const Corpus& target, const Corpus& reference,
                            const BlockingIndex& paper_index, const GroundTruth& truth,
                            std::size_t k, bool use_abstract);

/// Citation-level pairs labeled by the generator's copy links. max_pairs = 0
/// keeps everything.
Dataset make_citation_training_pairs(const Corpus& target, const Corpus& reference,
                                     const BlockingIndex& citation_index,
                                     const std::vector<CitationLink>& links, std::size_t k,
                                     std::size_t max_pairs = 0);

struct SweepCell {
    double theta_ref = 0.0;
    double theta_title = 0.0;
    EvalReport report;
};

/// One full CMM run per (theta_ref, theta_title) cell; cells run in parallel.
std::vector<SweepCell> sweep_cmm(const Corpus& target, const MatcherContext& base,
                                 const std::vector<double>& theta_refs,
                                 const std::vector<double>& theta_titles,
                                 const GroundTruth& truth, int workers = 1);

/// theta_ref {0.4,0.5,0.6,0.7} and theta_title {0.15,0.25,0.35,0.45}.
std::pair<std::vector<double>, std::vector<double>> default_sweep_grid();

}  // namespace linkforge
