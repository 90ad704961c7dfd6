#include "linkforge/matcher.hpp"

#include <chrono>

#include "linkforge/error.hpp"
#include "linkforge/features.hpp"
#include "linkforge/parallel.hpp"
#include "linkforge/textsim.hpp"

namespace linkforge {

const std::set<std::string> MatcherContext::kEmptyBow = {};

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::hmm: return "hmm";
        case Provenance::cmm_title: return "cmm_title";
        case Provenance::cmm_bow: return "cmm_bow";
    }
    return "hmm";
}

Provenance provenance_from_name(const std::string& name) {
    if (name == "hmm") return Provenance::hmm;
    if (name == "cmm_title") return Provenance::cmm_title;
    if (name == "cmm_bow") return Provenance::cmm_bow;
    throw Error("unknown provenance \"" + name + "\"");
}

MatchMode match_mode_from_name(const std::string& name) {
    if (name == "hmm") return MatchMode::hmm;
    if (name == "cmm") return MatchMode::cmm;
    if (name == "imm") return MatchMode::imm;
    throw Error("unknown match mode \"" + name + "\"");
}

const char* match_mode_name(MatchMode mode) {
    switch (mode) {
        case MatchMode::hmm: return "hmm";
        case MatchMode::cmm: return "cmm";
        case MatchMode::imm: return "imm";
    }
    return "hmm";
}

void MatcherContext::prepare() {
    citation_owners_.clear();
    citation_bows_.clear();
    if (!reference) throw Error("matcher context has no reference corpus");
    for (const auto& r : reference->records()) {
        std::set<std::string> bow;
        for (const auto& c : r.citations) {
            citation_owners_.emplace(c.raw_id, std::make_pair(&r, &c));
            if (c.title) {
                for (const auto& tok : tokenize(normalize_title(*c.title))) bow.insert(tok);
            }
        }
        citation_bows_.emplace(r.id, std::move(bow));
    }
}

const std::pair<const PaperRecord*, const CitationRecord*>* MatcherContext::find_citation(
    const std::string& raw_id) const {
    auto it = citation_owners_.find(raw_id);
    return it == citation_owners_.end() ? nullptr : &it->second;
}

const std::set<std::string>& MatcherContext::citation_bow(const std::string& paper_id) const {
    auto it = citation_bows_.find(paper_id);
    return it == citation_bows_.end() ? kEmptyBow : it->second;
}

StageCounts& StageCounts::operator+=(const StageCounts& other) {
    targets += other.targets;
    queried += other.queried;
    candidates_retrieved += other.candidates_retrieved;
    classified_positive += other.classified_positive;
    tem_gated += other.tem_gated;
    cmm_invoked += other.cmm_invoked;
    matched += other.matched;
    errors += other.errors;
    return *this;
}

namespace {

std::optional<std::string> first_author_lastname(const std::vector<std::string>& authors) {
    if (authors.empty()) return std::nullopt;
    return normalize_author(authors.front()).last;
}

}  // namespace

std::optional<MatchResult> hmm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts) {
    if (!ctx.paper_index || !ctx.header_model) throw Error("header matcher is not configured");
    auto query = build_query(t.title, first_author_lastname(t.authors), t.year);
    if (!query) return std::nullopt;
    if (counts) ++counts->queried;

    auto candidates = ctx.paper_index->query_top_k(*query, ctx.config.k_candidates,
                                                   ctx.config.bm25);
    if (counts) counts->candidates_retrieved += candidates.size();
    for (const auto& [candidate_id, bm25] : candidates) {
        const PaperRecord& r = ctx.reference->get(candidate_id);
        auto fv = header_features(t, r, ctx.config.use_abstract).as_array();
        auto pred = predict(*ctx.header_model, fv, FeatureVector::kSchemaVersion);
        if (pred.label == 1) {
            if (counts) ++counts->classified_positive;
            return MatchResult{t.id, r.id, Provenance::hmm, pred.probability};
        }
    }
    return std::nullopt;
}

std::optional<MatchResult> cmm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts) {
    if (!ctx.citation_index || !ctx.citation_model) return std::nullopt;
    if (counts) ++counts->cmm_invoked;
    if (t.citations.empty()) return std::nullopt;

    // Target-side citation bag of words, built once and only if needed.
    std::optional<std::set<std::string>> bow_t;
    auto target_bow = [&]() -> const std::set<std::string>& {
        if (!bow_t) {
            bow_t.emplace();
            for (const auto& c : t.citations) {
                if (!c.title) continue;
                for (const auto& tok : tokenize(normalize_title(*c.title))) bow_t->insert(tok);
            }
        }
        return *bow_t;
    };

    std::optional<std::string> t_digest;
    if (t.title) t_digest = simhash(normalize_title(*t.title)).hex();

    for (const auto& tc : t.citations) {
        auto query = build_query(tc.title, first_author_lastname(tc.authors), tc.year);
        if (!query) continue;
        if (counts) ++counts->queried;
        auto candidates = ctx.citation_index->query_top_k(*query, ctx.config.k_candidates,
                                                          ctx.config.bm25);
        if (counts) counts->candidates_retrieved += candidates.size();

        PaperRecord tc_record = citation_as_record(tc);
        for (const auto& [rc_id, bm25] : candidates) {
            const auto* owner = ctx.find_citation(rc_id);
            if (!owner) continue;
            auto fv = header_features(tc_record, citation_as_record(*owner->second),
                                      /*use_abstract=*/false)
                          .as_array();
            if (predict(*ctx.citation_model, fv, FeatureVector::kSchemaVersion).label != 1) {
                continue;
            }
            if (counts) ++counts->classified_positive;
            const PaperRecord& r = *owner->first;

            if (t_digest && r.title) {
                double dist = normalized_levenshtein(
                    *t_digest, simhash(normalize_title(*r.title)).hex());
                if (dist < ctx.config.theta_title) {
                    return MatchResult{t.id, r.id, Provenance::cmm_title, 1.0 - dist};
                }
            }
            double sim = jaccard(target_bow(), ctx.citation_bow(r.id));
            if (sim > ctx.config.theta_ref) {
                return MatchResult{t.id, r.id, Provenance::cmm_bow, sim};
            }
        }
    }
    return std::nullopt;
}

std::optional<MatchResult> imm_match(const PaperRecord& t, const MatcherContext& ctx,
                                     StageCounts* counts) {
    if (auto found = hmm_match(t, ctx, counts)) return found;
    if (!ctx.tem) return std::nullopt;
    TitleQuality quality = score_title(*ctx.tem, t.title);
    if (!is_low_quality(quality, ctx.config.theta_tq)) return std::nullopt;
    if (counts) ++counts->tem_gated;
    return cmm_match(t, ctx, counts);
}

std::pair<std::vector<MatchResult>, BatchStats> batch_match(const Corpus& target,
                                                            const MatcherContext& ctx,
                                                            MatchMode mode, int workers) {
    auto start = std::chrono::steady_clock::now();
    const auto& records = target.records();
    std::vector<std::optional<MatchResult>> slots(records.size());
    std::vector<StageCounts> worker_counts(records.size());

    parallel_for(records.size(), workers, [&](std::size_t i) {
        StageCounts& counts = worker_counts[i];
        ++counts.targets;
        try {
            switch (mode) {
                case MatchMode::hmm: slots[i] = hmm_match(records[i], ctx, &counts); break;
                case MatchMode::cmm: slots[i] = cmm_match(records[i], ctx, &counts); break;
                case MatchMode::imm: slots[i] = imm_match(records[i], ctx, &counts); break;
            }
        } catch (const std::exception&) {
            ++counts.errors;  // a bad record must not sink a multi-day run
            slots[i] = std::nullopt;
        }
        if (slots[i]) ++counts.matched;
    });

    BatchStats stats;
    stats.mode = mode;
    stats.workers = std::max(1, workers);
    for (const auto& c : worker_counts) stats.counts += c;

    std::vector<MatchResult> results;
    results.reserve(records.size());
    for (auto& slot : slots) {
        if (slot) results.push_back(std::move(*slot));
    }
    stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              start)
                        .count();
    return {std::move(results), stats};
}

}  // namespace linkforge
