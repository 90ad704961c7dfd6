#include "linkforge/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binio.hpp"
#include "linkforge/error.hpp"
#include "linkforge/textsim.hpp"

namespace linkforge {

std::optional<Query> build_query(const std::optional<std::string>& title,
                                 const std::optional<std::string>& last_name,
                                 std::optional<int> year) {
    if (title && detail::utf8_codepoints(*title).size() > 20) {
        Query q{tokenize(normalize_title(*title)), QueryKind::title};
        if (!q.terms.empty()) return q;
    }
    if (last_name) {
        std::string name = normalize_title(*last_name);
        if (!name.empty()) {
            if (year) {
                return Query{{name, std::to_string(*year)}, QueryKind::lastname_year};
            }
            return Query{{name}, QueryKind::lastname};
        }
    }
    return std::nullopt;
}

InvertedIndex InvertedIndex::build(const std::vector<std::pair<std::string, std::string>>& docs,
                                   IndexField field) {
    InvertedIndex idx;
    idx.field_ = field;
    std::uint64_t total_len = 0;
    for (const auto& [id, text] : docs) {
        if (idx.id_to_idx_.count(id)) throw Error("duplicate doc id \"" + id + "\"");
        auto doc_idx = static_cast<std::uint32_t>(idx.doc_ids_.size());
        idx.id_to_idx_.emplace(id, doc_idx);
        idx.doc_ids_.push_back(id);

        auto tokens = tokenize(normalize_title(text));
        idx.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();

        std::map<std::string, std::uint32_t> tf;
        for (const auto& tok : tokens) ++tf[tok];
        for (const auto& [term, count] : tf) {
            idx.postings_[term].emplace_back(doc_idx, count);
        }
    }
    idx.avg_doc_length_ =
        docs.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(docs.size());
    return idx;
}

std::uint32_t InvertedIndex::doc_length(const std::string& doc_id) const {
    auto it = id_to_idx_.find(doc_id);
    if (it == id_to_idx_.end()) throw Error("unknown doc id \"" + doc_id + "\"");
    return doc_lengths_[it->second];
}

double InvertedIndex::term_contribution(const std::string& term, std::uint32_t doc_idx,
                                        const Bm25Params& params) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) return 0.0;
    const auto& plist = it->second;
    auto pit = std::lower_bound(plist.begin(), plist.end(), doc_idx,
                                [](const auto& p, std::uint32_t d) { return p.first < d; });
    if (pit == plist.end() || pit->first != doc_idx) return 0.0;

    double n = static_cast<double>(doc_count());
    double df = static_cast<double>(plist.size());
    double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    double tf = static_cast<double>(pit->second);
    double len = static_cast<double>(doc_lengths_[doc_idx]);
    double norm = avg_doc_length_ > 0.0 ? len / avg_doc_length_ : 1.0;
    return idf * tf * (params.k1 + 1.0) / (tf + params.k1 * (1.0 - params.b + params.b * norm));
}

double InvertedIndex::bm25_score(const Query& query, const std::string& doc_id,
                                 const Bm25Params& params) const {
    auto it = id_to_idx_.find(doc_id);
    if (it == id_to_idx_.end()) throw Error("unknown doc id \"" + doc_id + "\"");
    double score = 0.0;
    for (const auto& term : query.terms) {
        score += term_contribution(term, static_cast<std::uint32_t>(it->second), params);
    }
    return score;
}

RankedCandidates InvertedIndex::query_top_k(const Query& query, std::size_t k,
                                            const Bm25Params& params) const {
    // Accumulate per document in query-term order; each document therefore
    // sums its contributions in the same order bm25_score does, which keeps
    // the two routes bit-identical.
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& term : query.terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        for (const auto& [doc_idx, tf] : it->second) {
            acc[doc_idx] += term_contribution(term, doc_idx, params);
        }
    }
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(acc.size());
    for (const auto& [doc_idx, score] : acc) {
        if (score > 0.0) scored.emplace_back(doc_idx, score);
    }
    std::sort(scored.begin(), scored.end(), [this](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return doc_ids_[a.first] < doc_ids_[b.first];
    });
    if (scored.size() > k) scored.resize(k);

    RankedCandidates out;
    out.reserve(scored.size());
    for (const auto& [doc_idx, score] : scored) {
        out.emplace_back(doc_ids_[doc_idx], score);
    }
    return out;
}

void InvertedIndex::save(std::ostream& os) const {
    binio::write_u8(os, static_cast<std::uint8_t>(field_));
    binio::write_u64(os, doc_ids_.size());
    binio::write_f64(os, avg_doc_length_);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        binio::write_str(os, doc_ids_[i]);
        binio::write_u32(os, doc_lengths_[i]);
    }
    binio::write_u64(os, postings_.size());
    for (const auto& [term, plist] : postings_) {
        binio::write_str(os, term);
        binio::write_u32(os, static_cast<std::uint32_t>(plist.size()));
        for (const auto& [doc_idx, tf] : plist) {
            binio::write_u32(os, doc_idx);
            binio::write_u32(os, tf);
        }
    }
}

InvertedIndex InvertedIndex::load(std::istream& is) {
    InvertedIndex idx;
    idx.field_ = static_cast<IndexField>(binio::read_u8(is));
    std::uint64_t n_docs = binio::read_u64(is);
    idx.avg_doc_length_ = binio::read_f64(is);
    idx.doc_ids_.reserve(n_docs);
    idx.doc_lengths_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        std::string id = binio::read_str(is);
        idx.id_to_idx_.emplace(id, idx.doc_ids_.size());
        idx.doc_ids_.push_back(std::move(id));
        idx.doc_lengths_.push_back(binio::read_u32(is));
    }
    std::uint64_t n_terms = binio::read_u64(is);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string term = binio::read_str(is);
        std::uint32_t n_postings = binio::read_u32(is);
        auto& plist = idx.postings_[term];
        plist.reserve(n_postings);
        for (std::uint32_t p = 0; p < n_postings; ++p) {
            std::uint32_t doc_idx = binio::read_u32(is);
            std::uint32_t tf = binio::read_u32(is);
            plist.emplace_back(doc_idx, tf);
        }
    }
    return idx;
}

std::string BlockingIndex::name_year_text(const std::vector<std::string>& authors,
                                          std::optional<int> year) {
    std::string out;
    for (const auto& a : authors) {
        auto name = normalize_author(a);
        if (!name.last) continue;
        if (!out.empty()) out.push_back(' ');
        out += *name.last;
    }
    if (year) {
        if (!out.empty()) out.push_back(' ');
        out += std::to_string(*year);
    }
    return out;
}

BlockingIndex BlockingIndex::build(const Corpus& corpus, IndexSource source) {
    std::vector<std::pair<std::string, std::string>> title_docs;
    std::vector<std::pair<std::string, std::string>> name_docs;
    if (source == IndexSource::papers) {
        title_docs.reserve(corpus.size());
        name_docs.reserve(corpus.size());
        for (const auto& r : corpus.records()) {
            title_docs.emplace_back(r.id, r.title.value_or(""));
            name_docs.emplace_back(r.id, name_year_text(r.authors, r.year));
        }
    } else {
        for (const auto& r : corpus.records()) {
            for (const auto& c : r.citations) {
                title_docs.emplace_back(c.raw_id, c.title.value_or(""));
                name_docs.emplace_back(c.raw_id, name_year_text(c.authors, c.year));
            }
        }
    }
    BlockingIndex out;
    out.source_ = source;
    out.title_ = InvertedIndex::build(title_docs, IndexField::title);
    out.name_year_ = InvertedIndex::build(name_docs, IndexField::name_year);
    return out;
}

RankedCandidates BlockingIndex::query_top_k(const Query& query, std::size_t k,
                                            const Bm25Params& params) const {
    const InvertedIndex& idx = query.kind == QueryKind::title ? title_ : name_year_;
    return idx.query_top_k(query, k, params);
}

namespace {
constexpr std::uint32_t kIndexFormatVersion = 1;
}

void BlockingIndex::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    os.write("LFIX", 4);
    binio::write_u32(os, kIndexFormatVersion);
    binio::write_u8(os, static_cast<std::uint8_t>(source_));
    title_.save(os);
    name_year_.save(os);
    if (!os) throw Error("write failed for \"" + path.string() + "\"");
}

BlockingIndex BlockingIndex::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    binio::expect_magic(is, "LFIX");
    std::uint32_t version = binio::read_u32(is);
    if (version != kIndexFormatVersion) {
        throw Error("unsupported index format version " + std::to_string(version));
    }
    BlockingIndex out;
    out.source_ = static_cast<IndexSource>(binio::read_u8(is));
    out.title_ = InvertedIndex::load(is);
    out.name_year_ = InvertedIndex::load(is);
    return out;
}

}  // namespace linkforge
