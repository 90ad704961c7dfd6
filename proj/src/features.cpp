#include "linkforge/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace linkforge {

std::array<double, FeatureVector::kSize> FeatureVector::as_array() const {
    return {title_simhash_lev,  abstract_simhash_lev,      title_jaccard,
            abstract_jaccard,   year_absdiff,              first_author_code,
            last_author_code,   first_author_lastname_sim, last_author_lastname_sim,
            all_lastnames_jaccard};
}

const std::array<const char*, FeatureVector::kSize>& FeatureVector::names() {
    static const std::array<const char*, kSize> kNames = {
        "title_simhash_lev",  "abstract_simhash_lev",      "title_jaccard",
        "abstract_jaccard",   "year_absdiff",              "first_author_code",
        "last_author_code",   "first_author_lastname_sim", "last_author_lastname_sim",
        "all_lastnames_jaccard"};
    return kNames;
}

namespace {

bool initial_matches(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    return a && b && !a->empty() && !b->empty() && (*a)[0] == (*b)[0];
}

}  // namespace

int fullname_code(const AuthorName& a, const AuthorName& b) {
    int code = 0;
    if (a.last && b.last && *a.last == *b.last) code |= 4;
    if (initial_matches(a.middle, b.middle)) code |= 2;
    if (initial_matches(a.first, b.first)) code |= 1;
    return code;
}

int lastname_sim(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return 1;
    return *a == *b ? 2 : 0;
}

double all_lastnames_jaccard(const std::vector<AuthorName>& a, const std::vector<AuthorName>& b) {
    std::set<std::string> la, lb;
    for (const auto& n : a) {
        if (n.last) la.insert(*n.last);
    }
    for (const auto& n : b) {
        if (n.last) lb.insert(*n.last);
    }
    return jaccard(la, lb);
}

namespace {

std::set<std::string> lower_ws_tokens(const std::string& text) {
    std::string lowered;
    lowered.reserve(text.size());
    for (char c : text) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return token_set(lowered);
}

struct AuthorSide {
    std::vector<AuthorName> names;
    const AuthorName* first = nullptr;
    const AuthorName* last = nullptr;
};

AuthorSide parse_authors(const std::vector<std::string>& raw) {
    AuthorSide side;
    side.names.reserve(raw.size());
    for (const auto& a : raw) side.names.push_back(normalize_author(a));
    if (!side.names.empty()) {
        side.first = &side.names.front();
        side.last = &side.names.back();
    }
    return side;
}

}  // namespace

FeatureVector header_features(const PaperRecord& t, const PaperRecord& r, bool use_abstract) {
    FeatureVector fv;

    if (t.title && r.title) {
        std::string nt = normalize_title(*t.title);
        std::string nr = normalize_title(*r.title);
        fv.title_simhash_lev = normalized_levenshtein(simhash(nt).hex(), simhash(nr).hex());
        fv.title_jaccard = jaccard(token_set(nt), token_set(nr));
    }

    if (use_abstract && t.abstract && r.abstract) {
        // Abstracts are fingerprinted without normalization.
        fv.abstract_simhash_lev =
            normalized_levenshtein(simhash(*t.abstract).hex(), simhash(*r.abstract).hex());
        fv.abstract_jaccard = jaccard(lower_ws_tokens(*t.abstract), lower_ws_tokens(*r.abstract));
    }

    if (t.year && r.year) {
        fv.year_absdiff = std::min(kYearDiffCap, std::fabs(static_cast<double>(*t.year - *r.year)));
    }

    AuthorSide at = parse_authors(t.authors);
    AuthorSide ar = parse_authors(r.authors);
    const AuthorName empty;
    const AuthorName& t_first = at.first ? *at.first : empty;
    const AuthorName& t_last = at.last ? *at.last : empty;
    const AuthorName& r_first = ar.first ? *ar.first : empty;
    const AuthorName& r_last = ar.last ? *ar.last : empty;

    fv.first_author_code = fullname_code(t_first, r_first);
    fv.last_author_code = fullname_code(t_last, r_last);
    fv.first_author_lastname_sim = lastname_sim(t_first.last, r_first.last);
    fv.last_author_lastname_sim = lastname_sim(t_last.last, r_last.last);
    fv.all_lastnames_jaccard = all_lastnames_jaccard(at.names, ar.names);
    return fv;
}

PaperRecord citation_as_record(const CitationRecord& c) {
    PaperRecord r;
    r.id = c.raw_id;
    r.title = c.title;
    r.authors = c.authors;
    r.year = c.year;
    return r;
}

}  // namespace linkforge
