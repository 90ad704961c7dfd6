#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "linkforge/corpus.hpp"
#include "linkforge/textsim.hpp"

namespace linkforge {

// Pairwise similarity vector for one (target, candidate) pair. Missing
// inputs take the worst value of the field's range so models can learn
// absence: 1.0 for distances, 0.0 for similarities, 100 for the year gap.
struct FeatureVector {
    double title_simhash_lev = 1.0;     // [0,1] distance over digest hex
    double abstract_simhash_lev = 1.0;  // [0,1]
    double title_jaccard = 0.0;         // [0,1]
    double abstract_jaccard = 0.0;      // [0,1]
    double year_absdiff = 100.0;        // 0..100, capped
    double first_author_code = 0.0;     // 0..7
    double last_author_code = 0.0;      // 0..7
    double first_author_lastname_sim = 1.0;  // {0,1,2}
    double last_author_lastname_sim = 1.0;   // {0,1,2}
    double all_lastnames_jaccard = 0.0;      // [0,1]

    static constexpr int kSchemaVersion = 1;
    static constexpr std::size_t kSize = 10;

    std::array<double, kSize> as_array() const;
    static const std::array<const char*, kSize>& names();
};

constexpr double kYearDiffCap = 100.0;

// 3-bit name agreement code read as a decimal: bit 4 set when both last
// names are present and equal, bit 2 for the middle initials, bit 1 for the
// first initials. A missing or unequal component contributes 0.
int fullname_code(const AuthorName& a, const AuthorName& b);

/// 0 when both present and unequal, 1 when either is missing, 2 when equal.
int lastname_sim(const std::optional<std::string>& a, const std::optional<std::string>& b);

/// Jaccard over the sets of present last names; 1.0 when both are empty.
double all_lastnames_jaccard(const std::vector<AuthorName>& a, const std::vector<AuthorName>& b);

// The full pairwise vector. use_abstract=false (citation pairs, which have
// no abstracts) pins both abstract features at their missing value. The
// first and last author of a single-author record are the same person.
FeatureVector header_features(const PaperRecord& t, const PaperRecord& r, bool use_abstract = true);

/// Citation viewed as a bare paper record, for citation-level classification.
PaperRecord citation_as_record(const CitationRecord& c);

}  // namespace linkforge
