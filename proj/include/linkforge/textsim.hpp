#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace linkforge {

/// Structured person name. All components are lowercase, diacritic-free and
/// stripped of honorific prefixes and generational suffixes.
struct AuthorName {
    std::optional<std::string> first;
    std::optional<std::string> middle;
    std::optional<std::string> last;

    bool operator==(const AuthorName&) const = default;
};

/// 64-bit simhash fingerprint rendered as 16 lowercase hex characters.
struct Simhash {
    std::uint64_t digest = 0;

    std::string hex() const;
    bool operator==(const Simhash&) const = default;
};

// Title normalization, applied in this order:
//   1. letters lowercased
//   2. diacritics folded to their ASCII base letters (unfoldable non-ASCII
//      acts as a separator)
//   3. punctuation replaced by a space, so hyphenated words split in two
//   4. standalone "s" and "t" tokens dropped (leftovers of apostrophe
//      removal in possessives and contractions)
//   5. whitespace collapsed and trimmed
// Output always matches ^[a-z0-9 ]*$ and the function is idempotent.
std::string normalize_title(std::string_view raw);

/// Token set of a normalized title; ordinary whitespace split.
std::vector<std::string> tokenize(std::string_view text);
std::set<std::string> token_set(std::string_view text);

/// Default honorific/generational tokens removed from names.
const std::vector<std::string>& default_name_affixes();

// Splits a raw name into (first, middle, last). One token is a bare last
// name, two are (first, last), three or more take the second token as the
// middle name and the final token as the last name.
AuthorName normalize_author(std::string_view raw,
                            const std::vector<std::string>& affixes = default_name_affixes());

// Word-unigram simhash over whitespace tokens. Each token is hashed with
// 64-bit FNV-1a; bit sums are weighted by token count and the digest takes
// the sign of each sum, with sign(0) = 0. Empty input gives an all-zero
// digest. Titles should be normalized first; abstracts are hashed as-is.
Simhash simhash(std::string_view text);

/// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// levenshtein(a, b) / max(|a|, |b|); 0 when both strings are empty.
double normalized_levenshtein(std::string_view a, std::string_view b);

/// Set Jaccard; 1.0 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

namespace detail {

/// Decodes UTF-8; invalid bytes come back as U+FFFD.
std::vector<char32_t> utf8_codepoints(std::string_view text);

/// Lowercased ASCII expansion of a Latin letter ("" when cp has none).
std::string fold_letter(char32_t cp);

}  // namespace detail

}  // namespace linkforge
