#include "linkforge/textsim.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace linkforge {

namespace detail {

std::vector<char32_t> utf8_codepoints(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (c < 0x80) {
            cp = c;
        } else if ((c >> 5) == 0x6 && i + 1 < text.size()) {
            cp = (c & 0x1F) << 6 | (text[i + 1] & 0x3F);
            len = 2;
        } else if ((c >> 4) == 0xE && i + 2 < text.size()) {
            cp = (c & 0x0F) << 12 | (text[i + 1] & 0x3F) << 6 | (text[i + 2] & 0x3F);
            len = 3;
        } else if ((c >> 3) == 0x1E && i + 3 < text.size()) {
            cp = (c & 0x07) << 18 | (text[i + 1] & 0x3F) << 12 | (text[i + 2] & 0x3F) << 6 |
                 (text[i + 3] & 0x3F);
            len = 4;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string fold_letter(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return std::string(1, static_cast<char>(cp - 'A' + 'a'));
    if (cp >= 'a' && cp <= 'z') return std::string(1, static_cast<char>(cp));

    // Latin-1 Supplement.
    switch (cp) {
        case 0x00DF: return "ss";                      // ß
        case 0x00C6: case 0x00E6: return "ae";         // Æ æ
        case 0x0152: case 0x0153: return "oe";         // Œ œ
        case 0x00D0: case 0x00F0: return "d";          // Ð ð
        case 0x00DE: case 0x00FE: return "th";         // Þ þ
        default: break;
    }
    static constexpr std::pair<char32_t, char32_t> kRanges[] = {
        {0x00C0, 0x00C5}, {0x00E0, 0x00E5},  // A/a grave..ring
        {0x00C7, 0x00C7}, {0x00E7, 0x00E7},  // C cedilla
        {0x00C8, 0x00CB}, {0x00E8, 0x00EB},  // E
        {0x00CC, 0x00CF}, {0x00EC, 0x00EF},  // I
        {0x00D1, 0x00D1}, {0x00F1, 0x00F1},  // N tilde
        {0x00D2, 0x00D6}, {0x00F2, 0x00F6},  // O
        {0x00D8, 0x00D8}, {0x00F8, 0x00F8},  // O slash
        {0x00D9, 0x00DC}, {0x00F9, 0x00FC},  // U
        {0x00DD, 0x00DD}, {0x00FD, 0x00FD}, {0x00FF, 0x00FF},  // Y
    };
    static constexpr char kRangeBase[] = {'a', 'a', 'c', 'c', 'e', 'e', 'i', 'i', 'n', 'n',
                                          'o', 'o', 'o', 'o', 'u', 'u', 'y', 'y', 'y'};
    for (std::size_t k = 0; k < std::size(kRanges); ++k) {
        if (cp >= kRanges[k].first && cp <= kRanges[k].second) return std::string(1, kRangeBase[k]);
    }

    // Latin Extended-A: base letter cycles in blocks of accent variants.
    if (cp >= 0x0100 && cp <= 0x017F) {
        static constexpr struct { char32_t lo, hi; const char* base; } kExtA[] = {
            {0x0100, 0x0105, "a"}, {0x0106, 0x010D, "c"}, {0x010E, 0x0111, "d"},
            {0x0112, 0x011B, "e"}, {0x011C, 0x0123, "g"}, {0x0124, 0x0127, "h"},
            {0x0128, 0x0131, "i"}, {0x0132, 0x0133, "ij"}, {0x0134, 0x0135, "j"},
            {0x0136, 0x0138, "k"}, {0x0139, 0x0142, "l"}, {0x0143, 0x014B, "n"},
            {0x014C, 0x0151, "o"}, {0x0154, 0x0159, "r"}, {0x015A, 0x0161, "s"},
            {0x0162, 0x0167, "t"}, {0x0168, 0x0173, "u"}, {0x0174, 0x0175, "w"},
            {0x0176, 0x0178, "y"}, {0x0179, 0x017E, "z"}, {0x017F, 0x017F, "s"},
        };
        for (const auto& e : kExtA) {
            if (cp >= e.lo && cp <= e.hi) return e.base;
        }
    }
    return "";
}

}  // namespace detail

namespace {

void append_normalized(std::string_view raw, std::string& out) {
    for (char32_t cp : detail::utf8_codepoints(raw)) {
        if (cp >= '0' && cp <= '9') {
            out.push_back(static_cast<char>(cp));
            continue;
        }
        std::string folded = detail::fold_letter(cp);
        if (!folded.empty()) {
            out += folded;
        } else {
            // Whitespace, punctuation and unfoldable characters all separate.
            out.push_back(' ');
        }
    }
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

}  // namespace

std::string normalize_title(std::string_view raw) {
    std::string folded;
    folded.reserve(raw.size());
    append_normalized(raw, folded);

    std::string out;
    out.reserve(folded.size());
    for (const auto& tok : split_ws(folded)) {
        if (tok == "s" || tok == "t") continue;
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) { return split_ws(text); }

std::set<std::string> token_set(std::string_view text) {
    auto toks = split_ws(text);
    return {toks.begin(), toks.end()};
}

const std::vector<std::string>& default_name_affixes() {
    static const std::vector<std::string> kAffixes = {"prof", "dr", "mr", "mrs", "ms",
                                                      "jr",   "sr", "ii", "iii", "iv"};
    return kAffixes;
}

AuthorName normalize_author(std::string_view raw, const std::vector<std::string>& affixes) {
    std::string folded;
    folded.reserve(raw.size());
    append_normalized(raw, folded);

    std::vector<std::string> tokens;
    for (auto& tok : split_ws(folded)) {
        if (std::find(affixes.begin(), affixes.end(), tok) != affixes.end()) continue;
        tokens.push_back(std::move(tok));
    }

    AuthorName name;
    if (tokens.empty()) return name;
    if (tokens.size() == 1) {
        name.last = tokens[0];
    } else if (tokens.size() == 2) {
        name.first = tokens[0];
        name.last = tokens[1];
    } else {
        name.first = tokens[0];
        name.middle = tokens[1];
        name.last = tokens.back();
    }
    return name;
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

Simhash simhash(std::string_view text) {
    std::array<long long, 64> sums{};
    // Token multiplicity weights its contribution.
    for (const auto& tok : split_ws(text)) {
        std::uint64_t h = fnv1a(tok);
        for (int b = 0; b < 64; ++b) {
            sums[b] += (h >> b) & 1 ? 1 : -1;
        }
    }
    Simhash out;
    for (int b = 0; b < 64; ++b) {
        if (sums[b] > 0) out.digest |= 1ULL << b;
    }
    return out;
}

std::string Simhash::hex() const {
    static const char* kDigits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
        out[15 - i] = kDigits[(digest >> (4 * i)) & 0xF];
    }
    return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(a.size() + 1), cur(a.size() + 1);
    for (std::size_t i = 0; i <= a.size(); ++i) prev[i] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t sub = prev[i - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[i] = std::min({prev[i] + 1, cur[i - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[a.size()];
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
    std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& x : small) {
        if (large.count(x)) ++inter;
    }
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace linkforge
