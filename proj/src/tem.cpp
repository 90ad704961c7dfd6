#include "linkforge/tem.hpp"

#include <algorithm>
#include <fstream>

#include "binio.hpp"
#include "linkforge/error.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/textsim.hpp"

namespace linkforge {

bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
        case 0x00A1: case 0x00AB: case 0x00B7: case 0x00BB: case 0x00BF: return true;
        default: break;
    }
    if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, curly quotes, ellipsis
    if (cp >= 0x2030 && cp <= 0x205E) return true;  // permille .. vertical marks
    if (cp >= 0x3001 && cp <= 0x3003) return true;  // CJK comma, stop, ditto
    if (cp >= 0x3008 && cp <= 0x3011) return true;  // CJK brackets
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true;  // fullwidth ASCII punct
    return false;
}

namespace {

bool is_letter(char32_t cp) {
    if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
    if (!detail::fold_letter(cp).empty()) return true;
    if (cp >= 0x0370 && cp <= 0x03FF) return true;  // Greek
    if (cp >= 0x0400 && cp <= 0x04FF) return true;  // Cyrillic
    if (cp >= 0x3040 && cp <= 0x30FF) return true;  // Kana
    if (cp >= 0x4E00 && cp <= 0x9FFF) return true;  // CJK unified
    if (cp >= 0xAC00 && cp <= 0xD7AF) return true;  // Hangul
    return false;
}

bool is_space_cp(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
           cp == 0x00A0;
}

}  // namespace

CharType char_type(char32_t cp) {
    if (cp >= '0' && cp <= '9') return CharType::digit;
    if (is_letter(cp)) return CharType::letter;
    return CharType::punct;
}

DfTable build_df_table(const std::vector<std::string>& titles) {
    if (titles.empty()) throw Error("df table needs at least one title");
    DfTable table;
    table.total_docs = titles.size();
    for (const auto& title : titles) {
        for (const auto& tok : token_set(normalize_title(title))) {
            ++table.df[tok];
        }
    }
    return table;
}

const std::vector<std::string>& tem_stopwords() {
    // The classic Lucene/Solr English list.
    static const std::vector<std::string> kStop = {
        "a",    "an",   "and",   "are",  "as",    "at",   "be",   "but",  "by",
        "for",  "if",   "in",    "into", "is",    "it",   "no",   "not",  "of",
        "on",   "or",   "such",  "that", "the",   "their", "then", "there", "these",
        "they", "this", "to",    "was",  "will",  "with"};
    return kStop;
}

const std::vector<std::string>& controlled_tokens() {
    static const std::vector<std::string> kControlled = {
        "abstract", "list",       "acknowledgments", "notices",  "content",
        "accepted", "authors",    "references",      "null",     "chapter",
        "discussions", "summary"};
    return kControlled;
}

std::array<double, TitleFeatures::kSize> TitleFeatures::as_array() const {
    return {n_ascii,        n_nonascii,      n_spaces, n_punct,   n_consec_punct,
            n_digits,       first_char_type, last_char_type, df_max, df_min,
            df_median,      n_words,         has_controlled_token};
}

const std::array<const char*, TitleFeatures::kSize>& TitleFeatures::names() {
    static const std::array<const char*, kSize> kNames = {
        "n_ascii",  "n_nonascii", "n_spaces",        "n_punct", "n_consec_punct",
        "n_digits", "first_char_type", "last_char_type", "df_max",  "df_min",
        "df_median", "n_words",   "has_controlled_token"};
    return kNames;
}

TitleFeatures tem_features(const std::string& title, const DfTable& df) {
    TitleFeatures f;
    auto cps = detail::utf8_codepoints(title);

    bool prev_punct = false;
    std::size_t run_len = 0;
    for (char32_t cp : cps) {
        if (cp < 0x80) ++f.n_ascii; else ++f.n_nonascii;
        if (is_space_cp(cp)) ++f.n_spaces;
        if (cp >= '0' && cp <= '9') ++f.n_digits;
        bool punct = is_punctuation(cp);
        if (punct) {
            ++f.n_punct;
            ++run_len;
        } else {
            if (prev_punct && run_len >= 2) ++f.n_consec_punct;
            run_len = 0;
        }
        prev_punct = punct;
    }
    if (prev_punct && run_len >= 2) ++f.n_consec_punct;

    if (!cps.empty()) {
        f.first_char_type = static_cast<double>(char_type(cps.front()));
        f.last_char_type = static_cast<double>(char_type(cps.back()));
    }

    f.n_words = static_cast<double>(tokenize(title).size());

    auto norm_tokens = token_set(normalize_title(title));
    const auto& stop = tem_stopwords();
    const auto& ctl = controlled_tokens();
    std::vector<double> dfs;
    for (const auto& tok : norm_tokens) {
        if (std::find(ctl.begin(), ctl.end(), tok) != ctl.end()) f.has_controlled_token = 1;
        if (std::find(stop.begin(), stop.end(), tok) != stop.end()) continue;
        dfs.push_back(static_cast<double>(df.lookup(tok)));
    }
    if (!dfs.empty()) {
        std::sort(dfs.begin(), dfs.end());
        f.df_max = dfs.back();
        f.df_min = dfs.front();
        std::size_t mid = dfs.size() / 2;
        f.df_median = dfs.size() % 2 ? dfs[mid] : 0.5 * (dfs[mid - 1] + dfs[mid]);
    }
    return f;
}

TitleFeatures tem_features(const std::optional<std::string>& title, const DfTable& df) {
    return tem_features(title.value_or(""), df);
}

namespace {

void append_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

char32_t random_nonascii(Rng& rng) {
    switch (rng.below(4)) {
        case 0: return 0x0391 + static_cast<char32_t>(rng.below(0x3A9 - 0x0391));  // Greek caps
        case 1: return 0x03B1 + static_cast<char32_t>(rng.below(0x3C9 - 0x03B1));  // Greek small
        case 2: return 0x0410 + static_cast<char32_t>(rng.below(0x44F - 0x0410));  // Cyrillic
        default: return 0x4E00 + static_cast<char32_t>(rng.below(0x1000));         // CJK
    }
}

std::string junk_title(Rng& rng, const TemSyntheticParams& params) {
    static const std::vector<std::string> kNames = {"Smith", "Jones",  "Lee", "Wang",
                                                    "Kumar", "Garcia", "Chen"};
    static const std::vector<std::string> kFiller = {"pp", "vol", "et", "al", "no", "ed"};
    const auto& ctl = controlled_tokens();

    int span = std::max(1, params.max_junk_tokens - params.min_junk_tokens + 1);
    int n_tokens = params.min_junk_tokens + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    std::string out;
    // Always lead with a controlled token; that is what these strings are.
    std::string lead = ctl[rng.below(ctl.size())];
    lead[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(lead[0])));
    out += lead;
    for (int i = 1; i < n_tokens; ++i) {
        out.push_back(' ');
        switch (rng.below(3)) {
            case 0: out += kNames[rng.below(kNames.size())]; break;
            case 1: out += kFiller[rng.below(kFiller.size())]; break;
            default: out += std::to_string(rng.below(2000)); break;
        }
    }
    return out;
}

}  // namespace

std::vector<std::string> synthesize_bad_titles(const std::vector<std::string>& good_titles,
                                               std::size_t n, const TemSyntheticParams& params,
                                               std::uint64_t seed) {
    if (good_titles.empty()) throw Error("bad-title synthesis needs source titles");
    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (i % 4) {
            case 0:
                out.emplace_back();  // NULL title
                break;
            case 1: {
                const std::string& src = good_titles[rng.below(good_titles.size())];
                std::string bad;
                for (char32_t cp : detail::utf8_codepoints(src)) {
                    append_utf8(rng.chance(params.nonascii_char_frac) ? random_nonascii(rng) : cp,
                                bad);
                }
                out.push_back(std::move(bad));
                break;
            }
            case 2:
                out.push_back(junk_title(rng, params));
                break;
            default: {
                // Character scramble stands in for non-English text.
                auto cps = detail::utf8_codepoints(good_titles[rng.below(good_titles.size())]);
                for (std::size_t j = cps.size(); j > 1; --j) {
                    std::swap(cps[j - 1], cps[rng.below(j)]);
                }
                std::string bad;
                for (char32_t cp : cps) append_utf8(cp, bad);
                out.push_back(std::move(bad));
                break;
            }
        }
    }
    return out;
}

Dataset make_tem_training_set(const std::vector<std::string>& good_titles, std::size_t n_bad,
                              const DfTable& df, const TemSyntheticParams& params,
                              std::uint64_t seed) {
    Dataset data;
    data.schema_version = TitleFeatures::kSchemaVersion;
    for (const char* name : TitleFeatures::names()) data.feature_names.push_back(name);
    for (const auto& title : good_titles) {
        auto arr = tem_features(title, df).as_array();
        data.pairs.push_back({{arr.begin(), arr.end()}, 1});
    }
    for (const auto& title : synthesize_bad_titles(good_titles, n_bad, params, seed)) {
        auto arr = tem_features(title, df).as_array();
        data.pairs.push_back({{arr.begin(), arr.end()}, 0});
    }
    return data;
}

TemModel train_tem(const std::vector<std::string>& good_titles, std::size_t n_bad,
                   const TemSyntheticParams& params, std::uint64_t seed) {
    TemModel tem;
    tem.df = build_df_table(good_titles);
    Dataset data = make_tem_training_set(good_titles, n_bad, tem.df, params, seed);
    TrainOptions options;
    options.seed = seed;
    tem.classifier = train(data, ModelKind::logreg, options);
    return tem;
}

TitleQuality score_title(const TemModel& model, const std::string& title) {
    auto arr = tem_features(title, model.df).as_array();
    return {predict(model.classifier, arr, TitleFeatures::kSchemaVersion).probability};
}

TitleQuality score_title(const TemModel& model, const std::optional<std::string>& title) {
    return score_title(model, title.value_or(""));
}

bool is_low_quality(TitleQuality q, double theta_tq) { return q.theta < theta_tq; }

namespace {
constexpr std::uint32_t kTemFormatVersion = 1;
}

void TemModel::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    os.write("LFTM", 4);
    binio::write_u32(os, kTemFormatVersion);
    classifier.save(os);
    binio::write_u64(os, df.total_docs);
    binio::write_u64(os, df.df.size());
    // Sorted for a canonical byte layout.
    std::vector<std::pair<std::string, std::uint32_t>> entries(df.df.begin(), df.df.end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [token, count] : entries) {
        binio::write_str(os, token);
        binio::write_u32(os, count);
    }
    if (!os) throw Error("write failed for \"" + path.string() + "\"");
}

TemModel TemModel::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    binio::expect_magic(is, "LFTM");
    std::uint32_t version = binio::read_u32(is);
    if (version != kTemFormatVersion) {
        throw Error("unsupported tem format version " + std::to_string(version));
    }
    TemModel tem;
    tem.classifier = Model::load(is);
    tem.df.total_docs = binio::read_u64(is);
    std::uint64_t n_tokens = binio::read_u64(is);
    for (std::uint64_t i = 0; i < n_tokens; ++i) {
        std::string token = binio::read_str(is);
        tem.df.df.emplace(std::move(token), binio::read_u32(is));
    }
    return tem;
}

}  // namespace linkforge
