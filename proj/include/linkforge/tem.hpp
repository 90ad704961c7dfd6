#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkforge/classifier.hpp"

namespace linkforge {

// Character classes used by the title features. "Punctuation" is the ASCII
// punctuation set plus the documented non-ASCII marks in is_punctuation();
// "letter" covers ASCII letters, foldable Latin letters and the major
// non-Latin letter blocks (Greek, Cyrillic, CJK, Kana, Hangul).
enum class CharType : std::uint8_t { punct = 0, digit = 1, letter = 2 };

bool is_punctuation(char32_t cp);
CharType char_type(char32_t cp);

/// Document frequencies of normalized title unigrams over a title corpus.
/// Stopwords are kept in the table and only excluded at feature time.
struct DfTable {
    std::unordered_map<std::string, std::uint32_t> df;
    std::uint64_t total_docs = 0;

    std::uint32_t lookup(const std::string& token) const {
        auto it = df.find(token);
        return it == df.end() ? 0 : it->second;
    }
};

/// Throws on an empty title list.
DfTable build_df_table(const std::vector<std::string>& titles);

/// The fixed English stopword set excluded from the DF statistics.
const std::vector<std::string>& tem_stopwords();

/// Tokens whose presence marks a string as extraction junk.
const std::vector<std::string>& controlled_tokens();

// How title-like a string looks, measured on the raw string: character
// class counts, the class of the first and last character, DF statistics of
// the non-stopword tokens, word count, and a flag for the controlled junk
// tokens. n_consec_punct counts maximal punctuation runs of length >= 2.
struct TitleFeatures {
    double n_ascii = 0;
    double n_nonascii = 0;
    double n_spaces = 0;
    double n_punct = 0;
    double n_consec_punct = 0;
    double n_digits = 0;
    double first_char_type = 0;  // CharType; empty string reads as punct
    double last_char_type = 0;
    double df_max = 0;
    double df_min = 0;
    double df_median = 0;
    double n_words = 0;
    double has_controlled_token = 0;

    static constexpr int kSchemaVersion = 2;
    static constexpr std::size_t kSize = 13;

    std::array<double, kSize> as_array() const;
    static const std::array<const char*, kSize>& names();
};

TitleFeatures tem_features(const std::string& title, const DfTable& df);
TitleFeatures tem_features(const std::optional<std::string>& title, const DfTable& df);

/// Probability that a string is a real title.
struct TitleQuality {
    double theta = 0.0;
};

/// Title scorer: a logistic-regression classifier over TitleFeatures plus
/// the DF table it was built with, shipped as one file.
struct TemModel {
    Model classifier;
    DfTable df;

    void save(const std::filesystem::path& path) const;
    static TemModel load(const std::filesystem::path& path);
};

TitleQuality score_title(const TemModel& model, const std::string& title);
TitleQuality score_title(const TemModel& model, const std::optional<std::string>& title);

/// Low quality triggers citation matching: strictly theta < theta_tq.
bool is_low_quality(TitleQuality q, double theta_tq);

// Synthetic low-quality titles in four flavors: empty, non-ASCII-riddled,
// junk-token strings, and character-scrambled real titles. Parameters are
// exposed because the flavor boundaries are heuristic.
struct TemSyntheticParams {
    double nonascii_char_frac = 0.6;
    int min_junk_tokens = 2;
    int max_junk_tokens = 6;
};

std::vector<std::string> synthesize_bad_titles(const std::vector<std::string>& good_titles,
                                               std::size_t n, const TemSyntheticParams& params,
                                               std::uint64_t seed);

/// Labeled set: good titles as positives, synthesized strings as negatives.
Dataset make_tem_training_set(const std::vector<std::string>& good_titles, std::size_t n_bad,
                              const DfTable& df, const TemSyntheticParams& params,
                              std::uint64_t seed);

/// Trains the default logistic-regression scorer.
TemModel train_tem(const std::vector<std::string>& good_titles, std::size_t n_bad,
                   const TemSyntheticParams& params, std::uint64_t seed);

}  // namespace linkforge
