#include <doctest.h>

#include "linkforge/error.hpp"
#include "linkforge/eval.hpp"
#include "linkforge/tem.hpp"
#include "linkforge/textsim.hpp"

using namespace linkforge;

namespace {

std::vector<std::string> corpus_titles(std::size_t n, std::uint64_t seed) {
    Corpus corpus = make_clean_corpus(n, seed);
    std::vector<std::string> titles;
    for (const auto& r : corpus.records()) {
        if (r.title) titles.push_back(*r.title);
    }
    return titles;
}

}  // namespace

TEST_CASE("df table counts documents, not occurrences") {
    DfTable df = build_df_table({"a b", "b c"});
    CHECK(df.total_docs == 2);
    CHECK(df.lookup("b") == 2);
    CHECK(df.lookup("c") == 1);
    CHECK(df.lookup("absent") == 0);

    DfTable dup = build_df_table({"b b"});
    CHECK(dup.lookup("b") == 1);

    CHECK_THROWS_AS(build_df_table({}), Error);
}

TEST_CASE("controlled tokens are caught after lowercasing") {
    DfTable df = build_df_table({"anything"});
    CHECK(tem_features(std::string("References"), df).has_controlled_token == 1);
    CHECK(tem_features(std::string("my references list"), df).has_controlled_token == 1);
    CHECK(tem_features(std::string("Reference counting"), df).has_controlled_token == 0);
    CHECK(tem_features(std::string("A Perfectly Fine Title"), df).has_controlled_token == 0);
}

TEST_CASE("empty title yields all zero features") {
    DfTable df = build_df_table({"anything"});
    TitleFeatures f = tem_features(std::string(""), df);
    CHECK(f.n_ascii == 0);
    CHECK(f.n_nonascii == 0);
    CHECK(f.n_words == 0);
    CHECK(f.df_max == 0);
    CHECK(f.df_median == 0);
    CHECK(f.has_controlled_token == 0);
    TitleFeatures g = tem_features(std::optional<std::string>{}, df);
    CHECK(g.as_array() == f.as_array());
}

TEST_CASE("character counts on a handwritten example") {
    DfTable df = build_df_table({"study of trees"});
    std::string title = "A Study of B-Trees, 2nd ed.";
    TitleFeatures f = tem_features(title, df);
    CHECK(f.n_digits == 1);
    CHECK(f.n_punct == 3);  // hyphen, comma, final period
    CHECK(f.n_consec_punct == 0);
    CHECK(f.n_spaces == 5);
    CHECK(f.n_ascii == 27);
    CHECK(f.n_nonascii == 0);
    CHECK(f.n_words == 6);
    CHECK(f.first_char_type == static_cast<double>(CharType::letter));
    CHECK(f.last_char_type == static_cast<double>(CharType::punct));
}

TEST_CASE("ascii plus nonascii equals total codepoints") {
    DfTable df = build_df_table({"x"});
    std::string mixed = "café αβ 12!";
    TitleFeatures f = tem_features(mixed, df);
    CHECK(f.n_ascii + f.n_nonascii ==
          static_cast<double>(detail::utf8_codepoints(mixed).size()));
    CHECK(f.n_nonascii == 3);
}

TEST_CASE("consecutive punctuation counts maximal runs") {
    DfTable df = build_df_table({"x"});
    CHECK(tem_features(std::string("a?! b... c"), df).n_consec_punct == 2);
    CHECK(tem_features(std::string("a? b. c,"), df).n_consec_punct == 0);
    CHECK(tem_features(std::string("!!!"), df).n_consec_punct == 1);
}

TEST_CASE("df statistics skip stopwords") {
    DfTable df = build_df_table({"the cat", "the dog", "the cat again"});
    TitleFeatures f = tem_features(std::string("the cat"), df);
    CHECK(f.df_max == 2);  // "the" is excluded even though df("the") = 3
    CHECK(f.df_min == 2);
    TitleFeatures all_stop = tem_features(std::string("the of and"), df);
    CHECK(all_stop.df_max == 0);
    CHECK(all_stop.df_median == 0);
}

TEST_CASE("tem features are pure") {
    DfTable df = build_df_table({"alpha beta", "beta gamma"});
    std::string title = "Alpha Beta: a Gamma Story";
    CHECK(tem_features(title, df).as_array() == tem_features(title, df).as_array());
}

TEST_CASE("trained scorer separates real titles from junk") {
    auto titles = corpus_titles(250, 33);
    TemModel tem = train_tem(titles, 120, {}, 7);

    double clean_theta = score_title(tem, titles[3]).theta;
    CHECK(clean_theta >= 0.9);

    std::string nonascii;
    for (int i = 0; i < 40; ++i) {
        nonascii += "δ";
    }
    CHECK(score_title(tem, nonascii).theta <= 0.1);
    CHECK(score_title(tem, std::string("")).theta <= 0.5);

    for (const auto& t : {titles[0], std::string("Acknowledgments 12 34"), std::string("")}) {
        double theta = score_title(tem, t).theta;
        CHECK(theta >= 0.0);
        CHECK(theta <= 1.0);
    }
}

TEST_CASE("is_low_quality is a strict threshold") {
    CHECK(is_low_quality({0.005}, 0.01));
    CHECK_FALSE(is_low_quality({0.25}, 0.20));
    CHECK_FALSE(is_low_quality({0.20}, 0.20));
}

TEST_CASE("tem model file round-trips") {
    auto titles = corpus_titles(120, 44);
    TemModel tem = train_tem(titles, 60, {}, 9);
    auto path = std::filesystem::temp_directory_path() / "lf_tem_test.bin";
    tem.save(path);
    TemModel loaded = TemModel::load(path);
    std::filesystem::remove(path);
    for (const auto& probe : {titles[0], std::string("References 1 2 3"), std::string("abc")}) {
        CHECK(score_title(loaded, probe).theta == score_title(tem, probe).theta);
    }
}

TEST_CASE("synthetic bad titles cycle the four flavors") {
    auto bads = synthesize_bad_titles({"A Sound Baseline Title About Graphs"}, 8, {}, 5);
    REQUIRE(bads.size() == 8);
    CHECK(bads[0].empty());
    CHECK(bads[4].empty());
    CHECK_FALSE(bads[1].empty());
    // same seed, same output
    CHECK(synthesize_bad_titles({"A Sound Baseline Title About Graphs"}, 8, {}, 5) == bads);
}
