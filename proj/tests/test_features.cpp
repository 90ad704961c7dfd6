#include <doctest.h>

#include "helpers.hpp"
#include "linkforge/features.hpp"
#include "linkforge/textsim.hpp"

using namespace linkforge;
using namespace linkforge::testutil;

TEST_CASE("fullname_code") {
    CHECK(fullname_code(normalize_author("Jane C. Huck"), normalize_author("J. Huck")) == 5);
    CHECK(fullname_code(normalize_author("Jane C. Huck"), normalize_author("Jane C. Huck")) == 7);
    CHECK(fullname_code(normalize_author("Jane C. Huck"), normalize_author("Mary C. Huck")) == 6);
    CHECK(fullname_code(normalize_author("Jane Huck"), normalize_author("Jane Huck")) == 5);
    CHECK(fullname_code(normalize_author("Huck"), normalize_author("Huck")) == 4);
    CHECK(fullname_code(normalize_author("Jane C. Huck"), normalize_author("Jane C. Finn")) == 3);
    CHECK(fullname_code(AuthorName{}, normalize_author("Jane C. Huck")) == 0);
    CHECK(fullname_code(AuthorName{}, AuthorName{}) == 0);
}

TEST_CASE("fullname_code is symmetric") {
    const char* names[] = {"Jane C. Huck", "J. Huck", "Mary Finn", "Huck", "", "Jane D. Huck"};
    for (const char* a : names) {
        for (const char* b : names) {
            CHECK(fullname_code(normalize_author(a), normalize_author(b)) ==
                  fullname_code(normalize_author(b), normalize_author(a)));
        }
    }
}

TEST_CASE("lastname_sim full truth table") {
    std::optional<std::string> huck = "huck";
    std::optional<std::string> finn = "finn";
    std::optional<std::string> none;
    CHECK(lastname_sim(huck, huck) == 2);
    CHECK(lastname_sim(finn, finn) == 2);
    CHECK(lastname_sim(huck, finn) == 0);
    CHECK(lastname_sim(finn, huck) == 0);
    CHECK(lastname_sim(huck, none) == 1);
    CHECK(lastname_sim(none, huck) == 1);
    CHECK(lastname_sim(finn, none) == 1);
    CHECK(lastname_sim(none, finn) == 1);
    CHECK(lastname_sim(none, none) == 1);
}

TEST_CASE("all_lastnames_jaccard") {
    auto names = [](std::vector<std::string> raw) {
        std::vector<AuthorName> out;
        for (const auto& r : raw) out.push_back(normalize_author(r));
        return out;
    };
    CHECK(all_lastnames_jaccard(names({"A Huck", "B Finn"}), names({"A Huck", "B Finn"})) == 1.0);
    CHECK(all_lastnames_jaccard(names({"A Huck", "B Finn"}), names({"A Huck", "C Sawyer"})) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(all_lastnames_jaccard(names({}), names({"A Huck"})) == 0.0);
    CHECK(all_lastnames_jaccard(names({}), names({})) == 1.0);
}

TEST_CASE("header_features self match hits every best value") {
    PaperRecord t = record("t", "Adaptive Streaming Kernel Methods", {"Jane C. Huck", "Bo Finn"},
                           2004, "An abstract about kernels and streams.");
    FeatureVector fv = header_features(t, t);
    CHECK(fv.title_simhash_lev == 0.0);
    CHECK(fv.abstract_simhash_lev == 0.0);
    CHECK(fv.title_jaccard == 1.0);
    CHECK(fv.abstract_jaccard == 1.0);
    CHECK(fv.year_absdiff == 0.0);
    CHECK(fv.first_author_code == 7);
    CHECK(fv.last_author_code == 5);  // Bo Finn has no middle name
    CHECK(fv.first_author_lastname_sim == 2);
    CHECK(fv.last_author_lastname_sim == 2);
    CHECK(fv.all_lastnames_jaccard == 1.0);
}

TEST_CASE("missing fields take worst-case values") {
    PaperRecord t = record("t", "Some Title", {}, std::nullopt);
    PaperRecord r = record("r", "Some Title", {"A Huck"}, 2001);
    FeatureVector fv = header_features(t, r);
    CHECK(fv.year_absdiff == 100.0);
    CHECK(fv.abstract_simhash_lev == 1.0);
    CHECK(fv.abstract_jaccard == 0.0);
    CHECK(fv.first_author_code == 0);
    CHECK(fv.first_author_lastname_sim == 1);  // either side absent
    CHECK(fv.all_lastnames_jaccard == 0.0);

    PaperRecord no_title_t = record("t", std::nullopt);
    PaperRecord no_title_r = record("r", "Present");
    FeatureVector fv2 = header_features(no_title_t, no_title_r);
    CHECK(fv2.title_simhash_lev == 1.0);
    CHECK(fv2.title_jaccard == 0.0);

    // year gap caps at 100
    FeatureVector fv3 = header_features(record("a", "X", {}, 1850), record("b", "X", {}, 2020));
    CHECK(fv3.year_absdiff == 100.0);
}

TEST_CASE("equal titles with disjoint abstracts") {
    PaperRecord t =
        record("t", "Shared Title Words", {"A Huck"}, 2001, "completely different words here");
    PaperRecord r = record("r", "Shared: Title Words!", {"A Huck"}, 2001, "nothing in common at all");
    FeatureVector fv = header_features(t, r);
    CHECK(fv.title_simhash_lev == 0.0);
    CHECK(fv.title_jaccard == 1.0);
    CHECK(fv.abstract_jaccard == 0.0);
    CHECK(fv.abstract_simhash_lev > 0.0);
}

TEST_CASE("use_abstract=false pins abstract features") {
    PaperRecord t = record("t", "Same", {}, 2000, "identical abstract");
    PaperRecord r = record("r", "Same", {}, 2000, "identical abstract");
    FeatureVector fv = header_features(t, r, /*use_abstract=*/false);
    CHECK(fv.abstract_simhash_lev == 1.0);
    CHECK(fv.abstract_jaccard == 0.0);
    CHECK(fv.title_jaccard == 1.0);
}

TEST_CASE("single-author papers use that author for both roles") {
    PaperRecord t = record("t", "X", {"Jane C. Huck"}, 2000);
    PaperRecord r = record("r", "X", {"Jane C. Huck", "Tom Finn"}, 2000);
    FeatureVector fv = header_features(t, r);
    CHECK(fv.first_author_code == 7);
    CHECK(fv.last_author_code == 0);  // huck vs finn
    CHECK(fv.last_author_lastname_sim == 0);
}

TEST_CASE("title features agree with textsim composition") {
    PaperRecord t = record("t", "Entropy Coding of Sparse Signals", {}, 2000);
    PaperRecord r = record("r", "Entropy Decoding of Dense Signals", {}, 2000);
    FeatureVector fv = header_features(t, r);
    std::string a = simhash(normalize_title(*t.title)).hex();
    std::string b = simhash(normalize_title(*r.title)).hex();
    CHECK(fv.title_simhash_lev == normalized_levenshtein(a, b));
    CHECK(fv.title_jaccard ==
          jaccard(token_set(normalize_title(*t.title)), token_set(normalize_title(*r.title))));
}

TEST_CASE("feature order is frozen") {
    const auto& names = FeatureVector::names();
    CHECK(names[0] == std::string("title_simhash_lev"));
    CHECK(names[4] == std::string("year_absdiff"));
    CHECK(names[9] == std::string("all_lastnames_jaccard"));
    FeatureVector fv;
    fv.title_simhash_lev = 0.25;
    fv.year_absdiff = 3;
    auto arr = fv.as_array();
    CHECK(arr[0] == 0.25);
    CHECK(arr[4] == 3);
    CHECK(FeatureVector::kSize == 10);
}
