#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "linkforge/corpus.hpp"
#include "linkforge/error.hpp"

using namespace linkforge;
using namespace linkforge::testutil;

namespace {

const char* kThreeLines =
    R"({"id":"p1","title":"First Paper","authors":["A One"],"year":2001,"venue":null,"abstract":null,"citations":[]})"
    "\n"
    R"({"id":"p2","title":"Second Paper","authors":[],"year":null,"venue":"V","abstract":"text","citations":[{"title":"Cited Work","authors":["B Two"],"year":1999}]})"
    "\n"
    R"({"id":"p3","title":null,"authors":["C Three","D Four"],"year":2010,"venue":null,"abstract":null,"citations":[]})"
    "\n";

}  // namespace

TEST_CASE("load_corpus counts well-formed lines") {
    std::istringstream is(kThreeLines);
    LoadReport report;
    Corpus corpus = corpus_from_jsonl(is, CorpusRole::reference, &report);
    CHECK(corpus.size() == 3);
    CHECK(report.loaded == 3);
    CHECK(report.malformed == 0);
    CHECK(corpus.get("p2").citations.size() == 1);
    CHECK(corpus.get("p2").citations[0].raw_id == "p2#0");
    CHECK(corpus.get("p2").citations[0].cited_by == "p2");
    CHECK_FALSE(corpus.get("p3").title.has_value());
}

TEST_CASE("malformed lines are warnings, not failures") {
    std::istringstream is(
        R"({"id":"p1","title":"One"})"
        "\n"
        "this is not json\n"
        R"({"id":"p2","title":"Two"})"
        "\n");
    LoadReport report;
    Corpus corpus = corpus_from_jsonl(is, CorpusRole::target, &report);
    CHECK(corpus.size() == 2);
    CHECK(report.malformed == 1);
    CHECK(report.warnings.size() == 1);
}

TEST_CASE("bad year or missing id are malformed lines") {
    std::istringstream is(
        R"({"id":"p1","title":"ok","year":999})"
        "\n"
        R"({"title":"no id"})"
        "\n"
        R"({"id":"p2","year":2001})"
        "\n");
    LoadReport report;
    Corpus corpus = corpus_from_jsonl(is, CorpusRole::target, &report);
    CHECK(corpus.size() == 1);
    CHECK(report.malformed == 2);
}

TEST_CASE("duplicate id is fatal and names the id") {
    std::istringstream is(
        R"({"id":"p1","title":"One"})"
        "\n"
        R"({"id":"p1","title":"Clone"})"
        "\n");
    CHECK_THROWS_WITH_AS(corpus_from_jsonl(is, CorpusRole::target),
                         doctest::Contains("duplicate id \"p1\""), Error);
}

TEST_CASE("all lines malformed is an error") {
    std::istringstream is("nope\nstill nope\n");
    CHECK_THROWS_AS(corpus_from_jsonl(is, CorpusRole::target), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(corpus_from_jsonl(empty, CorpusRole::target), Error);
}

TEST_CASE("empty strings load as absent fields") {
    std::istringstream is(R"({"id":"p1","title":"","venue":"","abstract":""})" "\n");
    Corpus corpus = corpus_from_jsonl(is, CorpusRole::target);
    const PaperRecord& r = corpus.get("p1");
    CHECK_FALSE(r.title.has_value());
    CHECK_FALSE(r.venue.has_value());
    CHECK_FALSE(r.abstract.has_value());
}

TEST_CASE("get_citations") {
    Corpus corpus(CorpusRole::reference);
    corpus.add(record("empty", "No Citations Here"));
    PaperRecord big = record("big", "Many Citations");
    for (int i = 0; i < 20; ++i) {
        big.citations.push_back(citation("Cited " + std::to_string(i)));
    }
    corpus.add(big);

    CHECK(get_citations(corpus, "empty").empty());
    CHECK(get_citations(corpus, "big").size() == 20);
    for (const auto& c : get_citations(corpus, "big")) CHECK(c.cited_by == "big");
    CHECK_THROWS_WITH_AS(get_citations(corpus, "zzz"), doctest::Contains("zzz"), Error);
}

TEST_CASE("serialize then reload reproduces every record") {
    std::istringstream is(kThreeLines);
    Corpus corpus = corpus_from_jsonl(is, CorpusRole::reference);
    std::istringstream again(corpus.to_jsonl_string());
    Corpus reloaded = corpus_from_jsonl(again, CorpusRole::reference);
    REQUIRE(reloaded.size() == corpus.size());
    for (const auto& r : corpus.records()) {
        CHECK(reloaded.get(r.id) == r);
    }
}

TEST_CASE("in-memory add enforces invariants") {
    Corpus corpus(CorpusRole::target);
    CHECK_THROWS_AS(corpus.add(record("", "untitled")), Error);
    CHECK_THROWS_AS(corpus.add(record("y", "bad year", {}, 999)), Error);
    corpus.add(record("ok", "fine", {}, 2000));
    CHECK_THROWS_AS(corpus.add(record("ok", "again")), Error);
    CHECK(corpus.contains("ok"));
    CHECK_FALSE(corpus.contains("missing"));
}
