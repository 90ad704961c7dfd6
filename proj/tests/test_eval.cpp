#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "helpers.hpp"
#include "linkforge/error.hpp"
#include "linkforge/eval.hpp"
#include "linkforge/tem.hpp"

using namespace linkforge;
using namespace linkforge::testutil;

TEST_CASE("evaluate arithmetic") {
    GroundTruth truth;
    truth.add_pair("t1", "r1");
    truth.add_pair("t2", "r2");
    truth.add_pair("t3", "r3");
    truth.add_pair("t4", "r4");

    std::vector<MatchResult> matches = {
        {"t1", "r1", Provenance::hmm, 0.9},
        {"t2", "r2", Provenance::cmm_bow, 0.8},
        {"t5", "r9", Provenance::hmm, 0.7},  // wrong
    };
    EvalReport report = evaluate(matches, truth);
    CHECK(report.tp == 2);
    CHECK(report.fp == 1);
    CHECK(report.fn == 2);
    CHECK(report.precision == doctest::Approx(2.0 / 3.0));
    CHECK(report.recall == doctest::Approx(0.5));
    CHECK(report.f1 == doctest::Approx(4.0 / 7.0));
    CHECK(report.by_provenance.at("hmm").tp == 1);
    CHECK(report.by_provenance.at("hmm").fp == 1);
    CHECK(report.by_provenance.at("cmm_bow").tp == 1);

    // order of the match list cannot matter
    std::reverse(matches.begin(), matches.end());
    EvalReport again = evaluate(matches, truth);
    CHECK(again.tp == report.tp);
    CHECK(again.f1 == report.f1);
}

TEST_CASE("evaluate degenerate conventions") {
    GroundTruth truth;
    truth.add_pair("t1", "r1");
    EvalReport report = evaluate({}, truth);
    CHECK(report.precision == 1.0);  // 0/0 reads as 1
    CHECK(report.recall == 0.0);
    CHECK(report.f1 == 0.0);

    EvalReport empty_truth = evaluate({}, GroundTruth{});
    CHECK(empty_truth.precision == 1.0);
    CHECK(empty_truth.recall == 1.0);
}

TEST_CASE("ground truth io and consistency") {
    GroundTruth truth;
    truth.add_pair("t1", "r1");
    truth.add_unmatched("u1");
    CHECK_THROWS_AS(truth.add_unmatched("t1"), Error);
    CHECK_THROWS_AS(truth.add_pair("u1", "r2"), Error);

    auto path = std::filesystem::temp_directory_path() / "lf_truth_test.jsonl";
    truth.save(path);
    GroundTruth loaded = GroundTruth::load(path);
    std::filesystem::remove(path);
    CHECK(loaded.pairs == truth.pairs);
    CHECK(loaded.unmatched_targets == truth.unmatched_targets);
}

TEST_CASE("restrict_truth and filter_matches") {
    GroundTruth truth;
    truth.add_pair("t1", "r1");
    truth.add_pair("t2", "r2");
    truth.add_unmatched("u1");
    GroundTruth sub = restrict_truth(truth, {"t1", "u1"});
    CHECK(sub.pairs.size() == 1);
    CHECK(sub.unmatched_targets.size() == 1);

    std::vector<MatchResult> ms = {{"t1", "r1", Provenance::hmm, 1.0},
                                   {"t2", "r2", Provenance::hmm, 1.0}};
    CHECK(filter_matches(ms, {"t1"}).size() == 1);
}

TEST_CASE("noise spec files") {
    auto path = std::filesystem::temp_directory_path() / "lf_noise_test.kv";
    {
        std::ofstream os(path);
        os << "# benchmark noise\n";
        os << "title_garbage_prob = 0.5\n";
        os << "seed = 99\n";
    }
    NoiseSpec spec = NoiseSpec::from_kv_file(path);
    CHECK(spec.title_garbage_prob == 0.5);
    CHECK(spec.seed == 99);
    CHECK(spec.drop_year_prob == doctest::Approx(0.2));  // untouched default
    {
        std::ofstream os(path);
        os << "not_a_key = 1\n";
    }
    CHECK_THROWS_AS(NoiseSpec::from_kv_file(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("clean corpus synthesis is deterministic and well formed") {
    Corpus a = make_clean_corpus(60, 5);
    Corpus b = make_clean_corpus(60, 5);
    CHECK(a.to_jsonl_string() == b.to_jsonl_string());
    CHECK(a.size() == 60);

    std::set<std::string> titles;
    for (const auto& r : a.records()) {
        REQUIRE(r.title.has_value());
        CHECK(titles.insert(*r.title).second);  // unique titles
        CHECK(!r.authors.empty());
        CHECK(r.citations.size() >= 8);
        CHECK(r.citations.size() <= 18);
    }
    CHECK(make_clean_corpus(60, 6).to_jsonl_string() != a.to_jsonl_string());
}

TEST_CASE("benchmark generation contract") {
    Corpus clean = make_clean_corpus(100, 8);
    NoiseSpec spec;
    spec.seed = 42;
    Benchmark bench = generate_benchmark(clean, spec, 0.3, 10);

    CHECK(bench.truth.pairs.size() == 30);  // round(0.3 * 100)
    CHECK(bench.truth.unmatched_targets.size() == 10);
    CHECK(bench.target.size() == 40);
    CHECK(bench.reference.size() == 100);
    for (const auto& [t, r] : bench.truth.pairs) {
        CHECK(bench.target.contains(t));
        CHECK(bench.reference.contains(r));
    }
    CHECK_FALSE(bench.citation_links.empty());
    for (const auto& link : bench.citation_links) {
        CHECK(link.target_citation.find('#') != std::string::npos);
        CHECK(link.reference_citation.find('#') != std::string::npos);
    }

    Benchmark again = generate_benchmark(clean, spec, 0.3, 10);
    CHECK(again.target.to_jsonl_string() == bench.target.to_jsonl_string());
    CHECK(again.reference.to_jsonl_string() == bench.reference.to_jsonl_string());

    NoiseSpec other = spec;
    other.seed = 43;
    CHECK(generate_benchmark(clean, other, 0.3, 10).target.to_jsonl_string() !=
          bench.target.to_jsonl_string());
}

TEST_CASE("zero noise copies titles verbatim") {
    Corpus clean = make_clean_corpus(50, 9);
    NoiseSpec spec;
    spec.title_char_error_rate = 0.0;
    spec.title_truncate_prob = 0.0;
    spec.title_garbage_prob = 0.0;
    spec.drop_abstract_prob = 0.0;
    spec.drop_year_prob = 0.0;
    spec.drop_author_prob = 0.0;
    spec.author_initialize_prob = 0.0;
    spec.citation_subset_frac = 1.0;
    Benchmark bench = generate_benchmark(clean, spec, 0.4, 0);
    for (const auto& [t, r] : bench.truth.pairs) {
        CHECK(bench.target.get(t).title == bench.reference.get(r).title);
        CHECK(bench.target.get(t).citations.size() ==
              bench.reference.get(r).citations.size());
    }
}

TEST_CASE("all-garbage titles are flagged by a trained scorer") {
    Corpus clean = make_clean_corpus(120, 10);
    std::vector<std::string> titles;
    for (const auto& r : clean.records()) titles.push_back(*r.title);
    TemModel tem = train_tem(titles, 60, {}, 3);

    NoiseSpec spec;
    spec.title_garbage_prob = 1.0;
    Benchmark bench = generate_benchmark(clean, spec, 0.5, 0);
    std::size_t flagged = 0, total = 0;
    for (const auto& [t, r] : bench.truth.pairs) {
        ++total;
        if (is_low_quality(score_title(tem, bench.target.get(t).title), 0.2)) ++flagged;
    }
    CHECK(total == 60);
    CHECK(static_cast<double>(flagged) / static_cast<double>(total) >= 0.9);
}

TEST_CASE("training pairs include positives and hard negatives") {
    Corpus clean = make_clean_corpus(80, 12);
    Benchmark bench = generate_benchmark(clean, NoiseSpec{}, 0.3, 8);
    BlockingIndex index = BlockingIndex::build(bench.reference, IndexSource::papers);
    Dataset pairs = make_training_pairs(bench.target, bench.reference, index, bench.truth, 10,
                                        true);
    std::size_t positives = 0;
    for (const auto& p : pairs.pairs) positives += static_cast<std::size_t>(p.label);
    CHECK(positives == bench.truth.pairs.size());  // every true pair is present once
    CHECK(pairs.pairs.size() > positives);         // plus blocking negatives
    CHECK(pairs.schema_version == 1);

    BlockingIndex cit_index = BlockingIndex::build(bench.reference, IndexSource::citations);
    Dataset cpairs = make_citation_training_pairs(bench.target, bench.reference, cit_index,
                                                  bench.citation_links, 10, 3000);
    CHECK(cpairs.pairs.size() <= 3000);
    std::size_t cpos = 0;
    for (const auto& p : cpairs.pairs) cpos += static_cast<std::size_t>(p.label);
    CHECK(cpos > 0);
    CHECK(cpos < cpairs.pairs.size());
}

TEST_CASE("forest cross-validation lands in the expected band") {
    Corpus clean = make_clean_corpus(120, 31);
    Benchmark bench = generate_benchmark(clean, NoiseSpec{}, 0.4, 12);
    BlockingIndex index = BlockingIndex::build(bench.reference, IndexSource::papers);
    Dataset pairs = make_training_pairs(bench.target, bench.reference, index, bench.truth, 10,
                                        true);
    TrainOptions options;
    options.forest.n_trees = 40;
    CVReport report = cross_validate(pairs, ModelKind::forest, options, 5);
    CHECK(report.mean_f1 >= 0.85);
    CHECK(report.mean_f1 <= 1.0);
}

TEST_CASE("a 1x1 sweep equals a direct cmm run") {
    Corpus clean = make_clean_corpus(80, 21);
    Benchmark bench = generate_benchmark(clean, NoiseSpec{}, 0.3, 5);
    BlockingIndex cit_index = BlockingIndex::build(bench.reference, IndexSource::citations);
    Dataset cpairs = make_citation_training_pairs(bench.target, bench.reference, cit_index,
                                                  bench.citation_links, 10, 4000);
    TrainOptions options;
    options.forest.n_trees = 30;
    Model citation_model = train(cpairs, ModelKind::forest, options);

    MatcherContext ctx;
    ctx.reference = &bench.reference;
    ctx.citation_index = &cit_index;
    ctx.citation_model = &citation_model;
    ctx.prepare();

    auto cells = sweep_cmm(bench.target, ctx, {0.5}, {0.35}, bench.truth, 2);
    REQUIRE(cells.size() == 1);

    MatcherContext direct = ctx;
    direct.config.theta_ref = 0.5;
    direct.config.theta_title = 0.35;
    auto [matches, stats] = batch_match(bench.target, direct, MatchMode::cmm, 1);
    EvalReport direct_report = evaluate(matches, bench.truth);
    CHECK(cells[0].report.tp == direct_report.tp);
    CHECK(cells[0].report.fp == direct_report.fp);
    CHECK(cells[0].report.f1 == direct_report.f1);
}

TEST_CASE("default sweep grid mirrors the published shape") {
    auto [refs, titles] = default_sweep_grid();
    CHECK(refs == std::vector<double>{0.4, 0.5, 0.6, 0.7});
    CHECK(titles == std::vector<double>{0.15, 0.25, 0.35, 0.45});
}
