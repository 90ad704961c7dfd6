#include <doctest.h>

#include <cmath>
#include <sstream>

#include "linkforge/classifier.hpp"
#include "linkforge/error.hpp"
#include "linkforge/features.hpp"
#include "linkforge/rng.hpp"

using namespace linkforge;

namespace {

Dataset two_feature_set(std::size_t n, double margin, std::uint64_t seed) {
    Dataset data;
    data.schema_version = 1;
    data.feature_names = {"f0", "f1"};
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(i % 2);
        // classes live in [margin, margin+2] and [-margin-2, -margin]
        double base = label ? margin : -margin - 2.0;
        double x0 = base + rng.real() * 2.0;
        double x1 = base + rng.real() * 2.0;
        data.pairs.push_back({{x0, x1}, label});
    }
    return data;
}

double accuracy(const Model& model, const Dataset& data) {
    std::size_t hits = 0;
    for (const auto& p : data.pairs) {
        if (predict(model, p.features, data.schema_version).label == p.label) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.pairs.size());
}

}  // namespace

TEST_CASE("logreg separates a wide-margin set") {
    Dataset data = two_feature_set(200, 1.0, 5);
    Model model = train(data, ModelKind::logreg);
    CHECK(accuracy(model, data) >= 0.99);
}

TEST_CASE("degenerate training data is rejected") {
    Dataset empty;
    empty.feature_names = {"f0"};
    CHECK_THROWS_AS(train(empty, ModelKind::logreg), Error);

    Dataset one_class;
    one_class.schema_version = 1;
    one_class.feature_names = {"f0"};
    one_class.pairs = {{{0.1}, 1}, {{0.4}, 1}};
    CHECK_THROWS_AS(train(one_class, ModelKind::logreg), Error);
    CHECK_THROWS_AS(train(one_class, ModelKind::forest), Error);
}

TEST_CASE("training is deterministic for a fixed seed") {
    Dataset data = two_feature_set(120, 0.4, 9);
    TrainOptions options;
    options.seed = 77;
    options.forest.n_trees = 30;
    Model a = train(data, ModelKind::forest, options);
    Model b = train(data, ModelKind::forest, options);
    Dataset holdout = two_feature_set(50, 0.4, 10);
    for (const auto& p : holdout.pairs) {
        CHECK(a.predict_proba(p.features) == b.predict_proba(p.features));
    }
}

TEST_CASE("forest training is identical for any worker count") {
    Dataset data = two_feature_set(150, 0.3, 21);
    TrainOptions one, four;
    one.seed = four.seed = 3;
    one.forest.n_trees = four.forest.n_trees = 24;
    one.workers = 1;
    four.workers = 4;
    Model a = train(data, ModelKind::forest, one);
    Model b = train(data, ModelKind::forest, four);
    std::ostringstream sa, sb;
    a.save(sa);
    b.save(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("logreg gradient matches central finite differences") {
    Rng rng(31);
    for (int instance = 0; instance < 20; ++instance) {
        std::size_t n = 5 + rng.below(10);
        std::size_t d = 2 + rng.below(4);
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) rows[i][j] = rng.real() * 4.0 - 2.0;
            labels[i] = static_cast<int>(rng.below(2));
        }
        if (labels[0] == labels[1]) labels[1] = 1 - labels[0];
        std::vector<double> params(d + 1);
        for (auto& p : params) p = rng.real() * 2.0 - 1.0;
        double l2 = 0.01;

        auto analytic = logreg_gradient(params, rows, labels, l2);
        double h = 1e-6;
        double num_norm = 0.0, diff_norm = 0.0, ana_norm = 0.0;
        for (std::size_t j = 0; j < params.size(); ++j) {
            std::vector<double> plus = params, minus = params;
            plus[j] += h;
            minus[j] -= h;
            double numeric =
                (logreg_loss(plus, rows, labels, l2) - logreg_loss(minus, rows, labels, l2)) /
                (2.0 * h);
            num_norm += numeric * numeric;
            ana_norm += analytic[j] * analytic[j];
            diff_norm += (numeric - analytic[j]) * (numeric - analytic[j]);
        }
        CHECK(std::sqrt(diff_norm) / std::max(std::sqrt(ana_norm), 1e-12) < 1e-5);
        (void)num_norm;
    }
}

TEST_CASE("forest probability is the tree vote fraction") {
    Dataset data = two_feature_set(150, 0.2, 13);
    TrainOptions options;
    options.forest.n_trees = 17;
    Model model = train(data, ModelKind::forest, options);
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> row = {rng.real() * 4.0 - 2.0, rng.real() * 4.0 - 2.0};
        std::size_t votes = 0;
        for (const auto& tree : model.trees) {
            votes += static_cast<std::size_t>(tree.predict(row));
        }
        CHECK(model.predict_proba(row) ==
              doctest::Approx(static_cast<double>(votes) / 17.0).epsilon(1e-12));
    }
}

TEST_CASE("predict thresholding and schema checks") {
    Model manual;
    manual.kind = ModelKind::logreg;
    manual.feature_schema_version = 1;
    manual.feature_dim = 2;
    manual.mean = {0.0, 0.0};
    manual.stdev = {1.0, 1.0};
    manual.weights = {0.0, 0.0};
    manual.bias = 0.0;  // probability is exactly 0.5 everywhere

    auto pred = predict(manual, std::vector<double>{1.0, 2.0}, 1);
    CHECK(pred.probability == doctest::Approx(0.5));
    CHECK(pred.label == 1);  // >= threshold wins

    manual.bias = 0.847;  // sigmoid ~ 0.7
    CHECK(predict(manual, std::vector<double>{0.0, 0.0}, 1).label == 1);
    manual.decision_threshold = 0.75;
    CHECK(predict(manual, std::vector<double>{0.0, 0.0}, 1).label == 0);

    CHECK_THROWS_AS(predict(manual, std::vector<double>{0.0, 0.0}, 2), Error);
    CHECK_THROWS_AS(predict(manual, std::vector<double>{0.0}, 1), Error);
}

TEST_CASE("binary metrics conventions") {
    std::vector<int> truth = {1, 1, 0, 0, 1};
    std::vector<int> zeros = {0, 0, 0, 0, 0};
    BinaryMetrics m = binary_metrics(truth, zeros);
    CHECK(m.recall == 0.0);
    CHECK(m.f1 == 0.0);
    CHECK(m.precision == 1.0);  // no predictions made

    std::vector<int> mixed = {1, 0, 1, 0, 1};
    BinaryMetrics mm = binary_metrics(truth, mixed);
    CHECK(mm.tp == 2);
    CHECK(mm.fp == 1);
    CHECK(mm.fn == 1);
    CHECK(mm.f1 == doctest::Approx(2.0 * mm.precision * mm.recall / (mm.precision + mm.recall)));
}

TEST_CASE("cross validation on separable data") {
    Dataset data = two_feature_set(200, 1.0, 17);
    TrainOptions options;
    CVReport report = cross_validate(data, ModelKind::logreg, options, 5);
    CHECK(report.folds == 5);
    CHECK(report.per_fold.size() == 5);
    CHECK(report.mean_f1 == doctest::Approx(1.0));
    CHECK(report.pooled.f1 == doctest::Approx(1.0));
    for (const auto& fm : report.per_fold) {
        if (fm.precision + fm.recall > 0) {
            CHECK(fm.f1 == doctest::Approx(2.0 * fm.precision * fm.recall /
                                           (fm.precision + fm.recall)));
        }
    }
    CHECK_THROWS_AS(cross_validate(data, ModelKind::logreg, options, 1), Error);
    Dataset tiny = two_feature_set(3, 1.0, 1);
    CHECK_THROWS_AS(cross_validate(tiny, ModelKind::logreg, options, 10), Error);
}

TEST_CASE("grid search picks the point that generalizes") {
    Dataset data = two_feature_set(120, 0.8, 23);

    TrainOptions sane;
    sane.logreg.l2 = 1e-3;
    SUBCASE("one-point grid returns that point") {
        auto [best, report] = grid_search(data, ModelKind::logreg, {sane}, 4);
        CHECK(best.logreg.l2 == sane.logreg.l2);
    }
    SUBCASE("crushing regularization loses to a sane value") {
        TrainOptions crushed = sane;
        crushed.logreg.l2 = 1e5;  // forces weights to ~0, underfits
        auto [best, report] = grid_search(data, ModelKind::logreg, {crushed, sane}, 4);
        CHECK(best.logreg.l2 == sane.logreg.l2);
        CHECK(report.mean_f1 > 0.95);
    }
    SUBCASE("ties go to the first lattice point") {
        TrainOptions same_a = sane, same_b = sane;
        same_a.seed = same_b.seed = 11;
        same_a.logreg.iterations = 400;
        same_b.logreg.iterations = 401;  // indistinguishable on separable data
        auto [best, report] = grid_search(data, ModelKind::logreg, {same_a, same_b}, 4);
        CHECK(best.logreg.iterations == 400);
    }
    CHECK_THROWS_AS(grid_search(data, ModelKind::logreg, {}, 4), Error);
}

TEST_CASE("information gain") {
    Rng rng(67);
    Dataset data;
    data.schema_version = 1;
    data.feature_names = {"copy_of_label", "pure_noise"};
    std::size_t n = 2000;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int label = static_cast<int>(rng.below(2));
        positives += static_cast<std::size_t>(label);
        data.pairs.push_back({{static_cast<double>(label), rng.real()}, label});
    }
    auto ranked = information_gain(data);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].first == "copy_of_label");

    double p = static_cast<double>(positives) / static_cast<double>(n);
    double h_label = -p * std::log2(p) - (1 - p) * std::log2(1 - p);
    CHECK(ranked[0].second == doctest::Approx(h_label).epsilon(1e-9));
    CHECK(ranked[1].second == doctest::Approx(0.0).epsilon(0.05));
}

TEST_CASE("title features dominate when titles are the discriminator") {
    // Pairs built from records where only the title separates matches from
    // non-matches; authors and years are random on both sides.
    Rng rng(71);
    Dataset data;
    data.schema_version = FeatureVector::kSchemaVersion;
    for (const char* n : FeatureVector::names()) data.feature_names.push_back(n);
    auto word = [&rng]() {
        std::string w;
        for (int i = 0; i < 6; ++i) w.push_back(static_cast<char>('a' + rng.below(26)));
        return w;
    };
    const char* name_pool[] = {"Ada Smith", "Bob Jones", "Cal Poe", "Dee Ray"};
    for (int i = 0; i < 400; ++i) {
        int label = i % 2;
        std::string title_t = word() + " " + word() + " " + word() + " " + word();
        std::string title_r = label ? title_t : word() + " " + word() + " " + word();
        PaperRecord t, r;
        t.id = "t";
        r.id = "r";
        t.title = title_t;
        r.title = title_r;
        t.authors = {name_pool[rng.below(4)]};
        r.authors = {name_pool[rng.below(4)]};
        t.year = 1980 + static_cast<int>(rng.below(40));
        r.year = 1980 + static_cast<int>(rng.below(40));
        auto fv = header_features(t, r).as_array();
        data.pairs.push_back({{fv.begin(), fv.end()}, label});
    }
    auto ranked = information_gain(data);
    std::set<std::string> top2 = {ranked[0].first, ranked[1].first};
    CHECK(top2.count("title_jaccard") + top2.count("title_simhash_lev") == 2);
}

TEST_CASE("model files round-trip") {
    Dataset data = two_feature_set(100, 0.5, 3);
    for (ModelKind kind : {ModelKind::logreg, ModelKind::forest}) {
        TrainOptions options;
        options.forest.n_trees = 12;
        Model model = train(data, kind, options);
        model.decision_threshold = 0.6;
        auto path = std::filesystem::temp_directory_path() / "lf_model_test.bin";
        model.save(path);
        Model loaded = Model::load(path);
        std::filesystem::remove(path);
        CHECK(loaded.kind == model.kind);
        CHECK(loaded.decision_threshold == 0.6);
        CHECK(loaded.seed == model.seed);
        Dataset probe = two_feature_set(40, 0.5, 4);
        for (const auto& pr : probe.pairs) {
            CHECK(loaded.predict_proba(pr.features) == model.predict_proba(pr.features));
        }
    }
}
