// linkforge: record-linkage toolkit for noisy bibliographic metadata.
// One binary, subcommand per pipeline stage, so batch runs can be scripted.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linkforge/classifier.hpp"
#include "linkforge/corpus.hpp"
#include "linkforge/error.hpp"
#include "linkforge/eval.hpp"
#include "linkforge/features.hpp"
#include "linkforge/index.hpp"
#include "linkforge/matcher.hpp"
#include "linkforge/tem.hpp"
#include "linkforge/textsim.hpp"
#include "linkforge/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linkforge;

namespace {

// ---- shared helpers ----

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void report_load(const std::string& what, const LoadReport& report) {
    if (report.malformed == 0) return;
    std::cerr << what << ": skipped " << report.malformed << " malformed line(s)\n";
    for (const auto& w : report.warnings) std::cerr << "  " << w << '\n';
}

Corpus load_corpus_logged(const fs::path& path, CorpusRole role) {
    LoadReport report;
    Corpus corpus = load_corpus(path, role, &report);
    report_load(path.string(), report);
    return corpus;
}

/// Every run leaves an audit trail: effective configuration plus version.
void write_sidecar(const fs::path& out, const std::string& command, json config,
                   json extra = json::object()) {
    fs::path sidecar = out;
    sidecar.replace_extension(".stats.json");
    json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"] = std::move(config);
    for (auto& [key, value] : extra.items()) j[key] = value;
    std::ofstream os(sidecar);
    if (!os) throw Error("cannot write \"" + sidecar.string() + "\"");
    os << j.dump(2) << '\n';
}

int schema_for_names(const std::vector<std::string>& names) {
    auto matches = [&](const auto& expected) {
        if (names.size() != expected.size()) return false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] != expected[i]) return false;
        }
        return true;
    };
    if (matches(FeatureVector::names())) return FeatureVector::kSchemaVersion;
    if (matches(TitleFeatures::names())) return TitleFeatures::kSchemaVersion;
    throw Error("unrecognized feature columns; expected the header or title feature set");
}

void save_pairs_csv(const Dataset& data, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    for (std::size_t i = 0; i < data.feature_names.size(); ++i) {
        os << data.feature_names[i] << ',';
    }
    os << "label\n";
    os.precision(17);
    for (const auto& p : data.pairs) {
        for (double v : p.features) os << v << ',';
        os << p.label << '\n';
    }
}

Dataset load_pairs(const fs::path& path) {
    Dataset data;
    if (path.extension() == ".jsonl") {
        std::ifstream is(path);
        if (!is) throw Error("cannot open \"" + path.string() + "\"");
        std::string line;
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j = json::parse(line);
            LabeledPair p;
            p.features = j.at("features").get<std::vector<double>>();
            p.label = j.at("label").get<int>();
            data.pairs.push_back(std::move(p));
        }
        if (data.pairs.empty()) throw Error("no pairs in \"" + path.string() + "\"");
        std::size_t dim = data.pairs.front().features.size();
        if (dim == FeatureVector::kSize) {
            for (const char* n : FeatureVector::names()) data.feature_names.push_back(n);
            data.schema_version = FeatureVector::kSchemaVersion;
        } else if (dim == TitleFeatures::kSize) {
            for (const char* n : TitleFeatures::names()) data.feature_names.push_back(n);
            data.schema_version = TitleFeatures::kSchemaVersion;
        } else {
            throw Error("cannot infer feature schema from row width " + std::to_string(dim));
        }
        return data;
    }

    auto lines = read_lines(path);
    if (lines.size() < 2) throw Error("pairs file \"" + path.string() + "\" has no data rows");
    std::vector<std::string> columns;
    std::stringstream header(lines[0]);
    std::string cell;
    while (std::getline(header, cell, ',')) columns.push_back(cell);
    if (columns.empty() || columns.back() != "label") {
        throw Error("pairs file must end with a \"label\" column");
    }
    columns.pop_back();
    data.feature_names = columns;
    data.schema_version = schema_for_names(columns);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream row(lines[i]);
        LabeledPair p;
        std::size_t col = 0;
        while (std::getline(row, cell, ',')) {
            if (col < columns.size()) p.features.push_back(std::stod(cell));
            else p.label = std::stoi(cell);
            ++col;
        }
        if (col != columns.size() + 1) {
            throw Error("pairs row " + std::to_string(i + 1) + " has " + std::to_string(col) +
                        " cells, expected " + std::to_string(columns.size() + 1));
        }
        data.pairs.push_back(std::move(p));
    }
    return data;
}

json metrics_json(const BinaryMetrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall},       {"f1", m.f1},
            {"tp", m.tp},               {"fp", m.fp},               {"fn", m.fn},
            {"tn", m.tn}};
}

json cv_report_json(const CVReport& report) {
    json folds = json::array();
    for (const auto& f : report.per_fold) folds.push_back(metrics_json(f));
    return {{"folds", report.folds},
            {"per_fold", folds},
            {"mean_precision", report.mean_precision},
            {"mean_recall", report.mean_recall},
            {"mean_f1", report.mean_f1},
            {"pooled", metrics_json(report.pooled)}};
}

json eval_report_json(const EvalReport& report) {
    json prov = json::object();
    for (const auto& [name, counts] : report.by_provenance) {
        prov[name] = {{"tp", counts.tp}, {"fp", counts.fp}};
    }
    return {{"precision", report.precision},
            {"recall", report.recall},
            {"f1", report.f1},
            {"tp", report.tp},
            {"fp", report.fp},
            {"fn", report.fn},
            {"by_provenance", prov}};
}

void save_matches(const std::vector<MatchResult>& matches, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    for (const auto& m : matches) {
        json j;
        j["target_id"] = m.target_id;
        j["reference_id"] = m.reference_id;
        j["provenance"] = provenance_name(m.provenance);
        j["score"] = m.score;
        os << j.dump() << '\n';
    }
}

std::vector<MatchResult> load_matches(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    std::vector<MatchResult> matches;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line);
        matches.push_back({j.at("target_id").get<std::string>(),
                           j.at("reference_id").get<std::string>(),
                           provenance_from_name(j.at("provenance").get<std::string>()),
                           j.value("score", 0.0)});
    }
    return matches;
}

// ---- subcommand options ----

struct IndexArgs {
    std::string input;
    std::string field = "title";
    std::string out;
};

struct TrainArgs {
    std::string pairs;
    std::string kind = "forest";
    std::uint64_t seed = 1;
    double threshold = 0.5;
    int trees = 100;
    int depth = 12;
    int min_leaf = 2;
    double lr = 0.5;
    int iters = 500;
    double l2 = 1e-3;
    int workers = 1;
    bool grid = false;
    int grid_k = 5;
    std::string out;
};

struct CrossvalArgs {
    std::string pairs;
    std::string kind = "forest";
    int k = 10;
    std::uint64_t seed = 1;
    bool ig = false;
    TrainArgs hyper;  // reuse the numeric defaults
};

struct TemTrainArgs {
    std::string good;
    std::string df;
    std::size_t synthetic_bad = 0;
    double nonascii_frac = 0.6;
    std::uint64_t seed = 42;
    std::string out;
};

struct TemScoreArgs {
    std::string model;
    std::string title;
};

struct MatchArgs {
    std::string target;
    std::string reference;
    std::string mode = "imm";
    std::string model;
    std::string citation_model;
    std::string tem;
    std::string index_path;
    std::string citation_index_path;
    double theta_title = 0.35;
    double theta_ref = 0.5;
    double theta_tq = 0.2;
    std::size_t k = 10;
    double k1 = 1.2;
    double b = 0.75;
    bool no_abstract = false;
    int workers = 1;
    std::string out;
};

struct BenchSynthArgs {
    std::size_t n = 1100;
    std::uint64_t seed = 42;
    std::string out;
    std::string titles_out;
};

struct BenchGenerateArgs {
    std::string clean;
    std::string spec;
    double match_frac = 0.3;
    std::size_t unmatched = 100;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

struct BenchPairsArgs {
    std::string bench_dir;
    std::string target;
    std::string reference;
    std::string truth;
    std::string citation_links;
    std::string kind = "header";
    std::size_t k = 10;
    std::size_t max_pairs = 20000;
    bool no_abstract = false;
    std::string out;
};

struct EvaluateArgs {
    std::string matches;
    std::string truth;
    std::string out;
};

struct SweepArgs {
    std::string target;
    std::string reference;
    std::string truth;
    std::string citation_model;
    std::vector<double> theta_refs;
    std::vector<double> theta_titles;
    std::size_t k = 10;
    int workers = 1;
    std::string out;
};

struct FeaturesDumpArgs {
    std::string target;
    std::string reference;
    std::string target_id;
    std::string reference_id;
    bool no_abstract = false;
};

// ---- handlers ----

void run_index(const IndexArgs& args) {
    Corpus corpus = load_corpus_logged(args.input, CorpusRole::reference);
    IndexSource source;
    if (args.field == "title") source = IndexSource::papers;
    else if (args.field == "citations") source = IndexSource::citations;
    else throw Error("--field must be title or citations");

    BlockingIndex index = BlockingIndex::build(corpus, source);
    index.save(args.out);
    json summary = {{"docs", index.title_index().doc_count()},
                    {"avg_doc_length", index.title_index().avg_doc_length()}};
    std::cout << summary.dump() << '\n';
    write_sidecar(args.out, "index",
                  {{"input", args.input}, {"field", args.field}, {"out", args.out}});
}

TrainOptions to_options(const TrainArgs& args) {
    TrainOptions o;
    o.seed = args.seed;
    o.workers = args.workers;
    o.forest = {args.trees, args.depth, args.min_leaf};
    o.logreg = {args.lr, args.iters, args.l2};
    return o;
}

json options_json(const TrainOptions& o, const std::string& kind) {
    return {{"kind", kind},
            {"seed", o.seed},
            {"trees", o.forest.n_trees},
            {"depth", o.forest.max_depth},
            {"min_leaf", o.forest.min_leaf},
            {"learning_rate", o.logreg.learning_rate},
            {"iterations", o.logreg.iterations},
            {"l2", o.logreg.l2}};
}

ModelKind kind_from_name(const std::string& kind) {
    if (kind == "forest") return ModelKind::forest;
    if (kind == "logreg") return ModelKind::logreg;
    throw Error("--kind must be forest or logreg");
}

void run_train(const TrainArgs& args) {
    Dataset data = load_pairs(args.pairs);
    ModelKind kind = kind_from_name(args.kind);
    TrainOptions options = to_options(args);
    if (args.grid) {
        auto grid = kind == ModelKind::forest ? default_forest_grid(args.seed)
                                              : std::vector<TrainOptions>{};
        if (kind == ModelKind::logreg) {
            for (double l2 : {1e-4, 1e-3, 1e-2, 1e-1}) {
                TrainOptions o = options;
                o.logreg.l2 = l2;
                grid.push_back(o);
            }
        }
        auto [best, report] = grid_search(data, kind, grid, args.grid_k);
        options = best;
        std::cerr << "grid search: best mean F1 " << report.mean_f1 << '\n';
    }
    Model model = train(data, kind, options);
    model.decision_threshold = args.threshold;
    model.save(fs::path(args.out));
    json config = options_json(options, args.kind);
    config["pairs"] = args.pairs;
    config["threshold"] = args.threshold;
    config["grid_search"] = args.grid;
    write_sidecar(args.out, "train", config,
                  {{"n_pairs", data.pairs.size()}, {"schema", data.schema_version}});
    std::cout << json({{"model", args.out}, {"pairs", data.pairs.size()}}).dump() << '\n';
}

void run_crossval(const CrossvalArgs& args) {
    Dataset data = load_pairs(args.pairs);
    TrainOptions options = to_options(args.hyper);
    options.seed = args.seed;
    CVReport report = cross_validate(data, kind_from_name(args.kind), options, args.k);
    json out = cv_report_json(report);
    if (args.ig) {
        json ig = json::array();
        for (const auto& [name, gain] : information_gain(data)) {
            ig.push_back({{"feature", name}, {"gain", gain}});
        }
        out["information_gain"] = ig;
    }
    std::cout << out.dump(2) << '\n';
}

void run_tem_train(const TemTrainArgs& args) {
    auto goods = read_lines(args.good);
    auto df_titles = args.df.empty() ? goods : read_lines(args.df);
    TemModel tem;
    tem.df = build_df_table(df_titles);
    TemSyntheticParams params;
    params.nonascii_char_frac = args.nonascii_frac;
    std::size_t n_bad = args.synthetic_bad > 0 ? args.synthetic_bad : goods.size() / 3;
    Dataset data = make_tem_training_set(goods, n_bad, tem.df, params, args.seed);
    TrainOptions options;
    options.seed = args.seed;
    tem.classifier = train(data, ModelKind::logreg, options);
    tem.save(args.out);
    write_sidecar(args.out, "tem train",
                  {{"good", args.good},
                   {"df", args.df.empty() ? args.good : args.df},
                   {"synthetic_bad", n_bad},
                   {"nonascii_frac", args.nonascii_frac},
                   {"seed", args.seed},
                   {"out", args.out}});
    std::cout << json({{"tem", args.out}, {"positives", goods.size()}, {"negatives", n_bad}}).dump()
              << '\n';
}

void run_tem_score(const TemScoreArgs& args) {
    TemModel tem = TemModel::load(args.model);
    TitleQuality q = score_title(tem, args.title);
    std::cout << json({{"theta", q.theta}}).dump() << '\n';
}

void run_match(const MatchArgs& args) {
    Corpus target = load_corpus_logged(args.target, CorpusRole::target);
    Corpus reference = load_corpus_logged(args.reference, CorpusRole::reference);
    MatchMode mode = match_mode_from_name(args.mode);

    std::optional<BlockingIndex> paper_index;
    std::optional<BlockingIndex> citation_index;
    if (!args.index_path.empty()) paper_index = BlockingIndex::load(args.index_path);
    else paper_index = BlockingIndex::build(reference, IndexSource::papers);

    std::optional<Model> header_model, citation_model;
    std::optional<TemModel> tem;
    if (!args.model.empty()) header_model = Model::load(fs::path(args.model));
    if (!args.citation_model.empty()) citation_model = Model::load(fs::path(args.citation_model));
    if (!args.tem.empty()) tem = TemModel::load(args.tem);

    if (mode != MatchMode::cmm && !header_model) throw Error("--model is required for this mode");
    if (mode != MatchMode::hmm && !citation_model) {
        throw Error("--citation-model is required for this mode");
    }
    if (mode == MatchMode::imm && !tem) throw Error("--tem is required for imm mode");

    if (citation_model) {
        if (!args.citation_index_path.empty()) {
            citation_index = BlockingIndex::load(args.citation_index_path);
        } else {
            citation_index = BlockingIndex::build(reference, IndexSource::citations);
        }
    }

    MatcherContext ctx;
    ctx.reference = &reference;
    ctx.paper_index = &*paper_index;
    if (citation_index) ctx.citation_index = &*citation_index;
    if (header_model) ctx.header_model = &*header_model;
    if (citation_model) ctx.citation_model = &*citation_model;
    if (tem) ctx.tem = &*tem;
    ctx.config.k_candidates = args.k;
    ctx.config.theta_title = args.theta_title;
    ctx.config.theta_ref = args.theta_ref;
    ctx.config.theta_tq = args.theta_tq;
    ctx.config.use_abstract = !args.no_abstract;
    ctx.config.bm25 = {args.k1, args.b};
    ctx.prepare();

    auto [matches, stats] = batch_match(target, ctx, mode, args.workers);
    save_matches(matches, args.out);

    json config = {{"target", args.target},     {"reference", args.reference},
                   {"mode", args.mode},         {"model", args.model},
                   {"citation_model", args.citation_model}, {"tem", args.tem},
                   {"theta_title", args.theta_title},       {"theta_ref", args.theta_ref},
                   {"theta_tq", args.theta_tq}, {"k", args.k},
                   {"k1", args.k1},             {"b", args.b},
                   {"use_abstract", !args.no_abstract},     {"workers", args.workers},
                   {"out", args.out}};
    json counts = {{"targets", stats.counts.targets},
                   {"queried", stats.counts.queried},
                   {"candidates_retrieved", stats.counts.candidates_retrieved},
                   {"classified_positive", stats.counts.classified_positive},
                   {"tem_gated", stats.counts.tem_gated},
                   {"cmm_invoked", stats.counts.cmm_invoked},
                   {"matched", stats.counts.matched},
                   {"errors", stats.counts.errors}};
    write_sidecar(args.out, "match", config,
                  {{"counts", counts}, {"wall_ms", stats.wall_ms}});
    std::cout << json({{"matched", matches.size()}, {"targets", target.size()}}).dump() << '\n';
}

void run_bench_synth(const BenchSynthArgs& args) {
    Corpus corpus = make_clean_corpus(args.n, args.seed);
    std::ofstream os(args.out);
    if (!os) throw Error("cannot write \"" + args.out + "\"");
    corpus.to_jsonl(os);
    if (!args.titles_out.empty()) {
        std::ofstream ts(args.titles_out);
        if (!ts) throw Error("cannot write \"" + args.titles_out + "\"");
        for (const auto& r : corpus.records()) {
            if (r.title) ts << *r.title << '\n';
        }
    }
    write_sidecar(args.out, "bench synth",
                  {{"n", args.n}, {"seed", args.seed}, {"out", args.out}});
    std::cout << json({{"records", corpus.size()}, {"out", args.out}}).dump() << '\n';
}

void run_bench_generate(const BenchGenerateArgs& args) {
    Corpus clean = load_corpus_logged(args.clean, CorpusRole::reference);
    NoiseSpec spec;
    if (!args.spec.empty()) spec = NoiseSpec::from_kv_file(args.spec);
    if (args.seed) spec.seed = *args.seed;

    Benchmark bench = generate_benchmark(clean, spec, args.match_frac, args.unmatched);
    fs::path dir(args.out_dir);
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "target.jsonl");
        bench.target.to_jsonl(os);
    }
    {
        std::ofstream os(dir / "reference.jsonl");
        bench.reference.to_jsonl(os);
    }
    bench.truth.save(dir / "truth.jsonl");
    save_citation_links(bench.citation_links, dir / "citation_links.jsonl");

    json config = {{"clean", args.clean},
                   {"match_frac", args.match_frac},
                   {"unmatched", args.unmatched},
                   {"seed", spec.seed},
                   {"title_char_error_rate", spec.title_char_error_rate},
                   {"title_truncate_prob", spec.title_truncate_prob},
                   {"title_garbage_prob", spec.title_garbage_prob},
                   {"drop_abstract_prob", spec.drop_abstract_prob},
                   {"drop_year_prob", spec.drop_year_prob},
                   {"drop_author_prob", spec.drop_author_prob},
                   {"author_initialize_prob", spec.author_initialize_prob},
                   {"citation_subset_frac", spec.citation_subset_frac},
                   {"out", args.out_dir}};
    write_sidecar(dir / "bench.out", "bench generate", config,
                  {{"targets", bench.target.size()},
                   {"references", bench.reference.size()},
                   {"true_pairs", bench.truth.pairs.size()},
                   {"unmatched_targets", bench.truth.unmatched_targets.size()}});
    std::cout << json({{"targets", bench.target.size()},
                       {"references", bench.reference.size()},
                       {"out", args.out_dir}})
                     .dump()
              << '\n';
}

void run_bench_pairs(const BenchPairsArgs& args_in) {
    BenchPairsArgs args = args_in;
    if (!args.bench_dir.empty()) {
        fs::path dir(args.bench_dir);
        if (args.target.empty()) args.target = (dir / "target.jsonl").string();
        if (args.reference.empty()) args.reference = (dir / "reference.jsonl").string();
        if (args.truth.empty()) args.truth = (dir / "truth.jsonl").string();
        if (args.citation_links.empty()) {
            args.citation_links = (dir / "citation_links.jsonl").string();
        }
    }
    if (args.target.empty() || args.reference.empty()) {
        throw Error("--target and --reference (or --bench) are required");
    }
    Corpus target = load_corpus_logged(args.target, CorpusRole::target);
    Corpus reference = load_corpus_logged(args.reference, CorpusRole::reference);

    Dataset data;
    if (args.kind == "header") {
        if (args.truth.empty()) throw Error("--truth is required for header pairs");
        GroundTruth truth = GroundTruth::load(args.truth);
        BlockingIndex index = BlockingIndex::build(reference, IndexSource::papers);
        data = make_training_pairs(target, reference, index, truth, args.k, !args.no_abstract);
    } else if (args.kind == "citation") {
        if (args.citation_links.empty()) {
            throw Error("--citation-links is required for citation pairs");
        }
        auto links = load_citation_links(args.citation_links);
        BlockingIndex index = BlockingIndex::build(reference, IndexSource::citations);
        data = make_citation_training_pairs(target, reference, index, links, args.k,
                                            args.max_pairs);
    } else {
        throw Error("--kind must be header or citation");
    }
    save_pairs_csv(data, args.out);
    std::size_t positives = 0;
    for (const auto& p : data.pairs) positives += static_cast<std::size_t>(p.label);
    write_sidecar(args.out, "bench pairs",
                  {{"target", args.target},
                   {"reference", args.reference},
                   {"truth", args.truth},
                   {"citation_links", args.citation_links},
                   {"kind", args.kind},
                   {"k", args.k},
                   {"max_pairs", args.max_pairs},
                   {"use_abstract", !args.no_abstract},
                   {"out", args.out}},
                  {{"pairs", data.pairs.size()}, {"positives", positives}});
    std::cout << json({{"pairs", data.pairs.size()}, {"positives", positives}}).dump() << '\n';
}

void run_evaluate(const EvaluateArgs& args) {
    auto matches = load_matches(args.matches);
    GroundTruth truth = GroundTruth::load(args.truth);
    EvalReport report = evaluate(matches, truth);
    json out = eval_report_json(report);
    out["matches"] = args.matches;
    out["truth"] = args.truth;
    std::cout << out.dump(2) << '\n';
    if (!args.out.empty()) {
        std::ofstream os(args.out);
        if (!os) throw Error("cannot write \"" + args.out + "\"");
        os << out.dump(2) << '\n';
        write_sidecar(args.out, "evaluate",
                      {{"matches", args.matches}, {"truth", args.truth}, {"out", args.out}});
    }
}

void run_sweep(const SweepArgs& args) {
    Corpus target = load_corpus_logged(args.target, CorpusRole::target);
    Corpus reference = load_corpus_logged(args.reference, CorpusRole::reference);
    GroundTruth truth = GroundTruth::load(args.truth);
    Model citation_model = Model::load(fs::path(args.citation_model));
    BlockingIndex citation_index = BlockingIndex::build(reference, IndexSource::citations);

    auto grid = default_sweep_grid();
    std::vector<double> theta_refs = args.theta_refs.empty() ? grid.first : args.theta_refs;
    std::vector<double> theta_titles = args.theta_titles.empty() ? grid.second : args.theta_titles;

    MatcherContext ctx;
    ctx.reference = &reference;
    ctx.citation_index = &citation_index;
    ctx.citation_model = &citation_model;
    ctx.config.k_candidates = args.k;
    ctx.prepare();

    auto cells = sweep_cmm(target, ctx, theta_refs, theta_titles, truth, args.workers);
    std::ofstream os(args.out);
    if (!os) throw Error("cannot write \"" + args.out + "\"");
    os << "theta_ref,theta_title,precision,recall,f1,tp,fp,fn\n";
    os.precision(6);
    for (const auto& cell : cells) {
        os << cell.theta_ref << ',' << cell.theta_title << ',' << cell.report.precision << ','
           << cell.report.recall << ',' << cell.report.f1 << ',' << cell.report.tp << ','
           << cell.report.fp << ',' << cell.report.fn << '\n';
    }
    write_sidecar(args.out, "sweep",
                  {{"target", args.target},
                   {"reference", args.reference},
                   {"truth", args.truth},
                   {"citation_model", args.citation_model},
                   {"k", args.k},
                   {"workers", args.workers},
                   {"out", args.out}});
    std::cout << json({{"cells", cells.size()}, {"out", args.out}}).dump() << '\n';
}

void run_features_dump(const FeaturesDumpArgs& args) {
    Corpus target = load_corpus_logged(args.target, CorpusRole::target);
    Corpus reference = load_corpus_logged(args.reference, CorpusRole::reference);
    auto fv = header_features(target.get(args.target_id), reference.get(args.reference_id),
                              !args.no_abstract)
                  .as_array();
    const auto& names = FeatureVector::names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::cout << names[i] << (i + 1 < names.size() ? "," : "\n");
    }
    std::cout.precision(17);
    for (std::size_t i = 0; i < fv.size(); ++i) {
        std::cout << fv[i] << (i + 1 < fv.size() ? "," : "\n");
    }
}

void run_features_ig(const std::string& pairs_path) {
    Dataset data = load_pairs(pairs_path);
    json out = json::array();
    for (const auto& [name, gain] : information_gain(data)) {
        out.push_back({{"feature", name}, {"gain", gain}});
    }
    std::cout << out.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Record linkage for noisy bibliographic metadata"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.set_config("--config", "", "INI config file; command-line flags win");
    app.require_subcommand(1);

    IndexArgs index_args;
    auto* cmd_index = app.add_subcommand("index", "Build a blocking index from a JSONL corpus");
    cmd_index->add_option("--input", index_args.input, "Reference corpus JSONL")->required();
    cmd_index->add_option("--field", index_args.field, "title|citations")
        ->check(CLI::IsMember({"title", "citations"}));
    cmd_index->add_option("--out", index_args.out, "Output index file")->required();
    cmd_index->callback([&] { run_index(index_args); });

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train", "Train a pairwise match classifier");
    cmd_train->add_option("--pairs", train_args.pairs, "Labeled pairs CSV/JSONL")->required();
    cmd_train->add_option("--kind", train_args.kind, "forest|logreg")
        ->check(CLI::IsMember({"forest", "logreg"}));
    cmd_train->add_option("--seed", train_args.seed, "Training seed");
    cmd_train->add_option("--threshold", train_args.threshold, "Decision threshold");
    cmd_train->add_option("--trees", train_args.trees, "Forest size");
    cmd_train->add_option("--depth", train_args.depth, "Max tree depth");
    cmd_train->add_option("--min-leaf", train_args.min_leaf, "Min samples per leaf");
    cmd_train->add_option("--lr", train_args.lr, "Logreg learning rate");
    cmd_train->add_option("--iters", train_args.iters, "Logreg iterations");
    cmd_train->add_option("--l2", train_args.l2, "Logreg L2 penalty");
    cmd_train->add_option("--workers", train_args.workers, "Tree-training threads");
    cmd_train->add_flag("--grid-search", train_args.grid, "Tune on the default lattice first");
    cmd_train->add_option("--grid-k", train_args.grid_k, "CV folds for grid search");
    cmd_train->add_option("--out", train_args.out, "Output model file")->required();
    cmd_train->callback([&] { run_train(train_args); });

    CrossvalArgs cv_args;
    auto* cmd_cv = app.add_subcommand("crossval", "Stratified k-fold cross-validation");
    cmd_cv->add_option("--pairs", cv_args.pairs, "Labeled pairs CSV/JSONL")->required();
    cmd_cv->add_option("--kind", cv_args.kind, "forest|logreg")
        ->check(CLI::IsMember({"forest", "logreg"}));
    cmd_cv->add_option("--k", cv_args.k, "Fold count");
    cmd_cv->add_option("--seed", cv_args.seed, "Fold/training seed");
    cmd_cv->add_option("--trees", cv_args.hyper.trees, "Forest size");
    cmd_cv->add_option("--depth", cv_args.hyper.depth, "Max tree depth");
    cmd_cv->add_flag("--ig", cv_args.ig, "Also print information-gain ranking");
    cmd_cv->callback([&] { run_crossval(cv_args); });

    auto* cmd_tem = app.add_subcommand("tem", "Title quality model");
    cmd_tem->require_subcommand(1);
    TemTrainArgs tem_train_args;
    auto* cmd_tem_train = cmd_tem->add_subcommand("train", "Train the title scorer");
    cmd_tem_train->add_option("--good", tem_train_args.good, "File of known-good titles")
        ->required();
    cmd_tem_train->add_option("--df", tem_train_args.df,
                              "Titles for the DF table (defaults to --good)");
    cmd_tem_train->add_option("--synthetic-bad", tem_train_args.synthetic_bad,
                              "Negatives to synthesize (default: good/3)");
    cmd_tem_train->add_option("--nonascii-frac", tem_train_args.nonascii_frac,
                              "Char corruption rate for the non-ASCII flavor");
    cmd_tem_train->add_option("--seed", tem_train_args.seed, "Seed");
    cmd_tem_train->add_option("--out", tem_train_args.out, "Output model file")->required();
    cmd_tem_train->callback([&] { run_tem_train(tem_train_args); });

    TemScoreArgs tem_score_args;
    auto* cmd_tem_score = cmd_tem->add_subcommand("score", "Score one title string");
    cmd_tem_score->add_option("--model", tem_score_args.model, "TEM model file")->required();
    cmd_tem_score->add_option("--title", tem_score_args.title, "Title to score")->required();
    cmd_tem_score->callback([&] { run_tem_score(tem_score_args); });

    MatchArgs match_args;
    auto* cmd_match = app.add_subcommand("match", "Match a target corpus against a reference");
    cmd_match->add_option("--target", match_args.target, "Target corpus JSONL")->required();
    cmd_match->add_option("--reference", match_args.reference, "Reference corpus JSONL")
        ->required();
    cmd_match->add_option("--mode", match_args.mode, "hmm|cmm|imm")
        ->check(CLI::IsMember({"hmm", "cmm", "imm"}));
    cmd_match->add_option("--model", match_args.model, "Header classifier");
    cmd_match->add_option("--citation-model", match_args.citation_model, "Citation classifier");
    cmd_match->add_option("--tem", match_args.tem, "Title quality model");
    cmd_match->add_option("--index", match_args.index_path, "Prebuilt paper index");
    cmd_match->add_option("--citation-index", match_args.citation_index_path,
                          "Prebuilt citation index");
    cmd_match->add_option("--theta-title", match_args.theta_title, "Title distance threshold");
    cmd_match->add_option("--theta-ref", match_args.theta_ref, "Citation BoW threshold");
    cmd_match->add_option("--theta-tq", match_args.theta_tq, "Title quality threshold");
    cmd_match->add_option("--k", match_args.k, "Blocking candidates per query");
    cmd_match->add_option("--k1", match_args.k1, "BM25 k1");
    cmd_match->add_option("--b", match_args.b, "BM25 b");
    cmd_match->add_flag("--no-abstract", match_args.no_abstract, "Ignore abstracts");
    cmd_match->add_option("--workers", match_args.workers, "Worker threads");
    cmd_match->add_option("--out", match_args.out, "Output matches JSONL")->required();
    cmd_match->callback([&] { run_match(match_args); });

    auto* cmd_bench = app.add_subcommand("bench", "Synthetic benchmark tooling");
    cmd_bench->require_subcommand(1);

    BenchSynthArgs synth_args;
    auto* cmd_synth = cmd_bench->add_subcommand("synth", "Emit a deterministic clean corpus");
    cmd_synth->add_option("--n", synth_args.n, "Record count");
    cmd_synth->add_option("--seed", synth_args.seed, "Seed");
    cmd_synth->add_option("--out", synth_args.out, "Output JSONL")->required();
    cmd_synth->add_option("--titles-out", synth_args.titles_out, "Also write titles, one per line");
    cmd_synth->callback([&] { run_bench_synth(synth_args); });

    BenchGenerateArgs gen_args;
    auto* cmd_gen = cmd_bench->add_subcommand("generate", "Corrupt a clean corpus into a benchmark");
    cmd_gen->add_option("--clean", gen_args.clean, "Clean corpus JSONL")->required();
    cmd_gen->add_option("--spec", gen_args.spec, "Noise spec file (key = value lines)");
    cmd_gen->add_option("--match-frac", gen_args.match_frac, "Fraction of clean records corrupted");
    cmd_gen->add_option("--unmatched", gen_args.unmatched, "Targets with no counterpart");
    cmd_gen->add_option("--seed", gen_args.seed, "Overrides the noise file's seed");
    cmd_gen->add_option("--out", gen_args.out_dir, "Output directory")->required();
    cmd_gen->callback([&] { run_bench_generate(gen_args); });

    BenchPairsArgs pairs_args;
    auto* cmd_pairs = cmd_bench->add_subcommand("pairs", "Emit labeled training pairs");
    cmd_pairs->add_option("--bench", pairs_args.bench_dir, "Benchmark dir from bench generate");
    cmd_pairs->add_option("--target", pairs_args.target, "Target corpus JSONL");
    cmd_pairs->add_option("--reference", pairs_args.reference, "Reference corpus JSONL");
    cmd_pairs->add_option("--truth", pairs_args.truth, "Ground truth JSONL");
    cmd_pairs->add_option("--citation-links", pairs_args.citation_links,
                          "Citation provenance JSONL");
    cmd_pairs->add_option("--kind", pairs_args.kind, "header|citation")
        ->check(CLI::IsMember({"header", "citation"}));
    cmd_pairs->add_option("--k", pairs_args.k, "Blocking candidates per query");
    cmd_pairs->add_option("--max-pairs", pairs_args.max_pairs, "Cap for citation pairs (0 = all)");
    cmd_pairs->add_flag("--no-abstract", pairs_args.no_abstract, "Ignore abstracts");
    cmd_pairs->add_option("--out", pairs_args.out, "Output pairs CSV")->required();
    cmd_pairs->callback([&] { run_bench_pairs(pairs_args); });

    EvaluateArgs eval_args;
    auto* cmd_eval = app.add_subcommand("evaluate", "Score matches against ground truth");
    cmd_eval->add_option("--matches", eval_args.matches, "Matches JSONL")->required();
    cmd_eval->add_option("--truth", eval_args.truth, "Ground truth JSONL")->required();
    cmd_eval->add_option("--out", eval_args.out, "Also write the report JSON here");
    cmd_eval->callback([&] { run_evaluate(eval_args); });

    SweepArgs sweep_args;
    auto* cmd_sweep = app.add_subcommand("sweep", "CMM threshold sweep (theta_ref x theta_title)");
    cmd_sweep->add_option("--target", sweep_args.target, "Target corpus JSONL")->required();
    cmd_sweep->add_option("--reference", sweep_args.reference, "Reference corpus JSONL")
        ->required();
    cmd_sweep->add_option("--truth", sweep_args.truth, "Ground truth JSONL")->required();
    cmd_sweep->add_option("--citation-model", sweep_args.citation_model, "Citation classifier")
        ->required();
    cmd_sweep->add_option("--theta-refs", sweep_args.theta_refs, "Grid rows")->delimiter(',');
    cmd_sweep->add_option("--theta-titles", sweep_args.theta_titles, "Grid columns")
        ->delimiter(',');
    cmd_sweep->add_option("--k", sweep_args.k, "Blocking candidates per query");
    cmd_sweep->add_option("--workers", sweep_args.workers, "Parallel sweep cells");
    cmd_sweep->add_option("--out", sweep_args.out, "Output CSV")->required();
    cmd_sweep->callback([&] { run_sweep(sweep_args); });

    auto* cmd_features = app.add_subcommand("features", "Feature inspection");
    cmd_features->require_subcommand(1);
    FeaturesDumpArgs dump_args;
    auto* cmd_dump = cmd_features->add_subcommand("dump", "Print one pair's feature vector as CSV");
    cmd_dump->add_option("--target", dump_args.target, "Target corpus JSONL")->required();
    cmd_dump->add_option("--reference", dump_args.reference, "Reference corpus JSONL")->required();
    cmd_dump->add_option("--target-id", dump_args.target_id, "Target record id")->required();
    cmd_dump->add_option("--reference-id", dump_args.reference_id, "Reference record id")
        ->required();
    cmd_dump->add_flag("--no-abstract", dump_args.no_abstract, "Ignore abstracts");
    cmd_dump->callback([&] { run_features_dump(dump_args); });

    std::string ig_pairs;
    auto* cmd_ig = cmd_features->add_subcommand("ig", "Information-gain ranking of a pairs file");
    cmd_ig->add_option("--pairs", ig_pairs, "Labeled pairs CSV/JSONL")->required();
    cmd_ig->callback([&] { run_features_ig(ig_pairs); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json({{"error", e.what()}, {"code", "usage"}}).dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json({{"error", e.what()}, {"code", "failure"}}).dump() << '\n';
        return 1;
    }
    return 0;
}
