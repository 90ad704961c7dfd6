#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

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

namespace py = pybind11;
using namespace linkforge;

namespace {

PaperRecord record_from_dict(const py::dict& d) {
    PaperRecord r;
    r.id = py::cast<std::string>(d["id"]);
    auto opt_str = [&](const char* key) -> std::optional<std::string> {
        if (!d.contains(key) || d[key].is_none()) return std::nullopt;
        std::string s = py::cast<std::string>(d[key]);
        if (s.empty()) return std::nullopt;
        return s;
    };
    r.title = opt_str("title");
    r.venue = opt_str("venue");
    r.abstract = opt_str("abstract");
    if (d.contains("authors") && !d["authors"].is_none()) {
        r.authors = py::cast<std::vector<std::string>>(d["authors"]);
    }
    if (d.contains("year") && !d["year"].is_none()) r.year = py::cast<int>(d["year"]);
    if (d.contains("citations") && !d["citations"].is_none()) {
        for (auto item : d["citations"]) {
            py::dict cd = py::cast<py::dict>(item);
            CitationRecord c;
            if (cd.contains("title") && !cd["title"].is_none()) {
                std::string s = py::cast<std::string>(cd["title"]);
                if (!s.empty()) c.title = s;
            }
            if (cd.contains("authors") && !cd["authors"].is_none()) {
                c.authors = py::cast<std::vector<std::string>>(cd["authors"]);
            }
            if (cd.contains("year") && !cd["year"].is_none()) c.year = py::cast<int>(cd["year"]);
            r.citations.push_back(std::move(c));
        }
    }
    return r;
}

py::dict record_to_dict(const PaperRecord& r) {
    py::dict d;
    d["id"] = r.id;
    d["title"] = r.title ? py::object(py::cast(*r.title)) : py::none();
    d["authors"] = r.authors;
    d["year"] = r.year ? py::object(py::cast(*r.year)) : py::none();
    d["venue"] = r.venue ? py::object(py::cast(*r.venue)) : py::none();
    d["abstract"] = r.abstract ? py::object(py::cast(*r.abstract)) : py::none();
    py::list citations;
    for (const auto& c : r.citations) {
        py::dict cd;
        cd["raw_id"] = c.raw_id;
        cd["title"] = c.title ? py::object(py::cast(*c.title)) : py::none();
        cd["authors"] = c.authors;
        cd["year"] = c.year ? py::object(py::cast(*c.year)) : py::none();
        citations.append(cd);
    }
    d["citations"] = citations;
    return d;
}

py::dict eval_report_to_dict(const EvalReport& report) {
    py::dict d;
    d["precision"] = report.precision;
    d["recall"] = report.recall;
    d["f1"] = report.f1;
    d["tp"] = report.tp;
    d["fp"] = report.fp;
    d["fn"] = report.fn;
    py::dict prov;
    for (const auto& [name, counts] : report.by_provenance) {
        py::dict p;
        p["tp"] = counts.tp;
        p["fp"] = counts.fp;
        prov[py::str(name)] = p;
    }
    d["by_provenance"] = prov;
    return d;
}

Dataset dataset_from_rows(const std::vector<std::vector<double>>& rows,
                          const std::vector<int>& labels, int schema_version) {
    if (rows.size() != labels.size()) throw Error("rows and labels differ in length");
    Dataset data;
    data.schema_version = schema_version;
    if (schema_version == FeatureVector::kSchemaVersion) {
        for (const char* n : FeatureVector::names()) data.feature_names.push_back(n);
    } else if (schema_version == TitleFeatures::kSchemaVersion) {
        for (const char* n : TitleFeatures::names()) data.feature_names.push_back(n);
    } else {
        throw Error("unknown schema version " + std::to_string(schema_version));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.pairs.push_back({rows[i], labels[i]});
    }
    return data;
}

struct PyMatcher {
    Corpus reference;
    BlockingIndex paper_index;
    std::optional<BlockingIndex> citation_index;
    std::optional<Model> header_model;
    std::optional<Model> citation_model;
    std::optional<TemModel> tem;
    MatcherContext ctx;

    void wire(const MatcherConfig& config) {
        ctx.reference = &reference;
        ctx.paper_index = &paper_index;
        ctx.citation_index = citation_index ? &*citation_index : nullptr;
        ctx.header_model = header_model ? &*header_model : nullptr;
        ctx.citation_model = citation_model ? &*citation_model : nullptr;
        ctx.tem = tem ? &*tem : nullptr;
        ctx.config = config;
        ctx.prepare();
    }
};

}  // namespace

PYBIND11_MODULE(_linkforge, m) {
    m.doc() = "Record linkage for noisy bibliographic metadata";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "LinkforgeError");

    // text similarity
    m.def("normalize_title", &normalize_title, py::arg("raw"));
    m.def(
        "normalize_author",
        [](const std::string& raw) {
            AuthorName n = normalize_author(raw);
            return py::make_tuple(n.first ? py::object(py::cast(*n.first)) : py::none(),
                                  n.middle ? py::object(py::cast(*n.middle)) : py::none(),
                                  n.last ? py::object(py::cast(*n.last)) : py::none());
        },
        py::arg("raw"), "Returns (first, middle, last), lowercase and folded.");
    m.def("simhash_hex", [](const std::string& text) { return simhash(text).hex(); },
          py::arg("text"));
    m.def("levenshtein",
          [](const std::string& a, const std::string& b) { return levenshtein(a, b); });
    m.def("normalized_levenshtein", [](const std::string& a, const std::string& b) {
        return normalized_levenshtein(a, b);
    });
    m.def("jaccard", [](const std::set<std::string>& a, const std::set<std::string>& b) {
        return jaccard(a, b);
    });

    // corpus
    py::class_<Corpus>(m, "Corpus")
        .def("__len__", &Corpus::size)
        .def("ids",
             [](const Corpus& c) {
                 std::vector<std::string> out;
                 for (const auto& r : c.records()) out.push_back(r.id);
                 return out;
             })
        .def("record", [](const Corpus& c, const std::string& id) {
            return record_to_dict(c.get(id));
        });
    m.def(
        "load_corpus",
        [](const std::filesystem::path& path, const std::string& role) {
            return load_corpus(path,
                               role == "reference" ? CorpusRole::reference : CorpusRole::target);
        },
        py::arg("path"), py::arg("role") = "target");
    m.def(
        "corpus_from_records",
        [](const std::vector<py::dict>& records, const std::string& role) {
            Corpus corpus(role == "reference" ? CorpusRole::reference : CorpusRole::target);
            for (const auto& d : records) corpus.add(record_from_dict(d));
            return corpus;
        },
        py::arg("records"), py::arg("role") = "target");

    // features
    m.def("feature_names", [] {
        std::vector<std::string> out;
        for (const char* n : FeatureVector::names()) out.emplace_back(n);
        return out;
    });
    m.def(
        "header_features",
        [](const py::dict& target, const py::dict& reference, bool use_abstract) {
            auto arr =
                header_features(record_from_dict(target), record_from_dict(reference), use_abstract)
                    .as_array();
            return std::vector<double>(arr.begin(), arr.end());
        },
        py::arg("target"), py::arg("reference"), py::arg("use_abstract") = true);
    m.def("fullname_code", [](const std::string& a, const std::string& b) {
        return fullname_code(normalize_author(a), normalize_author(b));
    });

    // index
    py::class_<BlockingIndex>(m, "BlockingIndex")
        .def("save", [](const BlockingIndex& idx, const std::filesystem::path& p) { idx.save(p); })
        .def_static("load", [](const std::filesystem::path& p) { return BlockingIndex::load(p); })
        .def(
            "query",
            [](const BlockingIndex& idx, const std::optional<std::string>& title,
               const std::optional<std::string>& last_name, std::optional<int> year,
               std::size_t k) {
                auto q = build_query(title, last_name, year);
                RankedCandidates out;
                if (q) out = idx.query_top_k(*q, k);
                return out;
            },
            py::arg("title") = py::none(), py::arg("last_name") = py::none(),
            py::arg("year") = py::none(), py::arg("k") = 10);
    m.def(
        "build_index",
        [](const Corpus& corpus, const std::string& source) {
            return BlockingIndex::build(corpus, source == "citations" ? IndexSource::citations
                                                                      : IndexSource::papers);
        },
        py::arg("corpus"), py::arg("source") = "papers");

    // classifier
    py::class_<Model>(m, "Model")
        .def_readonly("feature_schema_version", &Model::feature_schema_version)
        .def_readwrite("decision_threshold", &Model::decision_threshold)
        .def("predict_proba",
             [](const Model& m_, const std::vector<double>& row) { return m_.predict_proba(row); })
        .def("predict",
             [](const Model& m_, const std::vector<double>& row) {
                 auto p = predict(m_, row, m_.feature_schema_version);
                 return py::make_tuple(p.label, p.probability);
             })
        .def("save",
             [](const Model& m_, const std::filesystem::path& p) { m_.save(p); })
        .def_static("load",
                    [](const std::filesystem::path& p) { return Model::load(p); });
    m.def(
        "train",
        [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
           const std::string& kind, int schema_version, std::uint64_t seed, int trees, int depth,
           int min_leaf, int workers) {
            Dataset data = dataset_from_rows(rows, labels, schema_version);
            TrainOptions options;
            options.seed = seed;
            options.workers = workers;
            options.forest = {trees, depth, min_leaf};
            return train(data, kind == "logreg" ? ModelKind::logreg : ModelKind::forest, options);
        },
        py::arg("rows"), py::arg("labels"), py::arg("kind") = "forest",
        py::arg("schema_version") = FeatureVector::kSchemaVersion, py::arg("seed") = 1,
        py::arg("trees") = 100, py::arg("depth") = 12, py::arg("min_leaf") = 2,
        py::arg("workers") = 1);
    m.def(
        "cross_validate",
        [](const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
           const std::string& kind, int schema_version, int k, std::uint64_t seed) {
            Dataset data = dataset_from_rows(rows, labels, schema_version);
            TrainOptions options;
            options.seed = seed;
            CVReport r =
                cross_validate(data, kind == "logreg" ? ModelKind::logreg : ModelKind::forest,
                               options, k);
            py::dict d;
            d["folds"] = r.folds;
            d["mean_precision"] = r.mean_precision;
            d["mean_recall"] = r.mean_recall;
            d["mean_f1"] = r.mean_f1;
            d["pooled_f1"] = r.pooled.f1;
            return d;
        },
        py::arg("rows"), py::arg("labels"), py::arg("kind") = "forest",
        py::arg("schema_version") = FeatureVector::kSchemaVersion, py::arg("k") = 10,
        py::arg("seed") = 1);

    // tem
    py::class_<TemModel>(m, "TemModel")
        .def("score", [](const TemModel& t, const std::string& title) {
            return score_title(t, title).theta;
        })
        .def("save", [](const TemModel& t, const std::filesystem::path& p) { t.save(p); })
        .def_static("load", [](const std::filesystem::path& p) { return TemModel::load(p); });
    m.def(
        "train_tem",
        [](const std::vector<std::string>& good_titles, std::size_t n_bad, std::uint64_t seed) {
            return train_tem(good_titles, n_bad, TemSyntheticParams{}, seed);
        },
        py::arg("good_titles"), py::arg("n_bad"), py::arg("seed") = 42);

    // eval and matching
    m.def("make_clean_corpus", &make_clean_corpus, py::arg("n"), py::arg("seed") = 42);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_readonly("pairs", &GroundTruth::pairs)
        .def_readonly("unmatched_targets", &GroundTruth::unmatched_targets);

    py::class_<Benchmark>(m, "Benchmark")
        .def_readonly("target", &Benchmark::target)
        .def_readonly("reference", &Benchmark::reference)
        .def_readonly("truth", &Benchmark::truth);

    m.def(
        "generate_benchmark",
        [](const Corpus& clean, double match_frac, std::size_t n_unmatched, std::uint64_t seed) {
            NoiseSpec spec;
            spec.seed = seed;
            return generate_benchmark(clean, spec, match_frac, n_unmatched);
        },
        py::arg("clean"), py::arg("match_frac") = 0.3, py::arg("n_unmatched") = 0,
        py::arg("seed") = 42);

    m.def(
        "make_training_pairs",
        [](const Benchmark& bench, std::size_t k, bool use_abstract) {
            BlockingIndex index = BlockingIndex::build(bench.reference, IndexSource::papers);
            Dataset data = make_training_pairs(bench.target, bench.reference, index, bench.truth,
                                               k, use_abstract);
            std::vector<std::vector<double>> rows;
            std::vector<int> labels;
            for (auto& p : data.pairs) {
                rows.push_back(std::move(p.features));
                labels.push_back(p.label);
            }
            return py::make_tuple(rows, labels);
        },
        py::arg("benchmark"), py::arg("k") = 10, py::arg("use_abstract") = true);
    m.def(
        "make_citation_training_pairs",
        [](const Benchmark& bench, std::size_t k, std::size_t max_pairs) {
            BlockingIndex index = BlockingIndex::build(bench.reference, IndexSource::citations);
            Dataset data = make_citation_training_pairs(bench.target, bench.reference, index,
                                                        bench.citation_links, k, max_pairs);
            std::vector<std::vector<double>> rows;
            std::vector<int> labels;
            for (auto& p : data.pairs) {
                rows.push_back(std::move(p.features));
                labels.push_back(p.label);
            }
            return py::make_tuple(rows, labels);
        },
        py::arg("benchmark"), py::arg("k") = 10, py::arg("max_pairs") = 20000);

    py::class_<PyMatcher>(m, "Matcher")
        .def(py::init([](const Corpus& reference, std::optional<Model> header_model,
                         std::optional<Model> citation_model, std::optional<TemModel> tem,
                         std::size_t k, double theta_title, double theta_ref, double theta_tq,
                         bool use_abstract) {
                 auto self = std::make_unique<PyMatcher>();
                 self->reference = reference;
                 self->paper_index = BlockingIndex::build(self->reference, IndexSource::papers);
                 if (citation_model) {
                     self->citation_index =
                         BlockingIndex::build(self->reference, IndexSource::citations);
                 }
                 self->header_model = std::move(header_model);
                 self->citation_model = std::move(citation_model);
                 self->tem = std::move(tem);
                 MatcherConfig config;
                 config.k_candidates = k;
                 config.theta_title = theta_title;
                 config.theta_ref = theta_ref;
                 config.theta_tq = theta_tq;
                 config.use_abstract = use_abstract;
                 self->wire(config);
                 return self;
             }),
             py::arg("reference"), py::arg("header_model") = py::none(),
             py::arg("citation_model") = py::none(), py::arg("tem") = py::none(),
             py::arg("k") = 10, py::arg("theta_title") = 0.35, py::arg("theta_ref") = 0.5,
             py::arg("theta_tq") = 0.2, py::arg("use_abstract") = true)
        .def(
            "match",
            [](const PyMatcher& self, const Corpus& target, const std::string& mode, int workers) {
                auto [matches, stats] =
                    batch_match(target, self.ctx, match_mode_from_name(mode), workers);
                py::list out;
                for (const auto& r : matches) {
                    py::dict d;
                    d["target_id"] = r.target_id;
                    d["reference_id"] = r.reference_id;
                    d["provenance"] = provenance_name(r.provenance);
                    d["score"] = r.score;
                    out.append(d);
                }
                return out;
            },
            py::arg("target"), py::arg("mode") = "imm", py::arg("workers") = 1);

    m.def(
        "evaluate",
        [](const std::vector<py::dict>& matches, const Benchmark& bench) {
            std::vector<MatchResult> ms;
            for (const auto& d : matches) {
                ms.push_back({py::cast<std::string>(d["target_id"]),
                              py::cast<std::string>(d["reference_id"]),
                              provenance_from_name(py::cast<std::string>(d["provenance"])),
                              d.contains("score") ? py::cast<double>(d["score"]) : 0.0});
            }
            return eval_report_to_dict(evaluate(ms, bench.truth));
        },
        py::arg("matches"), py::arg("benchmark"));
}
