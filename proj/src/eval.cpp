#include "linkforge/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "linkforge/error.hpp"
#include "linkforge/features.hpp"
#include "linkforge/parallel.hpp"
#include "linkforge/rng.hpp"
#include "linkforge/tem.hpp"
#include "linkforge/textsim.hpp"

namespace linkforge {

using nlohmann::json;

void GroundTruth::add_pair(std::string target_id, std::string reference_id) {
    if (unmatched_targets.count(target_id)) {
        throw Error("target \"" + target_id + "\" is already marked unmatched");
    }
    pairs.emplace(std::move(target_id), std::move(reference_id));
}

void GroundTruth::add_unmatched(std::string target_id) {
    for (const auto& [t, r] : pairs) {
        if (t == target_id) throw Error("target \"" + target_id + "\" already has a true match");
    }
    unmatched_targets.insert(std::move(target_id));
}

void GroundTruth::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    for (const auto& [t, r] : pairs) {
        json j;
        j["target_id"] = t;
        j["reference_id"] = r;
        os << j.dump() << '\n';
    }
    for (const auto& t : unmatched_targets) {
        json j;
        j["target_id"] = t;
        j["reference_id"] = nullptr;
        os << j.dump() << '\n';
    }
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    GroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error("truth line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.contains("target_id") || !j["target_id"].is_string()) {
            throw Error("truth line " + std::to_string(line_no) + ": missing target_id");
        }
        if (j.contains("reference_id") && j["reference_id"].is_string()) {
            truth.add_pair(j["target_id"].get<std::string>(),
                           j["reference_id"].get<std::string>());
        } else {
            truth.add_unmatched(j["target_id"].get<std::string>());
        }
    }
    return truth;
}

GroundTruth restrict_truth(const GroundTruth& truth, const std::set<std::string>& target_ids) {
    GroundTruth out;
    for (const auto& [t, r] : truth.pairs) {
        if (target_ids.count(t)) out.pairs.emplace(t, r);
    }
    for (const auto& t : truth.unmatched_targets) {
        if (target_ids.count(t)) out.unmatched_targets.insert(t);
    }
    return out;
}

std::vector<MatchResult> filter_matches(const std::vector<MatchResult>& matches,
                                        const std::set<std::string>& target_ids) {
    std::vector<MatchResult> out;
    for (const auto& m : matches) {
        if (target_ids.count(m.target_id)) out.push_back(m);
    }
    return out;
}

EvalReport evaluate(const std::vector<MatchResult>& matches, const GroundTruth& truth) {
    EvalReport report;
    std::set<std::pair<std::string, std::string>> predicted_true;
    for (const auto& m : matches) {
        auto& prov = report.by_provenance[provenance_name(m.provenance)];
        if (truth.pairs.count({m.target_id, m.reference_id})) {
            ++report.tp;
            ++prov.tp;
            predicted_true.emplace(m.target_id, m.reference_id);
        } else {
            ++report.fp;
            ++prov.fp;
        }
    }
    for (const auto& p : truth.pairs) {
        if (!predicted_true.count(p)) ++report.fn;
    }
    report.precision = report.tp + report.fp == 0
                           ? 1.0
                           : static_cast<double>(report.tp) /
                                 static_cast<double>(report.tp + report.fp);
    report.recall = report.tp + report.fn == 0
                        ? 1.0
                        : static_cast<double>(report.tp) /
                              static_cast<double>(report.tp + report.fn);
    report.f1 = report.precision + report.recall > 0.0
                    ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                    : 0.0;
    return report;
}

NoiseSpec NoiseSpec::from_kv_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    NoiseSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw Error("noise spec line " + std::to_string(line_no) + ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "title_char_error_rate") spec.title_char_error_rate = std::stod(value);
            else if (key == "title_truncate_prob") spec.title_truncate_prob = std::stod(value);
            else if (key == "title_garbage_prob") spec.title_garbage_prob = std::stod(value);
            else if (key == "drop_abstract_prob") spec.drop_abstract_prob = std::stod(value);
            else if (key == "drop_year_prob") spec.drop_year_prob = std::stod(value);
            else if (key == "drop_author_prob") spec.drop_author_prob = std::stod(value);
            else if (key == "author_initialize_prob") spec.author_initialize_prob = std::stod(value);
            else if (key == "citation_subset_frac") spec.citation_subset_frac = std::stod(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else throw Error("noise spec: unknown key \"" + key + "\"");
        } catch (const std::invalid_argument&) {
            throw Error("noise spec line " + std::to_string(line_no) + ": bad value for " + key);
        }
    }
    return spec;
}

void save_citation_links(const std::vector<CitationLink>& links,
                         const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write \"" + path.string() + "\"");
    for (const auto& link : links) {
        json j;
        j["target_citation"] = link.target_citation;
        j["reference_citation"] = link.reference_citation;
        os << j.dump() << '\n';
    }
}

std::vector<CitationLink> load_citation_links(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    std::vector<CitationLink> links;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line);
        links.push_back({j.at("target_citation").get<std::string>(),
                         j.at("reference_citation").get<std::string>()});
    }
    return links;
}

// ---- synthetic corpus ----

namespace {

const std::vector<std::string>& topic_words() {
    static const std::vector<std::string> kWords = {
        "adaptive",     "algorithm",   "analysis",     "approximation", "architecture",
        "bayesian",     "benchmark",   "boolean",      "caching",       "classification",
        "clustering",   "coding",      "combinatorial", "compression",  "computation",
        "concurrent",   "constraint",  "convex",       "convolution",   "cryptographic",
        "database",     "decision",    "decoding",     "detection",     "distributed",
        "dynamic",      "efficient",   "embedding",    "encoding",      "entropy",
        "estimation",   "evaluation",  "evolutionary", "factorization", "filtering",
        "framework",    "frequency",   "gaussian",     "generative",    "genomic",
        "gradient",     "graph",       "greedy",       "heuristic",     "hierarchical",
        "hybrid",       "indexing",    "inference",    "integration",   "interactive",
        "iterative",    "kernel",      "lattice",      "learning",      "linear",
        "logic",        "markov",      "matching",     "matrix",        "measurement",
        "memory",       "mining",      "modeling",     "modular",       "multicore",
        "network",      "neural",      "nonlinear",    "numerical",     "optimization",
        "parallel",     "parsing",     "partition",    "performance",   "pipeline",
        "planning",     "polynomial",  "prediction",   "probabilistic", "profiling",
        "propagation",  "protocol",    "quantum",      "query",         "random",
        "ranking",      "recognition", "recovery",     "recursive",     "regression",
        "reliability",  "rendering",   "resilient",    "retrieval",     "robust",
        "routing",      "sampling",    "scalable",     "scheduling",    "search",
        "secure",       "segmentation", "semantic",    "sensor",        "sequence",
        "simulation",   "sparse",      "spatial",      "spectral",      "statistical",
        "stochastic",   "storage",     "streaming",    "structured",    "symbolic",
        "synthesis",    "temporal",    "tensor",       "topology",      "tracking",
        "transaction",  "transform",   "traversal",    "verification",  "virtual",
        "visualization", "wavelet",    "wireless",     "workload",      "caches",
        "automata",     "bandits",     "languages",    "compilers",     "kernels",
        "proofs",       "circuits",    "codes",        "games",         "agents",
        "markets",      "auctions",    "privacy",      "fairness",      "causality",
        "attention",    "transformers", "embeddings",  "ontologies",    "provenance"};
    return kWords;
}

const std::vector<std::string>& first_names() {
    static const std::vector<std::string> kNames = {
        "James", "Mary",   "Robert", "Patricia", "John",    "Jennifer", "Michael", "Linda",
        "David", "Elena",  "Wei",    "Yuki",     "Ahmed",   "Fatima",   "Carlos",  "Sofia",
        "Ivan",  "Anna",   "Pierre", "Claire",   "Rajesh",  "Priya",    "Kenji",   "Mei",
        "Lars",  "Ingrid", "Paulo",  "Lucia",    "Tomasz",  "Agata",    "Sven",    "Nadia",
        "Omar",  "Leila",  "Diego",  "Carmen",   "Henrik",  "Marta",    "Andrei",  "Irina"};
    return kNames;
}

const std::vector<std::string>& last_names() {
    static const std::vector<std::string> kNames = {
        "Smith",    "Johnson",  "Williams", "Brown",    "Jones",    "Garcia",  "Miller",
        "Davis",    "Rodriguez", "Martinez", "Hernandez", "Lopez",   "Gonzalez", "Wilson",
        "Anderson", "Thomas",   "Taylor",   "Moore",    "Jackson",  "Martin",  "Lee",
        "Thompson", "White",    "Harris",   "Clark",    "Lewis",    "Robinson", "Walker",
        "Young",    "Allen",    "King",     "Wright",   "Scott",    "Torres",  "Nguyen",
        "Hill",     "Flores",   "Green",    "Adams",    "Nelson",   "Baker",   "Hall",
        "Rivera",   "Campbell", "Mitchell", "Carter",   "Roberts",  "Chen",    "Wang",
        "Kumar",    "Singh",    "Patel",    "Kim",      "Park",     "Tanaka",  "Sato",
        "Mueller",  "Schmidt",  "Rossi",    "Ferrari",  "Silva",    "Santos",  "Kowalski",
        "Novak",    "Ivanov",   "Petrov",   "Andersson", "Nilsson",  "Dubois",  "Moreau"};
    return kNames;
}

const std::vector<std::string>& venue_names() {
    static const std::vector<std::string> kVenues = {
        "Journal of Computational Methods",
        "International Conference on Data Systems",
        "Transactions on Algorithms and Complexity",
        "Symposium on Distributed Computing",
        "Journal of Machine Intelligence",
        "Workshop on Information Retrieval",
        "Annual Conference on Learning Systems",
        "Journal of Network Engineering",
        "International Symposium on Software Analysis",
        "Conference on Statistical Computing",
        "Journal of Parallel Processing",
        "Letters in Applied Informatics",
        "Conference on Knowledge Discovery",
        "Journal of Systems Architecture",
        "International Workshop on Graph Methods",
        "Transactions on Signal Methods",
        "Symposium on Theory of Computation",
        "Journal of Digital Libraries",
        "Conference on Empirical Methods",
        "Annual Review of Computing"};
    return kVenues;
}

std::string capitalize(std::string word) {
    if (!word.empty()) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    return word;
}

std::string synth_title(Rng& rng, std::size_t n_words) {
    const auto& pool = topic_words();
    std::string title;
    std::size_t prev = pool.size();
    for (std::size_t i = 0; i < n_words; ++i) {
        std::size_t pick = rng.below(pool.size());
        if (pick == prev) pick = (pick + 1) % pool.size();
        prev = pick;
        if (!title.empty()) title.push_back(' ');
        title += capitalize(pool[pick]);
    }
    return title;
}

std::string synth_author(Rng& rng) {
    std::string name = first_names()[rng.below(first_names().size())];
    if (rng.chance(0.4)) {
        name.push_back(' ');
        name.push_back(static_cast<char>('A' + rng.below(26)));
        name.push_back('.');
    }
    name.push_back(' ');
    name += last_names()[rng.below(last_names().size())];
    return name;
}

std::vector<std::string> synth_authors(Rng& rng) {
    std::vector<std::string> authors(1 + rng.below(4));
    for (auto& a : authors) a = synth_author(rng);
    return authors;
}

std::string synth_abstract(Rng& rng) {
    const auto& pool = topic_words();
    std::size_t n = 30 + rng.below(50);
    std::string text;
    std::size_t sentence = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::string word = pool[rng.below(pool.size())];
        if (sentence == 0) word = capitalize(word);
        text += word;
        ++sentence;
        if (sentence >= 8 + rng.below(6) || i + 1 == n) {
            text += ". ";
            sentence = 0;
        } else {
            text.push_back(' ');
        }
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    return text;
}

int synth_year(Rng& rng) { return 1970 + static_cast<int>(rng.below(51)); }

CitationRecord synth_citation(Rng& rng) {
    CitationRecord c;
    c.title = synth_title(rng, 4 + rng.below(5));
    c.authors = synth_authors(rng);
    c.year = synth_year(rng);
    return c;
}

}  // namespace

Corpus make_clean_corpus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Corpus corpus(CorpusRole::reference);

    // A shared pool lets distinct papers cite the same work.
    std::vector<CitationRecord> shared(120);
    for (auto& c : shared) c = synth_citation(rng);

    std::set<std::string> used_titles;
    for (std::size_t i = 0; i < n; ++i) {
        PaperRecord r;
        char id[32];
        std::snprintf(id, sizeof(id), "r%05zu", i + 1);
        r.id = id;
        std::string title;
        do {
            title = synth_title(rng, 5 + rng.below(5));
        } while (!used_titles.insert(title).second);
        r.title = title;
        r.authors = synth_authors(rng);
        r.year = synth_year(rng);
        r.venue = venue_names()[rng.below(venue_names().size())];
        r.abstract = synth_abstract(rng);
        std::size_t n_citations = 8 + rng.below(11);
        for (std::size_t c = 0; c < n_citations; ++c) {
            if (rng.chance(0.2)) {
                r.citations.push_back(shared[rng.below(shared.size())]);
                r.citations.back().raw_id.clear();
                r.citations.back().cited_by.clear();
            } else {
                r.citations.push_back(synth_citation(rng));
            }
        }
        corpus.add(std::move(r));
    }
    return corpus;
}

// ---- noise ----

namespace {

std::string scramble_codepoints(const std::string& text, Rng& rng) {
    auto cps = detail::utf8_codepoints(text);
    for (std::size_t j = cps.size(); j > 1; --j) {
        std::swap(cps[j - 1], cps[rng.below(j)]);
    }
    std::string out;
    for (char32_t cp : cps) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::string garbage_title(const std::string& source, Rng& rng) {
    switch (rng.below(3)) {
        case 0:
            return scramble_codepoints(source, rng);
        case 1: {
            // Greek-letter noise over the source text.
            std::string out;
            for (char c : source) {
                if (rng.chance(0.6) && c != ' ') {
                    char32_t cp = 0x3B1 + static_cast<char32_t>(rng.below(24));
                    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
                } else {
                    out.push_back(c);
                }
            }
            return out;
        }
        default: {
            const auto& ctl = controlled_tokens();
            std::string out = capitalize(ctl[rng.below(ctl.size())]);
            std::size_t extra = 1 + rng.below(4);
            for (std::size_t i = 0; i < extra; ++i) {
                out.push_back(' ');
                if (rng.chance(0.5)) out += std::to_string(rng.below(500));
                else out += ctl[rng.below(ctl.size())];
            }
            return out;
        }
    }
}

std::string corrupt_chars(const std::string& text, double rate, Rng& rng) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (!rng.chance(rate)) {
            out.push_back(c);
            continue;
        }
        switch (rng.below(3)) {
            case 0: out.push_back(static_cast<char>('a' + rng.below(26))); break;  // substitute
            case 1: break;                                                         // delete
            default:
                out.push_back(c);
                out.push_back(static_cast<char>('a' + rng.below(26)));  // insert
        }
    }
    return out;
}

std::string truncate_title(const std::string& text, Rng& rng) {
    auto cps = detail::utf8_codepoints(text);
    std::size_t keep = std::max<std::size_t>(
        5, static_cast<std::size_t>(static_cast<double>(cps.size()) * (0.3 + 0.3 * rng.real())));
    if (keep >= cps.size()) return text;
    std::string out;
    for (std::size_t i = 0; i < keep; ++i) {
        // clean corpus titles are ASCII
        out.push_back(static_cast<char>(cps[i]));
    }
    return out;
}

std::string initialize_first_name(const std::string& name) {
    auto tokens = tokenize(name);
    if (tokens.size() < 2) return name;
    std::string out;
    out.push_back(tokens[0][0]);
    out.push_back('.');
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

}  // namespace

Benchmark generate_benchmark(const Corpus& clean, const NoiseSpec& spec, double match_frac,
                             std::size_t n_unmatched) {
    if (match_frac < 0.0 || match_frac > 1.0) throw Error("match_frac must be in [0, 1]");
    std::size_t n_clean = clean.size();
    std::size_t n_matched = static_cast<std::size_t>(std::llround(match_frac * static_cast<double>(n_clean)));
    if (n_matched > n_clean) throw Error("clean corpus too small for requested sample");
    if (n_clean == 0) throw Error("clean corpus is empty");

    Benchmark bench;
    for (const auto& r : clean.records()) bench.reference.add(r);

    // Sample which clean records become noisy targets.
    Rng sample_rng = Rng::fork(spec.seed, 0);
    std::vector<std::size_t> order(n_clean);
    for (std::size_t i = 0; i < n_clean; ++i) order[i] = i;
    for (std::size_t i = n_clean; i > 1; --i) {
        std::swap(order[i - 1], order[sample_rng.below(i)]);
    }

    for (std::size_t i = 0; i < n_matched; ++i) {
        const PaperRecord& src = clean.records()[order[i]];
        Rng rng = Rng::fork(spec.seed, 1000 + i);

        PaperRecord t;
        char id[32];
        std::snprintf(id, sizeof(id), "t%05zu", i + 1);
        t.id = id;

        if (src.title) {
            if (rng.chance(spec.title_garbage_prob)) {
                if (rng.chance(0.25)) {
                    t.title = std::nullopt;  // extraction produced nothing
                } else {
                    t.title = garbage_title(*src.title, rng);
                }
            } else if (rng.chance(spec.title_truncate_prob)) {
                t.title = truncate_title(*src.title, rng);
            } else {
                t.title = corrupt_chars(*src.title, spec.title_char_error_rate, rng);
            }
            if (t.title && t.title->empty()) t.title = std::nullopt;
        }

        if (src.abstract && !rng.chance(spec.drop_abstract_prob)) t.abstract = src.abstract;
        if (src.year && !rng.chance(spec.drop_year_prob)) t.year = src.year;
        t.venue = src.venue;

        if (!rng.chance(spec.drop_author_prob)) {
            for (const auto& a : src.authors) {
                t.authors.push_back(rng.chance(spec.author_initialize_prob)
                                        ? initialize_first_name(a)
                                        : a);
            }
        }

        // Keep a subset of the citations, order preserved.
        std::size_t n_src = src.citations.size();
        std::size_t keep = static_cast<std::size_t>(
            std::llround(spec.citation_subset_frac * static_cast<double>(n_src)));
        std::vector<std::size_t> cite_order(n_src);
        for (std::size_t c = 0; c < n_src; ++c) cite_order[c] = c;
        for (std::size_t c = n_src; c > 1; --c) {
            std::swap(cite_order[c - 1], cite_order[rng.below(c)]);
        }
        cite_order.resize(keep);
        std::sort(cite_order.begin(), cite_order.end());
        for (std::size_t k = 0; k < cite_order.size(); ++k) {
            const CitationRecord& sc = src.citations[cite_order[k]];
            CitationRecord tc;
            tc.title = sc.title;
            tc.year = sc.year && !rng.chance(spec.drop_year_prob) ? sc.year : std::nullopt;
            for (const auto& a : sc.authors) {
                tc.authors.push_back(rng.chance(spec.author_initialize_prob)
                                         ? initialize_first_name(a)
                                         : a);
            }
            t.citations.push_back(std::move(tc));
            bench.citation_links.push_back(
                {t.id + "#" + std::to_string(k), sc.raw_id});
        }

        bench.truth.add_pair(t.id, src.id);
        bench.target.add(std::move(t));
    }

    // Fresh records with no counterpart; they may share famous citations
    // with reference papers but never a title.
    std::set<std::string> reference_titles;
    for (const auto& r : clean.records()) {
        if (r.title) reference_titles.insert(*r.title);
    }
    Rng urng = Rng::fork(spec.seed, 2);
    for (std::size_t i = 0; i < n_unmatched; ++i) {
        PaperRecord u;
        char id[32];
        std::snprintf(id, sizeof(id), "u%05zu", i + 1);
        u.id = id;
        std::string title;
        do {
            title = synth_title(urng, 5 + urng.below(5));
        } while (reference_titles.count(title));
        u.title = title;
        u.authors = synth_authors(urng);
        u.year = synth_year(urng);
        u.venue = venue_names()[urng.below(venue_names().size())];
        u.abstract = synth_abstract(urng);
        std::size_t n_citations = 6 + urng.below(8);
        for (std::size_t c = 0; c < n_citations; ++c) {
            if (urng.chance(0.2) && n_clean > 0) {
                const PaperRecord& donor = clean.records()[urng.below(n_clean)];
                if (!donor.citations.empty()) {
                    CitationRecord copy = donor.citations[urng.below(donor.citations.size())];
                    copy.raw_id.clear();
                    copy.cited_by.clear();
                    u.citations.push_back(std::move(copy));
                    continue;
                }
            }
            u.citations.push_back(synth_citation(urng));
        }
        bench.truth.add_unmatched(u.id);
        bench.target.add(std::move(u));
    }
    return bench;
}

Dataset make_training_pairs(const Corpus& target, const Corpus& reference,
                            const BlockingIndex& paper_index, const GroundTruth& truth,
                            std::size_t k, bool use_abstract) {
    Dataset data;
    data.schema_version = FeatureVector::kSchemaVersion;
    for (const char* name : FeatureVector::names()) data.feature_names.push_back(name);

    std::map<std::string, std::string> true_match;
    for (const auto& [t, r] : truth.pairs) true_match.emplace(t, r);

    for (const auto& t : target.records()) {
        std::set<std::string> seen;
        auto query = build_query(t.title,
                                 t.authors.empty() ? std::nullopt
                                                   : normalize_author(t.authors.front()).last,
                                 t.year);
        auto it = true_match.find(t.id);
        if (query) {
            for (const auto& [rid, score] : paper_index.query_top_k(*query, k)) {
                if (!seen.insert(rid).second) continue;
                int label = it != true_match.end() && it->second == rid ? 1 : 0;
                auto fv = header_features(t, reference.get(rid), use_abstract).as_array();
                data.pairs.push_back({{fv.begin(), fv.end()}, label});
            }
        }
        // The true pair is always a positive example, retrieved or not.
        if (it != true_match.end() && !seen.count(it->second) && reference.contains(it->second)) {
            auto fv = header_features(t, reference.get(it->second), use_abstract).as_array();
            data.pairs.push_back({{fv.begin(), fv.end()}, 1});
        }
    }
    return data;
}

Dataset make_citation_training_pairs(const Corpus& target, const Corpus& reference,
                                     const BlockingIndex& citation_index,
                                     const std::vector<CitationLink>& links, std::size_t k,
                                     std::size_t max_pairs) {
    Dataset data;
    data.schema_version = FeatureVector::kSchemaVersion;
    for (const char* name : FeatureVector::names()) data.feature_names.push_back(name);

    std::map<std::string, std::string> linked;
    for (const auto& link : links) linked.emplace(link.target_citation, link.reference_citation);

    std::unordered_map<std::string, const CitationRecord*> ref_citations;
    for (const auto& r : reference.records()) {
        for (const auto& c : r.citations) ref_citations.emplace(c.raw_id, &c);
    }

    // Widely cited works appear as verbatim copies under many reference
    // papers; a candidate that matches the linked citation's content refers
    // to the same work and is a positive regardless of which paper cites it.
    auto same_work = [](const CitationRecord& a, const CitationRecord& b) {
        return a.title == b.title && a.authors == b.authors && a.year == b.year;
    };

    for (const auto& t : target.records()) {
        for (const auto& tc : t.citations) {
            if (max_pairs > 0 && data.pairs.size() >= max_pairs) return data;
            auto query = build_query(tc.title,
                                     tc.authors.empty()
                                         ? std::nullopt
                                         : normalize_author(tc.authors.front()).last,
                                     tc.year);
            if (!query) continue;
            auto it = linked.find(tc.raw_id);
            const CitationRecord* source =
                it != linked.end() && ref_citations.count(it->second)
                    ? ref_citations.at(it->second)
                    : nullptr;
            PaperRecord tc_record = citation_as_record(tc);
            std::set<std::string> seen;
            bool positive_seen = false;
            for (const auto& [rc_id, score] : citation_index.query_top_k(*query, k)) {
                auto rc = ref_citations.find(rc_id);
                if (rc == ref_citations.end() || !seen.insert(rc_id).second) continue;
                int label = source && same_work(*rc->second, *source) ? 1 : 0;
                positive_seen = positive_seen || label == 1;
                auto fv = header_features(tc_record, citation_as_record(*rc->second), false)
                              .as_array();
                data.pairs.push_back({{fv.begin(), fv.end()}, label});
            }
            if (source && !positive_seen) {
                auto fv = header_features(tc_record, citation_as_record(*source), false)
                              .as_array();
                data.pairs.push_back({{fv.begin(), fv.end()}, 1});
            }
        }
    }
    return data;
}

std::vector<SweepCell> sweep_cmm(const Corpus& target, const MatcherContext& base,
                                 const std::vector<double>& theta_refs,
                                 const std::vector<double>& theta_titles,
                                 const GroundTruth& truth, int workers) {
    std::vector<SweepCell> cells;
    for (double tr : theta_refs) {
        for (double tt : theta_titles) {
            cells.push_back({tr, tt, {}});
        }
    }
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        MatcherContext ctx = base;
        ctx.config.theta_ref = cells[i].theta_ref;
        ctx.config.theta_title = cells[i].theta_title;
        auto [matches, stats] = batch_match(target, ctx, MatchMode::cmm, 1);
        cells[i].report = evaluate(matches, truth);
    });
    return cells;
}

std::pair<std::vector<double>, std::vector<double>> default_sweep_grid() {
    return {{0.4, 0.5, 0.6, 0.7}, {0.15, 0.25, 0.35, 0.45}};
}

}  // namespace linkforge
