#include "linkforge/corpus.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "linkforge/error.hpp"

namespace linkforge {

using nlohmann::json;

void Corpus::add(PaperRecord record) {
    if (record.id.empty()) throw Error("record id must be non-empty");
    if (index_.count(record.id)) throw Error("duplicate id \"" + record.id + "\"");
    if (record.year && (*record.year < kMinYear || *record.year > kMaxYear)) {
        throw Error("record \"" + record.id + "\": year " + std::to_string(*record.year) +
                    " outside [1000, 3000]");
    }
    std::size_t ordinal = 0;
    for (auto& cite : record.citations) {
        if (cite.raw_id.empty()) cite.raw_id = record.id + "#" + std::to_string(ordinal);
        if (cite.cited_by.empty()) cite.cited_by = record.id;
        if (cite.cited_by != record.id) {
            throw Error("citation \"" + cite.raw_id + "\" cites foreign paper \"" + cite.cited_by +
                        "\"");
        }
        if (cite.year && (*cite.year < kMinYear || *cite.year > kMaxYear)) {
            throw Error("citation \"" + cite.raw_id + "\": year out of range");
        }
        ++ordinal;
    }
    index_.emplace(record.id, records_.size());
    records_.push_back(std::move(record));
}

const PaperRecord& Corpus::get(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("unknown record id \"" + id + "\"");
    return records_[it->second];
}

namespace {

json optional_str(const std::optional<std::string>& v) {
    return v ? json(*v) : json(nullptr);
}

json record_to_json(const PaperRecord& r) {
    json j;
    j["id"] = r.id;
    j["title"] = optional_str(r.title);
    j["authors"] = r.authors;
    j["year"] = r.year ? json(*r.year) : json(nullptr);
    j["venue"] = optional_str(r.venue);
    j["abstract"] = optional_str(r.abstract);
    json cites = json::array();
    for (const auto& c : r.citations) {
        json cj;
        cj["title"] = optional_str(c.title);
        cj["authors"] = c.authors;
        cj["year"] = c.year ? json(*c.year) : json(nullptr);
        cites.push_back(std::move(cj));
    }
    j["citations"] = std::move(cites);
    return j;
}

std::optional<std::string> read_opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw Error(std::string("field \"") + key + "\" must be a string");
    std::string s = j[key].get<std::string>();
    if (s.empty()) return std::nullopt;  // empty strings are treated as absent
    return s;
}

std::optional<int> read_opt_year(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number_integer()) throw Error(std::string("field \"") + key + "\" must be an integer");
    int y = j[key].get<int>();
    if (y < kMinYear || y > kMaxYear) throw Error("year out of range");
    return y;
}

std::vector<std::string> read_authors(const json& j) {
    std::vector<std::string> out;
    if (!j.contains("authors") || j["authors"].is_null()) return out;
    if (!j["authors"].is_array()) throw Error("field \"authors\" must be an array");
    for (const auto& a : j["authors"]) {
        if (!a.is_string()) throw Error("author entries must be strings");
        out.push_back(a.get<std::string>());
    }
    return out;
}

PaperRecord record_from_json(const json& j) {
    if (!j.is_object()) throw Error("record must be a JSON object");
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
        throw Error("record is missing a non-empty \"id\"");
    }
    PaperRecord r;
    r.id = j["id"].get<std::string>();
    r.title = read_opt_string(j, "title");
    r.authors = read_authors(j);
    r.year = read_opt_year(j, "year");
    r.venue = read_opt_string(j, "venue");
    r.abstract = read_opt_string(j, "abstract");
    if (j.contains("citations") && !j["citations"].is_null()) {
        if (!j["citations"].is_array()) throw Error("field \"citations\" must be an array");
        for (const auto& cj : j["citations"]) {
            if (!cj.is_object()) throw Error("citation entries must be objects");
            CitationRecord c;
            c.title = read_opt_string(cj, "title");
            c.authors = read_authors(cj);
            c.year = read_opt_year(cj, "year");
            r.citations.push_back(std::move(c));
        }
    }
    return r;
}

}  // namespace

void Corpus::to_jsonl(std::ostream& os) const {
    for (const auto& r : records_) {
        os << record_to_json(r).dump() << '\n';
    }
}

std::string Corpus::to_jsonl_string() const {
    std::ostringstream out;
    to_jsonl(out);
    return out.str();
}

Corpus corpus_from_jsonl(std::istream& is, CorpusRole role, LoadReport* report) {
    Corpus corpus(role);
    LoadReport local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            corpus.add(record_from_json(json::parse(line)));
            ++local.loaded;
        } catch (const json::exception& e) {
            ++local.malformed;
            local.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            std::string msg = e.what();
            if (msg.rfind("duplicate id", 0) == 0) throw;  // corrupt corpus, not a bad line
            ++local.malformed;
            local.warnings.push_back("line " + std::to_string(line_no) + ": " + msg);
        }
    }
    if (corpus.size() == 0) throw Error("no well-formed records found");
    if (report) *report = std::move(local);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusRole role, LoadReport* report) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open \"" + path.string() + "\"");
    return corpus_from_jsonl(is, role, report);
}

const std::vector<CitationRecord>& get_citations(const Corpus& corpus,
                                                 const std::string& paper_id) {
    return corpus.get(paper_id).citations;
}

}  // namespace linkforge
