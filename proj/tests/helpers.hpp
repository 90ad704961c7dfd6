#pragma once

// Small builders shared by the test suites.

#include <optional>
#include <string>
#include <vector>

#include "linkforge/corpus.hpp"

namespace linkforge::testutil {

inline PaperRecord record(std::string id, std::optional<std::string> title,
                          std::vector<std::string> authors = {},
                          std::optional<int> year = std::nullopt,
                          std::optional<std::string> abstract = std::nullopt) {
    PaperRecord r;
    r.id = std::move(id);
    r.title = std::move(title);
    r.authors = std::move(authors);
    r.year = year;
    r.abstract = std::move(abstract);
    return r;
}

inline CitationRecord citation(std::optional<std::string> title,
                               std::vector<std::string> authors = {},
                               std::optional<int> year = std::nullopt) {
    CitationRecord c;
    c.title = std::move(title);
    c.authors = std::move(authors);
    c.year = year;
    return c;
}

}  // namespace linkforge::testutil
