#pragma once

#include "iccwatch/scenario.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace iccwatch {

/// One corpus document before parsing.
struct CorpusEntry {
    std::string name;
    std::string text;
};

/// Corpus documents sorted by name. When ICCWATCH_CORPUS_DIR is set, the
/// *.scn files of that directory replace the embedded copies.
std::vector<CorpusEntry> corpus_entries();

std::vector<std::string> corpus_names();

/// Throws std::out_of_range for an unknown name.
std::string corpus_text(std::string_view name);

/// Every corpus scenario, parsed against the default catalog.
std::vector<Scenario> builtin_corpus();

Scenario corpus_scenario(std::string_view name);

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_corpus();
}

}  // namespace iccwatch
