#include "iccwatch/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iccwatch {

namespace fs = std::filesystem;

std::vector<CorpusEntry> corpus_entries() {
    std::vector<CorpusEntry> out;
    const char* override_dir = std::getenv("ICCWATCH_CORPUS_DIR");
    if (override_dir != nullptr && *override_dir != '\0') {
        for (const auto& entry : fs::directory_iterator(override_dir)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".scn") continue;
            std::ifstream in(entry.path(), std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            out.push_back({entry.path().stem().string(), buf.str()});
        }
    } else {
        for (const auto& [name, text] : detail::embedded_corpus()) {
            out.push_back({std::string(name), std::string(text)});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

std::vector<std::string> corpus_names() {
    std::vector<std::string> names;
    for (auto& e : corpus_entries()) names.push_back(std::move(e.name));
    return names;
}

std::string corpus_text(std::string_view name) {
    for (auto& e : corpus_entries()) {
        if (e.name == name) return std::move(e.text);
    }
    throw std::out_of_range("no corpus scenario named '" + std::string(name) + "'");
}

std::vector<Scenario> builtin_corpus() {
    std::vector<Scenario> out;
    for (const auto& e : corpus_entries()) {
        try {
            out.push_back(parse_scenario(e.text));
        } catch (const ScenarioError& err) {
            throw std::runtime_error(e.name + ": " + err.what());
        }
    }
    return out;
}

Scenario corpus_scenario(std::string_view name) { return parse_scenario(corpus_text(name)); }

}  // namespace iccwatch
