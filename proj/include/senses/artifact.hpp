#pragma once

// Versioned CSV artifacts. Every file starts with a provenance line
//   # senses-<kind> v<version> manifest=<hash>
// followed by a header row and data rows.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace senses::artifact {

inline constexpr int kSchemaVersion = 1;

struct CsvTable {
    std::string kind;
    int version = 0;
    std::string manifestHash;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t columnIndex(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw DataError("missing column '" + std::string(name) + "' in " + kind + " table");
    }
};

inline std::string provenanceLine(std::string_view kind, std::string_view manifestHash) {
    return "# senses-" + std::string(kind) + " v" + std::to_string(kSchemaVersion) + " manifest=" +
           std::string(manifestHash);
}

inline void writeCsv(std::ostream& out, const CsvTable& t) {
    out << provenanceLine(t.kind, t.manifestHash) << '\n';
    auto row = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << text::csvEscape(fields[i]);
        out << '\n';
    };
    row(t.header);
    for (const auto& r : t.rows) row(r);
}

inline void writeCsvFile(const std::filesystem::path& path, const CsvTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    writeCsv(out, t);
}

inline CsvTable readCsv(std::istream& in, std::string_view expectedKind, const std::string& name = "csv") {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# senses-", 0) != 0)
        throw DataError(name + ": missing provenance line");
    std::istringstream prov(line.substr(9));
    std::string ver, man;
    prov >> t.kind >> ver >> man;
    if (t.kind != expectedKind) throw DataError(name + ": expected a " + std::string(expectedKind) + " table, found " + t.kind);
    if (ver.size() < 2 || ver[0] != 'v') throw DataError(name + ": bad schema version");
    t.version = text::parseInt<int>(ver.substr(1)).value_or(-1);
    if (t.version != kSchemaVersion)
        throw DataError(name + ": unsupported schema version " + ver);
    if (man.rfind("manifest=", 0) != 0) throw DataError(name + ": missing manifest hash");
    t.manifestHash = man.substr(9);

    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        auto fields = text::parseCsvLine(line);
        if (!fields) throw DataError(name + ":" + std::to_string(lineNo) + ": unterminated quote");
        if (t.header.empty()) {
            t.header = std::move(*fields);
            continue;
        }
        if (fields->size() != t.header.size())
            throw DataError(name + ":" + std::to_string(lineNo) + ": wrong field count");
        t.rows.push_back(std::move(*fields));
    }
    if (t.header.empty()) throw DataError(name + ": missing header row");
    return t;
}

inline CsvTable readCsvFile(const std::filesystem::path& path, std::string_view expectedKind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return readCsv(in, expectedKind, path.string());
}

inline void writeTextFile(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

} // namespace senses::artifact
