#pragma once

// Document-keyword corpus: ingest, cleaning, inverted index and citation
// accounting.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace senses {

using ConceptId = std::uint32_t;
using DocIndex = std::uint32_t;

/// Inclusive calendar-year interval.
struct YearRange {
    int from = 0;
    int to = 0;

    bool contains(int year) const { return year >= from && year <= to; }
    friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct Document {
    std::string id;
    int year = 0;
    std::vector<ConceptId> keywords;  // distinct, first-occurrence order
    std::vector<DocIndex> cited;      // resolved references, sorted, distinct

    bool mentions(ConceptId c) const {
        return std::find(keywords.begin(), keywords.end(), c) != keywords.end();
    }
};

/// One input record before cleaning.
struct RawRecord {
    std::string id;
    int year = 0;
    std::vector<std::string> keywords;
    std::vector<std::string> refs;
    std::size_t line = 0;
};

inline const std::set<std::string>& defaultBlacklist() {
    static const std::set<std::string> terms{"book", "thesis", "report", "lectures", "talk",
                                             "proceedings"};
    return terms;
}

struct CleaningConfig {
    std::set<std::string> blacklist = defaultBlacklist();
    std::optional<int> yearFrom;
    std::optional<int> yearTo;
    std::size_t maxLabelLength = 120;

    bool inWindow(int year) const {
        return (!yearFrom || year >= *yearFrom) && (!yearTo || year <= *yearTo);
    }

    /// Blacklist file: one term per line, '#' starts a comment. Terms are
    /// normalized like keywords.
    static std::set<std::string> loadBlacklist(std::istream& in) {
        std::set<std::string> terms;
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            auto term = text::normalizeLabel(line);
            if (!term.empty()) terms.insert(std::move(term));
        }
        return terms;
    }
};

struct IngestReport {
    std::size_t recordsRead = 0;
    std::size_t documentsKept = 0;
    std::size_t documentsDropped = 0;  // fewer than two distinct concepts left
    std::size_t keywordsBlacklisted = 0;
    std::size_t keywordsInvalid = 0;
    std::size_t keywordsDuplicate = 0;
    std::size_t yearsSkipped = 0;
    std::size_t refsUnresolved = 0;
    std::size_t concepts = 0;

    nlohmann::json toJson() const {
        return {
            {"records_read", recordsRead},
            {"documents_kept", documentsKept},
            {"documents_dropped", documentsDropped},
            {"keywords_dropped_blacklist", keywordsBlacklisted},
            {"keywords_dropped_invalid", keywordsInvalid},
            {"keywords_duplicate", keywordsDuplicate},
            {"records_skipped_year", yearsSkipped},
            {"refs_unresolved", refsUnresolved},
            {"concepts", concepts},
        };
    }
};

enum class InputFormat { jsonl, csv };

namespace detail {

inline std::string lineContext(std::size_t line) { return "line " + std::to_string(line) + ": "; }

inline RawRecord recordFromJson(const nlohmann::json& j, std::size_t line) {
    if (!j.is_object()) throw DataError(lineContext(line) + "record is not a JSON object");
    RawRecord r;
    r.line = line;
    const auto id = j.find("id");
    if (id == j.end() || !id->is_string()) throw DataError(lineContext(line) + "missing string field 'id'");
    r.id = id->get<std::string>();
    const auto year = j.find("year");
    if (year == j.end() || !year->is_number_integer())
        throw DataError(lineContext(line) + "missing integer field 'year'");
    r.year = year->get<int>();
    const auto kw = j.find("keywords");
    if (kw == j.end() || !kw->is_array()) throw DataError(lineContext(line) + "missing array field 'keywords'");
    for (const auto& k : *kw) {
        if (!k.is_string()) throw DataError(lineContext(line) + "non-string keyword");
        r.keywords.push_back(k.get<std::string>());
    }
    if (const auto refs = j.find("refs"); refs != j.end() && !refs->is_null()) {
        if (!refs->is_array()) throw DataError(lineContext(line) + "'refs' must be an array");
        for (const auto& ref : *refs) {
            if (!ref.is_string()) throw DataError(lineContext(line) + "non-string ref");
            r.refs.push_back(ref.get<std::string>());
        }
    }
    return r;
}

inline std::vector<std::string> splitList(std::string_view field) {
    std::vector<std::string> out;
    if (text::trim(field).empty()) return out;
    for (auto& part : text::split(field, ';')) {
        if (!text::trim(part).empty()) out.push_back(std::move(part));
    }
    return out;
}

} // namespace detail

inline std::vector<RawRecord> parseJsonl(std::istream& in) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(detail::lineContext(lineNo) + "malformed JSON: " + e.what());
        }
        records.push_back(detail::recordFromJson(j, lineNo));
    }
    return records;
}

/// CSV with a header row naming at least id, year, keywords; refs optional.
/// List-valued columns are ';'-joined.
inline std::vector<RawRecord> parseCsv(std::istream& in) {
    std::vector<RawRecord> records;
    std::string line;
    std::size_t lineNo = 0;
    std::optional<std::vector<std::string>> header;
    std::ptrdiff_t colId = -1, colYear = -1, colKw = -1, colRefs = -1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (text::trim(line).empty()) continue;
        auto fields = text::parseCsvLine(line);
        if (!fields) throw DataError(detail::lineContext(lineNo) + "unterminated quoted field");
        if (!header) {
            header = std::move(*fields);
            for (std::size_t i = 0; i < header->size(); ++i) {
                const auto name = text::normalizeLabel((*header)[i]);
                const auto idx = static_cast<std::ptrdiff_t>(i);
                if (name == "id") colId = idx;
                else if (name == "year") colYear = idx;
                else if (name == "keywords") colKw = idx;
                else if (name == "refs") colRefs = idx;
            }
            if (colId < 0 || colYear < 0 || colKw < 0)
                throw DataError(detail::lineContext(lineNo) + "CSV header must name id, year, keywords");
            continue;
        }
        if (fields->size() != header->size())
            throw DataError(detail::lineContext(lineNo) + "expected " + std::to_string(header->size()) +
                            " fields, got " + std::to_string(fields->size()));
        RawRecord r;
        r.line = lineNo;
        r.id = std::string(text::trim((*fields)[colId]));
        if (r.id.empty()) throw DataError(detail::lineContext(lineNo) + "empty id");
        const auto year = text::parseInt<int>((*fields)[colYear]);
        if (!year) throw DataError(detail::lineContext(lineNo) + "year is not an integer");
        r.year = *year;
        r.keywords = detail::splitList((*fields)[colKw]);
        if (colRefs >= 0) {
            for (auto& ref : detail::splitList((*fields)[colRefs]))
                r.refs.emplace_back(text::trim(ref));
        }
        records.push_back(std::move(r));
    }
    return records;
}

/// Immutable inverted index over the cleaned corpus. Concept ids are dense
/// and assigned in first-occurrence order over kept documents.
class CorpusIndex {
public:
    CorpusIndex() = default;

    static CorpusIndex build(const std::vector<RawRecord>& records, const CleaningConfig& config = {}) {
        CorpusIndex idx;
        IngestReport& rep = idx.report_;
        rep.recordsRead = records.size();

        std::unordered_set<std::string> seenIds;
        for (const auto& r : records) {
            if (!seenIds.insert(r.id).second)
                throw DataError(detail::lineContext(r.line) + "duplicate document id '" + r.id + "'");
        }

        std::vector<const RawRecord*> kept;
        std::vector<std::vector<std::string>> keptLabels;
        for (const auto& r : records) {
            if (!config.inWindow(r.year)) {
                ++rep.yearsSkipped;
                continue;
            }
            std::vector<std::string> labels;
            for (const auto& raw : r.keywords) {
                if (text::hasControlChars(raw)) {
                    ++rep.keywordsInvalid;
                    continue;
                }
                auto label = text::normalizeLabel(raw);
                if (label.empty() || label.size() > config.maxLabelLength) {
                    ++rep.keywordsInvalid;
                    continue;
                }
                if (config.blacklist.contains(label)) {
                    ++rep.keywordsBlacklisted;
                    continue;
                }
                if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
                    ++rep.keywordsDuplicate;
                    continue;
                }
                labels.push_back(std::move(label));
            }
            if (labels.size() < 2) {
                ++rep.documentsDropped;
                continue;
            }
            kept.push_back(&r);
            keptLabels.push_back(std::move(labels));
        }

        std::unordered_map<std::string, DocIndex> docById;
        idx.documents_.reserve(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            Document d;
            d.id = kept[i]->id;
            d.year = kept[i]->year;
            for (auto& label : keptLabels[i]) d.keywords.push_back(idx.intern(std::move(label)));
            docById.emplace(d.id, static_cast<DocIndex>(i));
            idx.documents_.push_back(std::move(d));
        }
        for (std::size_t i = 0; i < kept.size(); ++i) {
            auto& cited = idx.documents_[i].cited;
            for (const auto& ref : kept[i]->refs) {
                const auto it = docById.find(ref);
                if (it == docById.end()) {
                    ++rep.refsUnresolved;
                    continue;
                }
                cited.push_back(it->second);
            }
            std::sort(cited.begin(), cited.end());
            cited.erase(std::unique(cited.begin(), cited.end()), cited.end());
        }
        idx.finalize();
        return idx;
    }

    static CorpusIndex ingest(std::istream& in, InputFormat format, const CleaningConfig& config = {}) {
        auto records = format == InputFormat::jsonl ? parseJsonl(in) : parseCsv(in);
        if (records.empty()) throw DataError("no records");
        return build(records, config);
    }

    /// Format chosen by extension (.csv / .jsonl / .json), otherwise sniffed
    /// from the first non-blank character.
    static CorpusIndex ingestFile(const std::string& path, const CleaningConfig& config = {}) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open input '" + path + "'");
        return ingest(in, detectFormat(path, in), config);
    }

    static InputFormat detectFormat(const std::string& path, std::istream& in) {
        auto endsWith = [&](std::string_view suffix) {
            return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
        };
        if (endsWith(".csv")) return InputFormat::csv;
        if (endsWith(".jsonl") || endsWith(".json")) return InputFormat::jsonl;
        char c = 0;
        while (in.get(c) && text::isSpace(c)) {}
        in.clear();
        in.seekg(0);
        return c == '{' ? InputFormat::jsonl : InputFormat::csv;
    }

    std::span<const Document> documents() const { return documents_; }
    const Document& document(DocIndex d) const { return documents_.at(d); }
    std::size_t documentCount() const { return documents_.size(); }
    std::size_t conceptCount() const { return labels_.size(); }

    const std::string& label(ConceptId c) const { return labels_.at(c); }

    std::optional<ConceptId> find(std::string_view label) const {
        const auto it = lookup_.find(text::normalizeLabel(label));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Sorted, duplicate-free list of documents mentioning c (the orbit).
    std::span<const DocIndex> orbit(ConceptId c) const { return byConcept_.at(c); }

    /// Orbit restricted to documents whose year lies in `range`.
    std::vector<DocIndex> orbit(ConceptId c, const std::optional<YearRange>& range) const {
        const auto full = orbit(c);
        if (!range) return {full.begin(), full.end()};
        std::vector<DocIndex> out;
        for (DocIndex d : full) {
            if (range->contains(documents_[d].year)) out.push_back(d);
        }
        return out;
    }

    /// Years that have at least one document, ascending.
    std::vector<int> years() const {
        std::vector<int> out;
        out.reserve(byYear_.size());
        for (const auto& [y, _] : byYear_) out.push_back(y);
        return out;
    }

    std::span<const DocIndex> yearlySlice(int year) const {
        const auto it = byYear_.find(year);
        if (it == byYear_.end()) return {};
        return it->second;
    }

    /// Number of documents whose year lies in range (all when nullopt).
    std::size_t documentCount(const std::optional<YearRange>& range) const {
        if (!range) return documents_.size();
        std::size_t n = 0;
        for (auto it = byYear_.lower_bound(range->from); it != byYear_.end() && it->first <= range->to; ++it)
            n += it->second.size();
        return n;
    }

    std::optional<YearRange> span() const {
        if (byYear_.empty()) return std::nullopt;
        return YearRange{byYear_.begin()->first, byYear_.rbegin()->first};
    }

    /// First year in which concept c occurs.
    int firstYear(ConceptId c) const {
        const auto o = orbit(c);
        if (o.empty()) throw DataError("sense without occurrences: " + label(c));
        int y = documents_[o.front()].year;
        for (DocIndex d : o) y = std::min(y, documents_[d].year);
        return y;
    }

    const IngestReport& report() const { return report_; }

    /// Canonical JSONL of the cleaned corpus (normalized labels, resolved refs).
    /// Re-ingesting it reproduces this index exactly.
    void writeJsonl(std::ostream& out) const {
        for (const auto& d : documents_) {
            nlohmann::json j;
            j["id"] = d.id;
            j["year"] = d.year;
            auto& kw = j["keywords"] = nlohmann::json::array();
            for (ConceptId c : d.keywords) kw.push_back(labels_[c]);
            auto& refs = j["refs"] = nlohmann::json::array();
            for (DocIndex r : d.cited) refs.push_back(documents_[r].id);
            out << j.dump() << '\n';
        }
    }

    std::string canonicalText() const {
        std::ostringstream os;
        writeJsonl(os);
        return os.str();
    }

private:
    ConceptId intern(std::string label) {
        const auto [it, inserted] = lookup_.try_emplace(label, static_cast<ConceptId>(labels_.size()));
        if (inserted) labels_.push_back(std::move(label));
        return it->second;
    }

    void finalize() {
        byConcept_.assign(labels_.size(), {});
        for (std::size_t i = 0; i < documents_.size(); ++i) {
            const auto d = static_cast<DocIndex>(i);
            for (ConceptId c : documents_[i].keywords) byConcept_[c].push_back(d);
            byYear_[documents_[i].year].push_back(d);
        }
        report_.documentsKept = documents_.size();
        report_.concepts = labels_.size();
    }

    std::vector<Document> documents_;
    std::vector<std::vector<DocIndex>> byConcept_;
    std::map<int, std::vector<DocIndex>> byYear_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, ConceptId> lookup_;
    IngestReport report_;
};

/// Free-function view of one year's documents; empty when the year has none.
inline std::span<const DocIndex> yearlySlice(const CorpusIndex& index, int year) {
    return index.yearlySlice(year);
}

struct CitationRates {
    std::vector<double> rate;   // indexed by concept id
    std::size_t events = 0;     // in-window citation events counted
    std::size_t outOfWindow = 0;
};

/// Fractional citation accounting: a citation from z to y counts when
/// 0 <= year(z) - year(y) <= windowYears and adds 1/k(y) to each of the k(y)
/// concepts of y.
inline CitationRates citationRates(const CorpusIndex& index, int windowYears = 3) {
    if (windowYears < 0) throw UsageError("citation window must be non-negative");
    CitationRates out;
    out.rate.assign(index.conceptCount(), 0.0);
    const auto docs = index.documents();
    for (const auto& z : docs) {
        for (DocIndex yi : z.cited) {
            const auto& y = docs[yi];
            const int lag = z.year - y.year;
            if (lag < 0 || lag > windowYears) {
                ++out.outOfWindow;
                continue;
            }
            ++out.events;
            const double share = 1.0 / static_cast<double>(y.keywords.size());
            for (ConceptId c : y.keywords) out.rate[c] += share;
        }
    }
    return out;
}

inline std::vector<double> citationRate(const CorpusIndex& index, int windowYears = 3) {
    return citationRates(index, windowYears).rate;
}

} // namespace senses
