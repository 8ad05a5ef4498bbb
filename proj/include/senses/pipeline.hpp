#pragma once

// End-to-end orchestration behind the command-line tool: run configuration,
// manifests, the analysis stages and the artifacts each stage writes.
//
// Output directory layout:
//   manifest.json          run configuration + input and corpus digests
//   corpus.jsonl           cleaned corpus (canonical form)
//   ingest_report.json
//   metrics.csv            one row per sense
//   edges.csv, tmi.csv, clusters.csv
//   generations.csv, generation_plane.csv, core.json
//   fit_<column>_<family>.json
//   figures/*.csv, figures/figures.json
//   report.md

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "artifact.hpp"
#include "corpus.hpp"
#include "digest.hpp"
#include "error.hpp"
#include "evt.hpp"
#include "graph.hpp"
#include "regression.hpp"
#include "sense.hpp"
#include "temporal.hpp"
#include "text.hpp"
#include "walktrap.hpp"

namespace senses::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr std::string_view kToolVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
    std::set<std::string> blacklist = defaultBlacklist();
    std::optional<int> yearFrom;
    std::optional<int> yearTo;
    TmiMode tmiMode = TmiMode::pointwise;
    double damping = 0.85;
    int walkSteps = 4;
    WeightMode weightMode = WeightMode::positivePmi;
    std::uint64_t seed = 0;
    int citationWindow = 3;
    unsigned workers = 1;  // execution detail, not part of the snapshot

    CleaningConfig cleaning() const {
        CleaningConfig c;
        c.blacklist = blacklist;
        c.yearFrom = yearFrom;
        c.yearTo = yearTo;
        return c;
    }

    json snapshot() const {
        json j;
        j["blacklist"] = std::vector<std::string>(blacklist.begin(), blacklist.end());
        j["year_from"] = yearFrom ? json(*yearFrom) : json(nullptr);
        j["year_to"] = yearTo ? json(*yearTo) : json(nullptr);
        j["tmi_mode"] = toString(tmiMode);
        j["damping"] = damping;
        j["walk_steps"] = walkSteps;
        j["weight_mode"] = toString(weightMode);
        j["seed"] = seed;
        j["citation_window"] = citationWindow;
        return j;
    }

    static RunConfig fromSnapshot(const json& j) {
        RunConfig c;
        try {
            c.blacklist.clear();
            for (const auto& t : j.at("blacklist")) c.blacklist.insert(t.get<std::string>());
            if (!j.at("year_from").is_null()) c.yearFrom = j.at("year_from").get<int>();
            if (!j.at("year_to").is_null()) c.yearTo = j.at("year_to").get<int>();
            c.tmiMode = parseTmiMode(j.at("tmi_mode").get<std::string>());
            c.damping = j.at("damping").get<double>();
            c.walkSteps = j.at("walk_steps").get<int>();
            c.weightMode = parseWeightMode(j.at("weight_mode").get<std::string>());
            c.seed = j.at("seed").get<std::uint64_t>();
            c.citationWindow = j.at("citation_window").get<int>();
        } catch (const json::exception& e) {
            throw DataError(std::string("manifest config: ") + e.what());
        }
        return c;
    }

    /// Applies one setting; keys mirror the command-line flags.
    void set(std::string_view key, std::string_view value) {
        const std::string v(text::trim(value));
        auto integer = [&]() {
            const auto i = text::parseInt<long long>(v);
            if (!i) throw UsageError("'" + std::string(key) + "' expects an integer, got '" + v + "'");
            return *i;
        };
        if (key == "blacklist") {
            std::ifstream in(v);
            if (!in) throw UsageError("cannot open blacklist file '" + v + "'");
            blacklist = CleaningConfig::loadBlacklist(in);
        } else if (key == "blacklist-terms") {
            blacklist.clear();
            for (const auto& t : text::split(v, ',')) {
                auto term = text::normalizeLabel(t);
                if (!term.empty()) blacklist.insert(std::move(term));
            }
        } else if (key == "year-from") {
            yearFrom = static_cast<int>(integer());
        } else if (key == "year-to") {
            yearTo = static_cast<int>(integer());
        } else if (key == "tmi-mode") {
            tmiMode = parseTmiMode(v);
        } else if (key == "damping") {
            const auto d = text::parseReal(v);
            if (!d || !(*d > 0.0 && *d < 1.0)) throw UsageError("damping must lie in (0, 1)");
            damping = *d;
        } else if (key == "walk-steps") {
            walkSteps = static_cast<int>(integer());
            if (walkSteps < 1) throw UsageError("walk-steps must be >= 1");
        } else if (key == "weight-mode") {
            weightMode = parseWeightMode(v);
        } else if (key == "seed") {
            seed = static_cast<std::uint64_t>(integer());
        } else if (key == "citation-window") {
            citationWindow = static_cast<int>(integer());
            if (citationWindow < 0) throw UsageError("citation-window must be >= 0");
        } else if (key == "workers") {
            const auto w = integer();
            if (w < 1) throw UsageError("workers must be >= 1");
            workers = static_cast<unsigned>(w);
        } else {
            throw UsageError("unknown config key '" + std::string(key) + "'");
        }
    }

    /// Flat `key = value` text; '#' starts a comment.
    void load(std::istream& in, const std::string& name = "config") {
        std::string line;
        std::size_t lineNo = 0;
        while (std::getline(in, line)) {
            ++lineNo;
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            const auto t = text::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string_view::npos)
                throw UsageError(name + ":" + std::to_string(lineNo) + ": expected key = value");
            set(text::trim(t.substr(0, eq)), t.substr(eq + 1));
        }
    }

    void loadFile(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file '" + path + "'");
        load(in, path);
    }
};

// ---------------------------------------------------------------------------
// Manifest

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kCorpusFile = "corpus.jsonl";
inline constexpr const char* kIngestReportFile = "ingest_report.json";
inline constexpr const char* kMetricsFile = "metrics.csv";

struct Manifest {
    RunConfig config;
    std::string inputDigest;
    std::string corpusDigest;

    json toJson() const {
        return {{"tool", "senses"}, {"version", kToolVersion}, {"config", config.snapshot()},
                {"input_digest", inputDigest}, {"corpus_digest", corpusDigest}};
    }

    std::string hash() const { return sha256Hex(toJson().dump()); }

    static Manifest fromJson(const json& j) {
        Manifest m;
        try {
            m.config = RunConfig::fromSnapshot(j.at("config"));
            m.inputDigest = j.at("input_digest").get<std::string>();
            m.corpusDigest = j.at("corpus_digest").get<std::string>();
        } catch (const json::exception& e) {
            throw DataError(std::string("manifest: ") + e.what());
        }
        return m;
    }
};

inline std::string dumpJson(const json& j) { return j.dump(2) + "\n"; }

inline void writeManifest(const fs::path& dir, const Manifest& m) {
    json j = m.toJson();
    j["manifest_hash"] = m.hash();
    artifact::writeTextFile(dir / kManifestFile, dumpJson(j));
}

inline Manifest readManifest(const fs::path& dir) {
    const auto path = dir / kManifestFile;
    json j;
    try {
        j = json::parse(readFile(path.string()));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return Manifest::fromJson(j);
}

/// Loads the cleaned corpus of an artifact directory after checking it
/// against the digest recorded in the manifest.
inline CorpusIndex loadCorpus(const fs::path& dir, const Manifest& m) {
    const auto text = readFile((dir / kCorpusFile).string());
    if (sha256Hex(text) != m.corpusDigest)
        throw DataError("artifact integrity: " + (dir / kCorpusFile).string() + " does not match the manifest digest");
    std::istringstream in(text);
    CleaningConfig keepAll;
    keepAll.blacklist.clear();
    return CorpusIndex::ingest(in, InputFormat::jsonl, keepAll);
}

// ---------------------------------------------------------------------------
// Metric table

struct MetricRow {
    ConceptId sense = 0;
    std::string label;
    std::size_t docs = 0;
    std::size_t dim = 0;
    double h = 0.0;
    double hNorm = 0.0;
    double diseq = 0.0;
    double complexity = 0.0;
    std::optional<double> tr;
    double tmi = 0.0;
    TmiMode tmiMode = TmiMode::pointwise;
    double citations = 0.0;
    double pagerank = 0.0;
    std::uint32_t generation = 0;
    std::uint32_t cluster = 0;
};

struct MetricTable {
    std::string manifestHash;
    std::vector<MetricRow> rows;

    static const std::vector<std::string>& header() {
        static const std::vector<std::string> h{"sense", "label", "docs", "dim", "h", "h_n", "d", "c", "tr",
                                                "tmi", "tmi_mode", "citations", "pagerank", "generation",
                                                "cluster"};
        return h;
    }

    artifact::CsvTable toCsv() const {
        artifact::CsvTable t;
        t.kind = "metrics";
        t.manifestHash = manifestHash;
        t.header = header();
        for (const auto& r : rows) {
            t.rows.push_back({std::to_string(r.sense), r.label, std::to_string(r.docs), std::to_string(r.dim),
                              text::formatReal(r.h), text::formatReal(r.hNorm), text::formatReal(r.diseq),
                              text::formatReal(r.complexity), r.tr ? text::formatReal(*r.tr) : std::string(),
                              text::formatReal(r.tmi), std::string(toString(r.tmiMode)),
                              text::formatReal(r.citations), text::formatReal(r.pagerank),
                              std::to_string(r.generation), std::to_string(r.cluster)});
        }
        return t;
    }

    static MetricTable fromCsv(const artifact::CsvTable& t) {
        if (t.header != header()) throw DataError("metrics table: unexpected header");
        MetricTable m;
        m.manifestHash = t.manifestHash;
        std::size_t line = 2;
        for (const auto& f : t.rows) {
            ++line;
            auto bad = [&](const char* col) {
                return DataError("metrics table row " + std::to_string(line) + ": bad value in '" + col + "'");
            };
            auto real = [&](std::size_t i, const char* col) {
                const auto v = text::parseReal(f[i]);
                if (!v) throw bad(col);
                return *v;
            };
            auto whole = [&](std::size_t i, const char* col) {
                const auto v = text::parseInt<std::uint64_t>(f[i]);
                if (!v) throw bad(col);
                return *v;
            };
            MetricRow r;
            r.sense = static_cast<ConceptId>(whole(0, "sense"));
            r.label = f[1];
            r.docs = whole(2, "docs");
            r.dim = whole(3, "dim");
            r.h = real(4, "h");
            r.hNorm = real(5, "h_n");
            r.diseq = real(6, "d");
            r.complexity = real(7, "c");
            if (!f[8].empty()) r.tr = real(8, "tr");
            r.tmi = real(9, "tmi");
            r.tmiMode = parseTmiMode(f[10]);
            r.citations = real(11, "citations");
            r.pagerank = real(12, "pagerank");
            r.generation = static_cast<std::uint32_t>(whole(13, "generation"));
            r.cluster = static_cast<std::uint32_t>(whole(14, "cluster"));
            m.rows.push_back(std::move(r));
        }
        return m;
    }

    /// Numeric column by name; rows where the value is undefined are skipped.
    std::vector<double> column(std::string_view name) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) {
            if (name == "docs") out.push_back(static_cast<double>(r.docs));
            else if (name == "dim") out.push_back(static_cast<double>(r.dim));
            else if (name == "h") out.push_back(r.h);
            else if (name == "h_n") out.push_back(r.hNorm);
            else if (name == "d") out.push_back(r.diseq);
            else if (name == "c") out.push_back(r.complexity);
            else if (name == "tr") {
                if (r.tr) out.push_back(*r.tr);
            } else if (name == "tmi") out.push_back(r.tmi);
            else if (name == "citations") out.push_back(r.citations);
            else if (name == "pagerank") out.push_back(r.pagerank);
            else throw DataError("unknown metric column '" + std::string(name) + "'");
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Analysis

struct Analysis {
    MetricTable metrics;
    SenseGraph graph;
    std::vector<TmiRecord> tmi;
    WalktrapResult clusters;
    GenerationTable generations;
    CoreReport core;
    GenerationPlane plane;
    std::vector<YearCounts> yearCounts;
};

inline std::vector<int> boundariesOrEmpty(std::span<const YearCounts> counts) {
    if (counts.size() < 2) return {};
    return generationBoundaries(counts);
}

/// All per-sense metrics and the cluster / generation structures.
inline Analysis analyze(const CorpusIndex& index, const RunConfig& cfg) {
    if (index.documentCount() == 0) throw DataError("corpus is empty");
    Analysis a;
    const unsigned w = cfg.workers;
    const auto senseMetrics = computeAllMetrics(index, w);
    a.graph = buildGraph(index, std::nullopt, w);
    const auto years = index.years();
    a.tmi = trajectoryMutualInformationAll(index, years, cfg.tmiMode, w);
    const auto citations = citationRate(index, cfg.citationWindow);
    PageRankOptions pr;
    pr.damping = cfg.damping;
    const auto ranks = pagerank(a.graph, pr);
    WalktrapOptions wt;
    wt.steps = cfg.walkSteps;
    wt.workers = w;
    a.clusters = walktrapClusters(a.graph, cfg.weightMode, wt);
    a.yearCounts = senseCountsByYear(index);
    const auto boundaries = boundariesOrEmpty(a.yearCounts);
    a.generations = assignGenerations(index, boundaries, senseMetrics);
    a.core = coreSenses(a.generations, index, senseMetrics);
    a.plane = generationPlane(index, a.generations, w);

    a.metrics.rows.resize(index.conceptCount());
    for (ConceptId c = 0; c < index.conceptCount(); ++c) {
        auto& r = a.metrics.rows[c];
        const auto& m = senseMetrics[c];
        r.sense = c;
        r.label = index.label(c);
        r.docs = index.orbit(c).size();
        r.dim = m.dim;
        r.h = m.h;
        r.hNorm = m.hNorm;
        r.diseq = m.diseq;
        r.complexity = m.complexity;
        r.tr = transitivity(a.graph, c);
        r.tmi = a.tmi[c].tmi;
        r.tmiMode = cfg.tmiMode;
        r.citations = citations[c];
        r.pagerank = ranks.scores[c];
        r.generation = a.generations.assignment[c];
        r.cluster = a.clusters.membership[c];
    }
    return a;
}

inline std::string optReal(const std::optional<double>& v) { return v ? text::formatReal(*v) : std::string(); }

inline artifact::CsvTable edgesTable(const CorpusIndex& index, const SenseGraph& g, const std::string& hash) {
    artifact::CsvTable t{"edges", artifact::kSchemaVersion, hash, {"senseA", "senseB", "coocCount", "simAB"}, {}};
    for (const auto& e : g.edges())
        t.rows.push_back({index.label(e.a), index.label(e.b), std::to_string(e.cooc), text::formatReal(e.sim)});
    return t;
}

inline artifact::CsvTable tmiTable(const CorpusIndex& index, std::span<const TmiRecord> tmi, const std::string& hash) {
    artifact::CsvTable t{"tmi", artifact::kSchemaVersion, hash, {"sense", "mode", "tmi", "perYear"}, {}};
    for (const auto& r : tmi) {
        json per = json::object();
        for (const auto& [y, v] : r.perYear) per[std::to_string(y)] = v;
        t.rows.push_back({index.label(r.sense), std::string(toString(r.mode)), text::formatReal(r.tmi), per.dump()});
    }
    return t;
}

inline artifact::CsvTable clustersTable(const CorpusIndex& index, const WalktrapResult& wr, const std::string& hash) {
    artifact::CsvTable t{"clusters", artifact::kSchemaVersion, hash, {"sense", "clusterId"}, {}};
    for (ConceptId c = 0; c < wr.membership.size(); ++c)
        t.rows.push_back({index.label(c), std::to_string(wr.membership[c])});
    return t;
}

inline artifact::CsvTable generationsTable(const GenerationTable& g, const std::string& hash) {
    artifact::CsvTable t{"generations",
                         artifact::kSchemaVersion,
                         hash,
                         {"generation", "years", "total_senses", "new_senses", "percent_new", "mean_c", "mean_h_n",
                          "mean_dim"},
                         {}};
    for (const auto& a : g.aggregates) {
        t.rows.push_back({std::to_string(a.index), std::to_string(a.years.from) + "-" + std::to_string(a.years.to),
                          std::to_string(a.totalSenses), std::to_string(a.newSenses),
                          text::formatReal(100.0 * a.shareNew), optReal(a.meanComplexity), optReal(a.meanHNorm),
                          optReal(a.meanDim)});
    }
    return t;
}

inline artifact::CsvTable planeTable(const GenerationPlane& p, const std::string& hash) {
    artifact::CsvTable t{"generation-plane", artifact::kSchemaVersion, hash,
                         {"generation", "sense_years", "mean_c", "mean_h_n"}, {}};
    for (const auto& pt : p.points)
        t.rows.push_back({std::to_string(pt.generation), std::to_string(pt.senseYears), optReal(pt.meanComplexity),
                          optReal(pt.meanHNorm)});
    return t;
}

inline json coreJson(const CorpusIndex& index, const CoreReport& core, std::size_t generations, const std::string& hash) {
    json j;
    j["manifest_hash"] = hash;
    j["generations"] = generations;
    auto& labels = j["core"] = json::array();
    for (ConceptId c : core.core) labels.push_back(index.label(c));
    j["core_count"] = core.core.size();
    j["core_share"] = index.conceptCount() ? static_cast<double>(core.core.size()) / index.conceptCount() : 0.0;
    j["mean_dim_core"] = core.meanDimCore ? json(*core.meanDimCore) : json(nullptr);
    j["mean_dim_non_core"] = core.meanDimNonCore ? json(*core.meanDimNonCore) : json(nullptr);
    auto& strata = j["mean_dim_by_generations_present"] = json::object();
    for (const auto& [k, v] : core.meanDimByGenerationsPresent)
        strata[std::to_string(k)] = {{"senses", core.countByGenerationsPresent.at(k)}, {"mean_dim", v}};
    return j;
}

// ---------------------------------------------------------------------------
// Commands

/// Reads a raw corpus, writes the cleaned corpus, report and manifest.
inline IngestReport runIngest(const std::string& inputPath, const RunConfig& cfg, const fs::path& outDir) {
    const auto raw = readFile(inputPath);
    std::istringstream in(raw);
    const auto format = CorpusIndex::detectFormat(inputPath, in);
    const auto index = CorpusIndex::ingest(in, format, cfg.cleaning());
    fs::create_directories(outDir);
    const auto canonical = index.canonicalText();
    Manifest m;
    m.config = cfg;
    m.inputDigest = sha256Hex(raw);
    m.corpusDigest = sha256Hex(canonical);
    artifact::writeTextFile(outDir / kCorpusFile, canonical);
    json rep = index.report().toJson();
    rep["manifest_hash"] = m.hash();
    rep["index_digest"] = m.corpusDigest;
    artifact::writeTextFile(outDir / kIngestReportFile, dumpJson(rep));
    writeManifest(outDir, m);
    return index.report();
}

/// Re-stamps the manifest when the analysis configuration differs from the
/// one recorded at ingest.
inline Manifest restamp(const fs::path& dir, const RunConfig& cfg) {
    Manifest m = readManifest(dir);
    Manifest updated = m;
    updated.config = cfg;
    // cleaning parameters are fixed at ingest
    updated.config.blacklist = m.config.blacklist;
    updated.config.yearFrom = m.config.yearFrom;
    updated.config.yearTo = m.config.yearTo;
    if (updated.hash() != m.hash()) writeManifest(dir, updated);
    return updated;
}

inline Analysis runAnalyze(const fs::path& dir, const RunConfig& cfg) {
    const Manifest m = restamp(dir, cfg);
    const auto index = loadCorpus(dir, m);
    RunConfig effective = m.config;
    effective.workers = cfg.workers;
    auto a = analyze(index, effective);
    const auto hash = m.hash();
    a.metrics.manifestHash = hash;
    // everything is computed before anything is written
    artifact::writeCsvFile(dir / kMetricsFile, a.metrics.toCsv());
    artifact::writeCsvFile(dir / "edges.csv", edgesTable(index, a.graph, hash));
    artifact::writeCsvFile(dir / "tmi.csv", tmiTable(index, a.tmi, hash));
    artifact::writeCsvFile(dir / "clusters.csv", clustersTable(index, a.clusters, hash));
    artifact::writeCsvFile(dir / "generations.csv", generationsTable(a.generations, hash));
    artifact::writeCsvFile(dir / "generation_plane.csv", planeTable(a.plane, hash));
    artifact::writeTextFile(dir / "core.json", dumpJson(coreJson(index, a.core, a.generations.generationCount(), hash)));
    return a;
}

inline WalktrapResult runCluster(const fs::path& dir, const RunConfig& cfg) {
    const Manifest m = restamp(dir, cfg);
    const auto index = loadCorpus(dir, m);
    const auto g = buildGraph(index, std::nullopt, cfg.workers);
    WalktrapOptions opt;
    opt.steps = m.config.walkSteps;
    opt.workers = cfg.workers;
    auto wr = walktrapClusters(g, m.config.weightMode, opt);
    artifact::writeCsvFile(dir / "clusters.csv", clustersTable(index, wr, m.hash()));
    return wr;
}

inline GenerationTable runGenerations(const fs::path& dir, const RunConfig& cfg) {
    const Manifest m = restamp(dir, cfg);
    const auto index = loadCorpus(dir, m);
    const auto metrics = computeAllMetrics(index, cfg.workers);
    const auto counts = senseCountsByYear(index);
    const auto boundaries = boundariesOrEmpty(counts);
    auto table = assignGenerations(index, boundaries, metrics);
    const auto core = coreSenses(table, index, metrics);
    const auto plane = generationPlane(index, table, cfg.workers);
    const auto hash = m.hash();
    artifact::writeCsvFile(dir / "generations.csv", generationsTable(table, hash));
    artifact::writeCsvFile(dir / "generation_plane.csv", planeTable(plane, hash));
    artifact::writeTextFile(dir / "core.json", dumpJson(coreJson(index, core, table.generationCount(), hash)));
    return table;
}

/// Loads metrics.csv and refuses it when it was produced under another manifest.
inline MetricTable loadMetrics(const fs::path& dir, const Manifest& m) {
    auto t = MetricTable::fromCsv(artifact::readCsvFile(dir / kMetricsFile, "metrics"));
    if (t.manifestHash != m.hash())
        throw DataError("artifact integrity: metrics.csv was produced under a different manifest; rerun analyze");
    return t;
}

struct DensityBin {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    double empirical = 0.0;
    double fitted = 0.0;
};

/// Log-spaced histogram of the positive values with the fitted density
/// averaged over each bin.
inline std::vector<DensityBin> logBins(std::span<const double> xs, const evt::FitResult& fit, std::size_t bins = 30) {
    std::vector<double> pos;
    for (double x : xs)
        if (x > 0.0) pos.push_back(x);
    std::vector<DensityBin> out;
    if (pos.empty()) return out;
    const double lo = *std::min_element(pos.begin(), pos.end());
    const double hi = *std::max_element(pos.begin(), pos.end());
    if (lo == hi) return out;
    const double llo = std::log(lo), lhi = std::log(hi);
    const double n = static_cast<double>(xs.size());
    for (std::size_t b = 0; b < bins; ++b) {
        DensityBin d;
        d.lo = std::exp(llo + (lhi - llo) * static_cast<double>(b) / bins);
        d.hi = b + 1 == bins ? hi : std::exp(llo + (lhi - llo) * static_cast<double>(b + 1) / bins);
        out.push_back(d);
    }
    for (double x : pos) {
        auto idx = static_cast<std::size_t>((std::log(x) - llo) / (lhi - llo) * bins);
        ++out[std::min(idx, bins - 1)].count;
    }
    for (auto& d : out) {
        const double width = d.hi - d.lo;
        d.empirical = static_cast<double>(d.count) / (n * width);
        d.fitted = (evt::fittedCdf(fit, d.hi) - evt::fittedCdf(fit, d.lo)) / width;
    }
    return out;
}

inline json runFit(const fs::path& dir, const std::string& columnName, evt::Family family) {
    const Manifest m = readManifest(dir);
    loadCorpus(dir, m);
    const auto table = loadMetrics(dir, m);
    const auto values = table.column(columnName);
    if (values.empty()) throw DataError("column '" + columnName + "' is empty");
    std::vector<double> sample;
    std::size_t excluded = 0;
    for (double v : values) {
        const bool ok = family == evt::Family::frechet ? v > 0.0 : v >= 0.0;
        if (ok && std::isfinite(v)) sample.push_back(v);
        else ++excluded;
    }
    if (sample.empty()) throw DataError("column '" + columnName + "' has no admissible values");
    const auto fit = evt::fit(family, sample);
    json j;
    j["manifest_hash"] = m.hash();
    j["column"] = columnName;
    j["fit"] = fit.toJson();
    j["excluded"] = excluded;
    auto& bins = j["density"] = json::array();
    for (const auto& b : logBins(sample, fit))
        bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}, {"empirical", b.empirical}, {"fitted", b.fitted}});
    artifact::writeTextFile(dir / ("fit_" + columnName + "_" + std::string(evt::toString(family)) + ".json"), dumpJson(j));
    return j;
}

// ---------------------------------------------------------------------------
// Figure data

struct FigureSpec {
    std::string name;
    std::string xColumn;
    std::string yColumn;
    std::optional<evt::Model> model;
};

inline const std::vector<FigureSpec>& scatterFigures() {
    static const std::vector<FigureSpec> specs{
        {"fig3_citations_tmi", "tmi", "citations", evt::Model::quadratic},
        {"fig4_dim_transitivity", "tr", "dim", evt::Model::inverse},
        {"fig5_tmi_dim", "dim", "tmi", evt::Model::loglogPower},
        {"fig6_tmi_docs", "docs", "tmi", evt::Model::loglogPower},
        {"fig8_pagerank_tmi", "tmi", "pagerank", evt::Model::linear},
        {"fig9_complexity_entropy", "h_n", "c", std::nullopt},
    };
    return specs;
}

inline std::optional<double> rowValue(const MetricRow& r, std::string_view col) {
    if (col == "docs") return static_cast<double>(r.docs);
    if (col == "dim") return static_cast<double>(r.dim);
    if (col == "h_n") return r.hNorm;
    if (col == "c") return r.complexity;
    if (col == "tr") return r.tr;
    if (col == "tmi") return r.tmi;
    if (col == "citations") return r.citations;
    if (col == "pagerank") return r.pagerank;
    throw DataError("unknown metric column '" + std::string(col) + "'");
}

inline bool admissible(evt::Model m, double x, double y) {
    switch (m) {
    case evt::Model::loglogPower: return x > 0.0 && y > 0.0;
    case evt::Model::exponential: return y > 0.0;
    case evt::Model::inverse: return x != 0.0;
    default: return true;
    }
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return std::nan("");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline json fitOrNote(evt::Model model, std::span<const double> xs, std::span<const double> ys) {
    try {
        return evt::regress(model, xs, ys).toJson();
    } catch (const DataError& e) {
        return {{"model", evt::toString(model)}, {"note", e.what()}};
    }
}

inline json runFigures(const fs::path& dir) {
    const Manifest m = readManifest(dir);
    const auto index = loadCorpus(dir, m);
    const auto table = loadMetrics(dir, m);
    const auto hash = m.hash();
    const fs::path out = dir / "figures";
    fs::create_directories(out);
    json summary;
    summary["manifest_hash"] = hash;

    for (const auto& spec : scatterFigures()) {
        std::vector<double> xs, ys;
        artifact::CsvTable t{"figure", artifact::kSchemaVersion, hash, {"sense", spec.xColumn, spec.yColumn}, {}};
        std::size_t excluded = 0;
        for (const auto& r : table.rows) {
            const auto x = rowValue(r, spec.xColumn);
            const auto y = rowValue(r, spec.yColumn);
            if (!x || !y || (spec.model && !admissible(*spec.model, *x, *y))) {
                ++excluded;
                continue;
            }
            xs.push_back(*x);
            ys.push_back(*y);
            t.rows.push_back({r.label, text::formatReal(*x), text::formatReal(*y)});
        }
        json fig{{"x", spec.xColumn}, {"y", spec.yColumn}, {"points", xs.size()}, {"excluded", excluded}};
        if (spec.model) fig["fit"] = fitOrNote(*spec.model, xs, ys);
        else fig["pearson"] = pearson(xs, ys);
        summary["figures"][spec.name] = fig;
        artifact::writeCsvFile(out / (spec.name + ".csv"), t);
    }

    // concepts per year with the exponential growth model over t = 1, 2, ...
    {
        const auto counts = senseCountsByYear(index);
        artifact::CsvTable t{"figure", artifact::kSchemaVersion, hash, {"year", "t", "concepts", "cumulative"}, {}};
        std::vector<double> ts, ys;
        const int first = counts.empty() ? 0 : counts.front().year;
        for (const auto& c : counts) {
            const double tt = c.year - first + 1;
            ts.push_back(tt);
            ys.push_back(static_cast<double>(c.active));
            t.rows.push_back({std::to_string(c.year), text::formatReal(tt), std::to_string(c.active),
                              std::to_string(c.cumulative)});
        }
        const auto boundaries = boundariesOrEmpty(counts);
        summary["figures"]["fig2a_concepts_by_year"] = {{"x", "t"}, {"y", "concepts"}, {"points", ts.size()},
                                                        {"fit", fitOrNote(evt::Model::exponential, ts, ys)},
                                                        {"generation_boundaries", boundaries}};
        artifact::writeCsvFile(out / "fig2a_concepts_by_year.csv", t);
    }

    // cluster means in the (tmi, dim) and (docs, citations) planes
    {
        std::map<std::uint32_t, std::array<double, 5>> acc;  // size, tmi, dim, citations, docs
        for (const auto& r : table.rows) {
            auto& a = acc[r.cluster];
            a[0] += 1;
            a[1] += r.tmi;
            a[2] += static_cast<double>(r.dim);
            a[3] += r.citations;
            a[4] += static_cast<double>(r.docs);
        }
        artifact::CsvTable t{"figure", artifact::kSchemaVersion, hash,
                             {"cluster", "size", "mean_tmi", "mean_dim", "mean_citations", "mean_docs"}, {}};
        for (const auto& [c, a] : acc)
            t.rows.push_back({std::to_string(c), text::formatReal(a[0]), text::formatReal(a[1] / a[0]),
                              text::formatReal(a[2] / a[0]), text::formatReal(a[3] / a[0]),
                              text::formatReal(a[4] / a[0])});
        summary["figures"]["fig7_clusters"] = {{"clusters", acc.size()}};
        artifact::writeCsvFile(out / "fig7_clusters.csv", t);
    }

    // generation means in the complexity-entropy plane
    {
        const auto plane = artifact::readCsvFile(dir / "generation_plane.csv", "generation-plane");
        if (plane.manifestHash != hash)
            throw DataError("artifact integrity: generation_plane.csv was produced under a different manifest");
        artifact::CsvTable t{"figure", artifact::kSchemaVersion, hash, {"generation", "mean_h_n", "mean_c"}, {}};
        const auto g = plane.columnIndex("generation"), h = plane.columnIndex("mean_h_n"), c = plane.columnIndex("mean_c");
        for (const auto& r : plane.rows) t.rows.push_back({r[g], r[h], r[c]});
        summary["figures"]["fig10_generation_plane"] = {{"generations", plane.rows.size()}};
        artifact::writeCsvFile(out / "fig10_generation_plane.csv", t);
    }

    artifact::writeTextFile(out / "figures.json", dumpJson(summary));
    return summary;
}

// ---------------------------------------------------------------------------
// Report

inline std::string runReport(const fs::path& dir) {
    const Manifest m = readManifest(dir);
    const auto index = loadCorpus(dir, m);
    const auto table = loadMetrics(dir, m);
    const auto hash = m.hash();
    std::ostringstream md;
    md << "# Sense analysis report\n\n";
    md << "manifest: `" << hash << "`\n\n";
    md << "## Corpus\n\n";
    md << "| documents | senses | years |\n|---:|---:|---|\n";
    const auto span = index.span();
    md << "| " << index.documentCount() << " | " << index.conceptCount() << " | "
       << (span ? std::to_string(span->from) + "-" + std::to_string(span->to) : std::string("-")) << " |\n\n";

    const auto ingestPath = dir / kIngestReportFile;
    if (fs::exists(ingestPath)) {
        const auto rep = json::parse(readFile(ingestPath.string()));
        md << "Ingest: " << rep.value("records_read", 0) << " records read, " << rep.value("documents_dropped", 0)
           << " documents dropped, " << rep.value("keywords_dropped_blacklist", 0) << " blacklisted keywords, "
           << rep.value("keywords_dropped_invalid", 0) << " invalid keywords, " << rep.value("refs_unresolved", 0)
           << " unresolved references.\n\n";
    }

    md << "## Top senses by PageRank\n\n| rank | sense | dim | pagerank | tmi |\n|---:|---|---:|---:|---:|\n";
    std::vector<std::size_t> order(table.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return table.rows[a].pagerank > table.rows[b].pagerank; });
    for (std::size_t i = 0; i < order.size() && i < 30; ++i) {
        const auto& r = table.rows[order[i]];
        md << "| " << i + 1 << " | " << r.label << " | " << r.dim << " | " << text::formatReal(r.pagerank) << " | "
           << text::formatReal(r.tmi) << " |\n";
    }
    md << "\n";

    const auto genPath = dir / "generations.csv";
    if (fs::exists(genPath)) {
        const auto g = artifact::readCsvFile(genPath, "generations");
        md << "## Generations\n\n| generation | years | total senses | new senses | percent new |\n|---|---|---:|---:|---:|\n";
        for (const auto& r : g.rows)
            md << "| " << r[0] << " | " << r[1] << " | " << r[2] << " | " << r[3] << " | " << r[4] << " |\n";
        md << "\n";
    }
    const auto corePath = dir / "core.json";
    if (fs::exists(corePath)) {
        const auto core = json::parse(readFile(corePath.string()));
        md << "Core senses (present in every generation): " << core.value("core_count", 0) << "\n\n";
    }

    std::map<std::uint32_t, std::size_t> sizes;
    for (const auto& r : table.rows) ++sizes[r.cluster];
    md << "## Clusters\n\n" << sizes.size() << " clusters (walk length " << m.config.walkSteps << ", weights "
       << toString(m.config.weightMode) << ").\n\n| cluster | senses |\n|---:|---:|\n";
    for (const auto& [c, n] : sizes) md << "| " << c << " | " << n << " |\n";
    md << "\n";

    std::vector<fs::path> fits;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("fit_", 0) == 0 && entry.path().extension() == ".json") fits.push_back(entry.path());
    }
    std::sort(fits.begin(), fits.end());
    if (!fits.empty()) {
        md << "## Distribution fits\n\n| column | family | alpha | beta | KS | n |\n|---|---|---:|---:|---:|---:|\n";
        for (const auto& p : fits) {
            const auto j = json::parse(readFile(p.string()));
            const auto& f = j.at("fit");
            md << "| " << j.value("column", "") << " | " << f.value("family", "") << " | "
               << text::formatReal(f.value("alpha", 0.0)) << " | " << text::formatReal(f.value("beta", 0.0)) << " | "
               << text::formatReal(f.value("ks", 0.0)) << " | " << f.value("n", 0) << " |\n";
        }
        md << "\n";
    }
    md << "TMI mode: " << toString(m.config.tmiMode) << "; PageRank damping " << text::formatReal(m.config.damping)
       << " on co-occurrence weights; citation window " << m.config.citationWindow << " years.\n";

    const auto textOut = md.str();
    artifact::writeTextFile(dir / "report.md", textOut);
    return textOut;
}

} // namespace senses::pipeline
