// senses: command-line front end for the sense analytics pipeline.
//
//   senses ingest   --input corpus.jsonl --out-dir run/
//   senses analyze  --out-dir run/ [--tmi-mode full-mi] [--workers 8]
//   senses fit      --out-dir run/ --column dim --family frechet
//   senses figures  --out-dir run/
//   senses report   --out-dir run/
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 numeric non-convergence.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "senses/senses.hpp"

namespace {

namespace fs = std::filesystem;
using namespace senses;

struct Flags {
    std::string input;
    std::string config;
    std::string outDir;
    std::optional<std::string> yearFrom, yearTo, tmiMode, damping, walkSteps, weightMode, seed, blacklist,
        citationWindow;
    std::optional<unsigned> workers;
    bool timings = false;

    std::vector<std::pair<std::string, std::string>> overrides() const {
        std::vector<std::pair<std::string, std::string>> kv;
        auto add = [&](const char* key, const std::optional<std::string>& v) {
            if (v) kv.emplace_back(key, *v);
        };
        add("blacklist", blacklist);
        add("year-from", yearFrom);
        add("year-to", yearTo);
        add("tmi-mode", tmiMode);
        add("damping", damping);
        add("walk-steps", walkSteps);
        add("weight-mode", weightMode);
        add("seed", seed);
        add("citation-window", citationWindow);
        if (workers) kv.emplace_back("workers", std::to_string(*workers));
        return kv;
    }

    bool cleaningGiven() const { return blacklist || yearFrom || yearTo; }
};

void addConfigFlags(CLI::App* cmd, Flags& f, bool cleaning, bool analysis) {
    cmd->add_option("--config", f.config, "flat key = value config file");
    if (cleaning) {
        cmd->add_option("--year-from", f.yearFrom, "first publication year kept");
        cmd->add_option("--year-to", f.yearTo, "last publication year kept");
        cmd->add_option("--blacklist", f.blacklist, "file with one blacklisted keyword per line");
    }
    if (analysis) {
        cmd->add_option("--tmi-mode", f.tmiMode, "pointwise | full-mi");
        cmd->add_option("--damping", f.damping, "PageRank damping factor");
        cmd->add_option("--walk-steps", f.walkSteps, "walktrap random-walk length");
        cmd->add_option("--weight-mode", f.weightMode, "walktrap edge weights: count | positive-pmi");
        cmd->add_option("--seed", f.seed, "seed recorded in the manifest");
        cmd->add_option("--citation-window", f.citationWindow, "citation window in years");
    }
    cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

/// Defaults, then the manifest of an existing run, then the config file, then flags.
pipeline::RunConfig resolveConfig(const Flags& f, const std::optional<pipeline::RunConfig>& base) {
    pipeline::RunConfig cfg = base.value_or(pipeline::RunConfig{});
    if (!f.config.empty()) cfg.loadFile(f.config);
    for (const auto& [k, v] : f.overrides()) cfg.set(k, v);
    return cfg;
}

class StageTimer {
public:
    explicit StageTimer(bool enabled) : enabled_(enabled) {}
    void mark(const char* stage) {
        const auto now = std::chrono::steady_clock::now();
        if (enabled_)
            std::cerr << "[time] " << stage << ": "
                      << std::chrono::duration<double, std::milli>(now - last_).count() << " ms\n";
        last_ = now;
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

int run(int argc, char** argv) {
    CLI::App app{"Keyword co-occurrence sense analytics"};
    app.require_subcommand(1);
    Flags f;
    app.add_flag("--timings", f.timings, "print per-stage timings to stderr");

    auto* ingest = app.add_subcommand("ingest", "clean a raw corpus into an artifact directory");
    ingest->add_option("--input", f.input, "raw corpus (.jsonl or .csv)")->required();
    ingest->add_option("--out-dir", f.outDir, "artifact directory")->required();
    addConfigFlags(ingest, f, true, true);

    auto* analyze = app.add_subcommand("analyze", "compute the per-sense metric table");
    analyze->add_option("--out-dir", f.outDir, "artifact directory")->required();
    analyze->add_option("--input", f.input, "raw corpus; ingests first when given");
    addConfigFlags(analyze, f, true, true);

    std::string column = "dim", family = "frechet";
    auto* fit = app.add_subcommand("fit", "fit a heavy-tailed family to a metric column");
    fit->add_option("--out-dir", f.outDir, "artifact directory")->required();
    fit->add_option("--column", column, "metric column")->capture_default_str();
    fit->add_option("--family", family, "frechet | pareto2")->capture_default_str();

    auto* figures = app.add_subcommand("figures", "emit plot-data CSVs and regression fits");
    figures->add_option("--out-dir", f.outDir, "artifact directory")->required();

    auto* cluster = app.add_subcommand("cluster", "walktrap communities of the sense graph");
    cluster->add_option("--out-dir", f.outDir, "artifact directory")->required();
    addConfigFlags(cluster, f, false, true);

    auto* generations = app.add_subcommand("generations", "doubling-rule generations and core senses");
    generations->add_option("--out-dir", f.outDir, "artifact directory")->required();
    addConfigFlags(generations, f, false, false);

    auto* report = app.add_subcommand("report", "write report.md from the artifacts");
    report->add_option("--out-dir", f.outDir, "artifact directory")->required();

    synth::SynthOptions so;
    std::string synthOut;
    auto* synthCmd = app.add_subcommand("synth", "write a seeded synthetic corpus as JSONL");
    synthCmd->add_option("--output", synthOut, "output path")->required();
    synthCmd->add_option("--documents", so.documents, "document count")->capture_default_str();
    synthCmd->add_option("--years", so.years, "number of years")->capture_default_str();
    synthCmd->add_option("--first-year", so.firstYear, "first year")->capture_default_str();
    synthCmd->add_option("--seed", so.seed, "generator seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    StageTimer timer(f.timings);
    const fs::path dir = f.outDir;
    auto existing = [&]() -> std::optional<pipeline::RunConfig> { return pipeline::readManifest(dir).config; };

    if (*ingest || (*analyze && !f.input.empty())) {
        const auto cfg = resolveConfig(f, std::nullopt);
        const auto rep = pipeline::runIngest(f.input, cfg, dir);
        timer.mark("ingest");
        std::cout << "ingested " << rep.documentsKept << " documents (" << rep.documentsDropped << " dropped), "
                  << rep.concepts << " senses\n";
        if (*ingest) return 0;
    }
    if (*analyze) {
        if (f.input.empty() && f.cleaningGiven())
            throw UsageError("--year-from/--year-to/--blacklist apply at ingest; pass --input to re-ingest");
        const auto cfg = resolveConfig(f, existing());
        const auto a = pipeline::runAnalyze(dir, cfg);
        timer.mark("analyze");
        std::cout << "analyzed " << a.metrics.rows.size() << " senses, " << a.graph.edgeCount() << " edges, "
                  << a.clusters.clusterCount << " clusters, " << a.generations.generationCount() << " generations\n";
    } else if (*fit) {
        const auto j = pipeline::runFit(dir, column, evt::parseFamily(family));
        timer.mark("fit");
        std::cout << j.at("fit").dump() << "\n";
    } else if (*figures) {
        pipeline::runFigures(dir);
        timer.mark("figures");
        std::cout << "wrote " << (dir / "figures").string() << "\n";
    } else if (*cluster) {
        const auto wr = pipeline::runCluster(dir, resolveConfig(f, existing()));
        timer.mark("cluster");
        std::cout << wr.clusterCount << " clusters, modularity " << text::formatReal(wr.modularity) << "\n";
    } else if (*generations) {
        const auto t = pipeline::runGenerations(dir, resolveConfig(f, existing()));
        timer.mark("generations");
        for (const auto& g : t.aggregates)
            std::cout << "generation " << g.index << ": " << g.years.from << "-" << g.years.to << ", "
                      << g.newSenses << " new of " << g.totalSenses << "\n";
    } else if (*report) {
        pipeline::runReport(dir);
        timer.mark("report");
        std::cout << "wrote " << (dir / "report.md").string() << "\n";
    } else if (*synthCmd) {
        if (so.documents == 0 || so.years < 1) throw UsageError("--documents and --years must be positive");
        artifact::writeTextFile(synthOut, synth::toJsonl(synth::generateCorpus(so)));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const senses::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exitCode();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
