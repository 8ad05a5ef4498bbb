#pragma once

// Generations of senses: cohorts delimited by the years in which the
// cumulative number of distinct senses doubles.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "sense.hpp"

namespace senses {

struct YearCounts {
    int year = 0;
    std::size_t active = 0;      // distinct senses occurring that year
    std::size_t cumulative = 0;  // distinct senses seen up to and including that year
};

inline std::vector<YearCounts> senseCountsByYear(const CorpusIndex& index) {
    std::vector<YearCounts> out;
    std::vector<bool> seen(index.conceptCount(), false);
    std::vector<int> lastYear(index.conceptCount(), 0);
    std::size_t cumulative = 0;
    for (int y : index.years()) {
        YearCounts yc;
        yc.year = y;
        for (DocIndex d : index.yearlySlice(y)) {
            for (ConceptId c : index.document(d).keywords) {
                if (!seen[c]) {
                    seen[c] = true;
                    ++cumulative;
                    lastYear[c] = y;
                    ++yc.active;
                } else if (lastYear[c] != y) {
                    lastYear[c] = y;
                    ++yc.active;
                }
            }
        }
        yc.cumulative = cumulative;
        out.push_back(yc);
    }
    return out;
}

struct DoublingRule {
    double factor = 2.0;
    bool inclusive = true;  // cumulative >= factor * reference (else strictly greater)
};

/// Years at which the cumulative distinct-sense count first reaches
/// factor x the count at the previous boundary. The first reference is the
/// count at the end of the first data year.
inline std::vector<int> generationBoundaries(std::span<const YearCounts> counts, const DoublingRule& rule = {}) {
    if (counts.size() < 2) throw DataError("generation boundaries need at least two years of data");
    std::vector<int> out;
    double reference = static_cast<double>(counts.front().cumulative);
    for (std::size_t i = 1; i < counts.size(); ++i) {
        const double cum = static_cast<double>(counts[i].cumulative);
        const double target = rule.factor * reference;
        if (rule.inclusive ? cum >= target : cum > target) {
            out.push_back(counts[i].year);
            reference = cum;
        }
    }
    return out;
}

inline std::vector<int> generationBoundaries(const CorpusIndex& index, const DoublingRule& rule = {}) {
    const auto counts = senseCountsByYear(index);
    return generationBoundaries(counts, rule);
}

struct GenerationAggregate {
    int index = 0;  // 1-based
    YearRange years;
    std::size_t totalSenses = 0;  // senses active anywhere in the span
    std::size_t newSenses = 0;    // senses whose first occurrence falls in the span
    double shareNew = 0.0;
    std::optional<double> meanComplexity;  // over new senses, full-period metrics
    std::optional<double> meanHNorm;
    std::optional<double> meanDim;
};

struct GenerationTable {
    std::vector<int> boundaries;
    std::vector<std::uint32_t> assignment;  // per concept, 1-based generation
    std::vector<GenerationAggregate> aggregates;

    std::size_t generationCount() const { return aggregates.size(); }

    std::uint32_t generationOfYear(int year) const {
        return 1 + static_cast<std::uint32_t>(std::upper_bound(boundaries.begin(), boundaries.end(), year) -
                                              boundaries.begin());
    }
};

/// Full-period metrics for every sense (requires every sense to have dim >= 2,
/// which ingest guarantees).
inline std::vector<SenseMetrics> computeAllMetrics(const CorpusIndex& index, unsigned workers = 1) {
    std::vector<SenseMetrics> out(index.conceptCount());
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, out.size()));
    const std::size_t per = (out.size() + chunks - 1) / chunks;
    parallelFor(chunks, workers, [&](std::size_t t) {
        ConfigurationBuilder builder(index);
        for (std::size_t c = t * per; c < std::min(out.size(), (t + 1) * per); ++c)
            out[c] = computeMetrics(builder.build(static_cast<ConceptId>(c)));
    });
    return out;
}

inline GenerationTable assignGenerations(const CorpusIndex& index, std::span<const int> boundaries,
                                         std::span<const SenseMetrics> metrics) {
    const auto span = index.span();
    if (!span) throw DataError("empty corpus");
    if (metrics.size() != index.conceptCount()) throw UsageError("one metrics record per sense required");
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1]) throw UsageError("generation boundaries must be strictly increasing");

    GenerationTable t;
    t.boundaries.assign(boundaries.begin(), boundaries.end());
    const std::size_t gens = boundaries.size() + 1;
    t.aggregates.resize(gens);
    for (std::size_t g = 0; g < gens; ++g) {
        auto& a = t.aggregates[g];
        a.index = static_cast<int>(g + 1);
        a.years.from = g == 0 ? span->from : boundaries[g - 1];
        a.years.to = g + 1 < gens ? boundaries[g] - 1 : span->to;
    }

    t.assignment.assign(index.conceptCount(), 0);
    std::vector<double> sumC(gens, 0.0), sumH(gens, 0.0), sumDim(gens, 0.0);
    for (ConceptId c = 0; c < index.conceptCount(); ++c) {
        if (index.orbit(c).empty()) throw Error(ErrorKind::data, "sense without occurrences: " + index.label(c));
        const auto g = t.generationOfYear(index.firstYear(c));
        t.assignment[c] = g;
        auto& a = t.aggregates[g - 1];
        ++a.newSenses;
        sumC[g - 1] += metrics[c].complexity;
        sumH[g - 1] += metrics[c].hNorm;
        sumDim[g - 1] += static_cast<double>(metrics[c].dim);
        std::vector<bool> touched(gens, false);
        for (DocIndex d : index.orbit(c)) touched[t.generationOfYear(index.document(d).year) - 1] = true;
        for (std::size_t g2 = 0; g2 < gens; ++g2) t.aggregates[g2].totalSenses += touched[g2];
    }
    const double total = static_cast<double>(index.conceptCount());
    for (std::size_t g = 0; g < gens; ++g) {
        auto& a = t.aggregates[g];
        a.shareNew = total > 0 ? static_cast<double>(a.newSenses) / total : 0.0;
        if (a.newSenses > 0) {
            const double n = static_cast<double>(a.newSenses);
            a.meanComplexity = sumC[g] / n;
            a.meanHNorm = sumH[g] / n;
            a.meanDim = sumDim[g] / n;
        }
    }
    return t;
}

inline GenerationTable assignGenerations(const CorpusIndex& index, std::span<const int> boundaries,
                                         unsigned workers = 1) {
    const auto metrics = computeAllMetrics(index, workers);
    return assignGenerations(index, boundaries, metrics);
}

/// Which generations each sense occurs in, as a bitmask over generation indices.
inline std::vector<std::uint64_t> generationPresence(const GenerationTable& table, const CorpusIndex& index) {
    std::vector<std::uint64_t> mask(index.conceptCount(), 0);
    for (ConceptId c = 0; c < index.conceptCount(); ++c)
        for (DocIndex d : index.orbit(c))
            mask[c] |= std::uint64_t{1} << (table.generationOfYear(index.document(d).year) - 1);
    return mask;
}

struct CoreReport {
    std::vector<ConceptId> core;
    /// Mean full-period dim of senses by the number of generations they occur in.
    std::map<std::size_t, double> meanDimByGenerationsPresent;
    std::map<std::size_t, std::size_t> countByGenerationsPresent;
    std::optional<double> meanDimCore;
    std::optional<double> meanDimNonCore;
};

/// Senses occurring in every generation's year span.
inline CoreReport coreSenses(const GenerationTable& table, const CorpusIndex& index,
                             std::span<const SenseMetrics> metrics = {}) {
    if (table.generationCount() > 64) throw UsageError("at most 64 generations supported");
    const auto mask = generationPresence(table, index);
    const std::uint64_t all =
        table.generationCount() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << table.generationCount()) - 1;
    CoreReport rep;
    std::map<std::size_t, double> sum;
    double coreSum = 0.0, restSum = 0.0;
    std::size_t rest = 0;
    for (ConceptId c = 0; c < index.conceptCount(); ++c) {
        const bool isCore = mask[c] == all;
        if (isCore) rep.core.push_back(c);
        if (metrics.empty()) continue;
        const auto present = static_cast<std::size_t>(std::popcount(mask[c]));
        const double dim = static_cast<double>(metrics[c].dim);
        sum[present] += dim;
        ++rep.countByGenerationsPresent[present];
        if (isCore) coreSum += dim;
        else {
            restSum += dim;
            ++rest;
        }
    }
    for (const auto& [k, s] : sum) rep.meanDimByGenerationsPresent[k] = s / static_cast<double>(rep.countByGenerationsPresent[k]);
    if (!metrics.empty() && !rep.core.empty()) rep.meanDimCore = coreSum / static_cast<double>(rep.core.size());
    if (rest > 0) rep.meanDimNonCore = restSum / static_cast<double>(rest);
    return rep;
}

struct GenerationPlanePoint {
    int generation = 0;
    std::size_t senseYears = 0;
    std::optional<double> meanComplexity;  // nullopt when the generation has no sense-years
    std::optional<double> meanHNorm;
};

struct GenerationPlane {
    std::vector<GenerationPlanePoint> points;
    std::size_t skippedSenseYears = 0;  // year-restricted dim < 2
};

/// Per-generation means of (c, h_n) over year-restricted configurations of
/// the senses assigned to each generation.
inline GenerationPlane generationPlane(const CorpusIndex& index, const GenerationTable& table, unsigned workers = 1) {
    const std::size_t gens = table.generationCount();
    const std::size_t n = index.conceptCount();
    struct Partial {
        double c = 0.0, h = 0.0;
        std::size_t used = 0, skipped = 0;
    };
    std::vector<Partial> perSense(n);
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    const std::size_t per = (n + chunks - 1) / chunks;
    parallelFor(chunks, workers, [&](std::size_t t) {
        ConfigurationBuilder builder(index);
        for (std::size_t c = t * per; c < std::min(n, (t + 1) * per); ++c) {
            auto& p = perSense[c];
            std::vector<int> years;
            for (DocIndex d : index.orbit(static_cast<ConceptId>(c))) years.push_back(index.document(d).year);
            std::sort(years.begin(), years.end());
            years.erase(std::unique(years.begin(), years.end()), years.end());
            for (int y : years) {
                const auto cfg = builder.build(static_cast<ConceptId>(c), YearRange{y, y});
                if (dimension(cfg) < 2) {
                    ++p.skipped;
                    continue;
                }
                p.c += complexity(cfg);
                p.h += normalizedEntropy(cfg);
                ++p.used;
            }
        }
    });
    GenerationPlane plane;
    std::vector<Partial> perGen(gens);
    for (std::size_t c = 0; c < n; ++c) {
        auto& g = perGen[table.assignment[c] - 1];
        g.c += perSense[c].c;
        g.h += perSense[c].h;
        g.used += perSense[c].used;
        plane.skippedSenseYears += perSense[c].skipped;
    }
    for (std::size_t g = 0; g < gens; ++g) {
        GenerationPlanePoint pt;
        pt.generation = static_cast<int>(g + 1);
        pt.senseYears = perGen[g].used;
        if (pt.senseYears > 0) {
            pt.meanComplexity = perGen[g].c / static_cast<double>(pt.senseYears);
            pt.meanHNorm = perGen[g].h / static_cast<double>(pt.senseYears);
        }
        plane.points.push_back(pt);
    }
    return plane;
}

} // namespace senses
