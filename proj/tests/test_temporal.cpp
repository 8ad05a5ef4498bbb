#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "senses/temporal.hpp"

using namespace senses;

namespace {

std::vector<YearCounts> cumulative(std::initializer_list<std::size_t> cum, int first = 2000) {
    std::vector<YearCounts> v;
    for (auto c : cum) v.push_back({first++, c, c});
    return v;
}

/// `fresh` new senses per year (each in its own two-keyword docs, paired with
/// an anchor that appears every year).
oracle::Corpus timeline(const std::vector<std::pair<int, std::size_t>>& fresh) {
    oracle::Corpus c;
    std::size_t next = 0;
    for (auto [year, n] : fresh) {
        c.docs.push_back({"a" + std::to_string(year), year, {"anchor", "partner"}, {}});
        for (std::size_t i = 0; i < n; ++i) {
            const auto id = "s" + std::to_string(next++);
            c.docs.push_back({"d" + id, year, {"anchor", id}, {}});
        }
    }
    return c;
}

} // namespace

TEST(Boundaries, DoublingScan) {
    EXPECT_EQ(generationBoundaries(cumulative({100, 150, 210, 400})), std::vector<int>{2002});
    EXPECT_EQ(generationBoundaries(cumulative({100, 150, 210, 420})), (std::vector<int>{2002, 2003}));
}

TEST(Boundaries, FlatCorpusHasNone) {
    EXPECT_TRUE(generationBoundaries(cumulative({50, 50, 50, 50})).empty());
}

TEST(Boundaries, NeedTwoYears) {
    EXPECT_THROW(generationBoundaries(cumulative({10})), DataError);
}

TEST(Generations, IntervalLookup) {
    oracle::Corpus c;
    c.docs.push_back({"d1", 1990, {"old", "x"}, {}});
    c.docs.push_back({"d2", 2001, {"mid", "x"}, {}});
    c.docs.push_back({"d3", 2010, {"new", "x"}, {}});
    const auto idx = fixtures::index(c);
    const std::vector<int> b{1995, 2008};
    const auto t = assignGenerations(idx, b);
    EXPECT_EQ(t.assignment[fixtures::id(idx, "old")], 1u);
    EXPECT_EQ(t.assignment[fixtures::id(idx, "mid")], 2u);
    EXPECT_EQ(t.assignment[fixtures::id(idx, "new")], 3u);
    EXPECT_EQ(t.aggregates[1].years, (YearRange{1995, 2007}));
}

TEST(Generations, SharesOfNewSenses) {
    // 10, 20 and 10 new senses (anchor and partner count in generation 1)
    const auto idx = fixtures::index(timeline({{2000, 8}, {2001, 20}, {2002, 10}}));
    const std::vector<int> b{2001, 2002};
    const auto t = assignGenerations(idx, b);
    EXPECT_EQ(t.aggregates[0].newSenses, 10u);
    EXPECT_DOUBLE_EQ(t.aggregates[0].shareNew, 0.25);
    EXPECT_DOUBLE_EQ(t.aggregates[1].shareNew, 0.5);
    EXPECT_DOUBLE_EQ(t.aggregates[2].shareNew, 0.25);
}

TEST(Generations, PlantedDoublingYears) {
    // cumulative 10, 14, 20, 26, 40, 80
    const auto idx = fixtures::index(timeline({{2000, 8}, {2001, 4}, {2002, 6}, {2003, 6}, {2004, 14}, {2005, 40}}));
    EXPECT_EQ(generationBoundaries(idx), (std::vector<int>{2002, 2004, 2005}));
}

TEST(Core, AlwaysPresentInOnlyFirstExcluded) {
    const auto idx = fixtures::index(timeline({{2000, 3}, {2001, 3}, {2002, 3}}));
    const std::vector<int> b{2001};
    const auto t = assignGenerations(idx, b);
    const auto core = coreSenses(t, idx);
    EXPECT_EQ(core.core, (std::vector<ConceptId>{fixtures::id(idx, "anchor"), fixtures::id(idx, "partner")}));
}

TEST(Core, TwoGenerationsOneShared) {
    oracle::Corpus c;
    c.docs.push_back({"d1", 2000, {"shared", "first"}, {}});
    c.docs.push_back({"d2", 2005, {"shared", "second"}, {}});
    const auto idx = fixtures::index(c);
    const std::vector<int> b{2005};
    const auto core = coreSenses(assignGenerations(idx, b), idx);
    EXPECT_EQ(core.core, std::vector<ConceptId>{fixtures::id(idx, "shared")});
}

TEST(Plane, UniformConfigurationsSitAtMaximalEntropy) {
    // every configuration is {focal:1, other:1}
    const auto idx = fixtures::index(timeline({{2000, 0}, {2001, 0}}));
    const std::vector<int> b{2001};
    const auto t = assignGenerations(idx, b);
    const auto plane = generationPlane(idx, t);
    EXPECT_DOUBLE_EQ(*plane.points[0].meanHNorm, 1.0);
    EXPECT_DOUBLE_EQ(*plane.points[0].meanComplexity, 0.0);
}

TEST(Plane, EmptyGenerationHasNoMeans) {
    const auto idx = fixtures::index(timeline({{2000, 2}, {2010, 0}}));
    const std::vector<int> b{2005};
    const auto plane = generationPlane(idx, assignGenerations(idx, b));
    ASSERT_EQ(plane.points.size(), 2u);
    EXPECT_EQ(plane.points[1].senseYears, 0u);
    EXPECT_FALSE(plane.points[1].meanHNorm);
    EXPECT_FALSE(plane.points[1].meanComplexity);
}

TEST(Plane, MeansMatchYearRestrictedOracle) {
    std::mt19937_64 rng(301);
    for (int trial = 0; trial < 50; ++trial) {
        const auto c = oracle::randomCorpus(rng, 12, 8, 2000, 4);
        const auto idx = fixtures::index(c);
        if (idx.years().size() < 2) continue;
        const std::vector<int> b{idx.years()[1]};
        const auto t = assignGenerations(idx, b);
        const auto plane = generationPlane(idx, t, 2);
        for (std::size_t g = 0; g < t.generationCount(); ++g) {
            double sumH = 0, sumC = 0, count = 0;
            for (const auto& label : c.concepts()) {
                if (t.assignment[fixtures::id(idx, label)] != g + 1) continue;
                std::set<int> years;
                for (auto i : c.orbit(label)) years.insert(c.docs[i].year);
                for (int y : years) {
                    oracle::Corpus slice;
                    for (const auto& d : c.docs)
                        if (d.year == y) slice.docs.push_back(d);
                    const auto m = oracle::metrics(slice, label);
                    if (m.dim < 2) continue;
                    sumH += m.hn;
                    sumC += m.c;
                    count += 1;
                }
            }
            ASSERT_EQ(static_cast<double>(plane.points[g].senseYears), count);
            if (count == 0) continue;
            ASSERT_NEAR(*plane.points[g].meanHNorm, sumH / count, 1e-12);
            ASSERT_NEAR(*plane.points[g].meanComplexity, sumC / count, 1e-12);
        }
    }
}

// ---------------------------------------------------------------------------
// properties

TEST(TemporalProperty, PartitionMonotoneCountsAndCoreSubset) {
    std::mt19937_64 rng(311);
    for (int trial = 0; trial < 100; ++trial) {
        const auto idx = fixtures::index(oracle::randomCorpus(rng, 30, 25, 1990, 8));
        const auto counts = senseCountsByYear(idx);
        for (std::size_t i = 1; i < counts.size(); ++i) ASSERT_GE(counts[i].cumulative, counts[i - 1].cumulative);
        if (counts.size() < 2) continue;
        const auto b = generationBoundaries(counts);
        double ref = static_cast<double>(counts.front().cumulative);
        for (int year : b) {
            const auto it = std::find_if(counts.begin(), counts.end(), [&](auto& c) { return c.year == year; });
            ASSERT_GE(static_cast<double>(it->cumulative), 2.0 * ref);
            ref = static_cast<double>(it->cumulative);
        }

        const auto t = assignGenerations(idx, b);
        std::size_t totalNew = 0;
        double share = 0;
        for (const auto& a : t.aggregates) {
            totalNew += a.newSenses;
            share += a.shareNew;
        }
        ASSERT_EQ(totalNew, idx.conceptCount());
        ASSERT_NEAR(share, 1.0, 1e-12);

        const auto presence = generationPresence(t, idx);
        for (ConceptId c : coreSenses(t, idx).core)
            for (std::size_t g = 0; g < t.generationCount(); ++g) ASSERT_TRUE(presence[c] >> g & 1u);
    }
}

TEST(TemporalProperty, PlaneIgnoresLabelsAndInputOrder) {
    std::mt19937_64 rng(312);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = oracle::randomCorpus(rng, 12, 8, 2000, 4);
        const auto idx = fixtures::index(c);
        if (idx.years().size() < 2) continue;
        const std::vector<int> b{idx.years()[1]};
        const auto p1 = generationPlane(idx, assignGenerations(idx, b));

        std::shuffle(c.docs.begin(), c.docs.end(), rng);
        for (auto& d : c.docs)
            for (auto& k : d.keywords) k = "renamed " + k;
        const auto idx2 = fixtures::index(c);
        const auto p2 = generationPlane(idx2, assignGenerations(idx2, b));
        ASSERT_EQ(p1.points.size(), p2.points.size());
        for (std::size_t g = 0; g < p1.points.size(); ++g) {
            ASSERT_EQ(p1.points[g].senseYears, p2.points[g].senseYears);
            ASSERT_EQ(p1.points[g].meanHNorm.has_value(), p2.points[g].meanHNorm.has_value());
            if (!p1.points[g].meanHNorm) continue;
            ASSERT_NEAR(*p1.points[g].meanHNorm, *p2.points[g].meanHNorm, 1e-12);
            ASSERT_NEAR(*p1.points[g].meanComplexity, *p2.points[g].meanComplexity, 1e-12);
        }
    }
}
