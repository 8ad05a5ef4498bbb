#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "senses/sense.hpp"

using namespace senses;

namespace {

Configuration cfgOf(std::vector<std::uint64_t> ms) { return Configuration::fromMultiplicities(ms); }

std::vector<std::uint64_t> randomMultiplicities(std::mt19937_64& rng, std::size_t maxDim = 200,
                                                std::uint64_t maxM = 1000) {
    const std::size_t dim = 2 + oracle::below(rng, maxDim - 1);
    std::vector<std::uint64_t> ms(dim);
    for (auto& m : ms) m = 1 + oracle::below(rng, maxM);
    return ms;
}

} // namespace

TEST(Configuration, FocalFirstThenCoOccurring) {
    const auto idx = fixtures::index(fixtures::docs({{"a", "b"}, {"a", "c"}, {"b", "c"}}));
    const auto cfg = buildConfiguration(idx, fixtures::id(idx, "a"));
    ASSERT_EQ(cfg.entries.size(), 3u);
    EXPECT_EQ(idx.label(cfg.entries[0].id), "a");
    EXPECT_EQ(cfg.entries[0].multiplicity, 2u);
    EXPECT_EQ(cfg.entries[1].multiplicity, 1u);
    EXPECT_EQ(cfg.entries[2].multiplicity, 1u);
    EXPECT_EQ(cfg.total, 4u);
    EXPECT_EQ(dimension(cfg), 3u);
}

TEST(Configuration, MinimalOrbit) {
    const auto idx = fixtures::index(fixtures::docs({{"a", "b"}, {"c", "d"}}));
    const auto cfg = buildConfiguration(idx, fixtures::id(idx, "a"));
    EXPECT_EQ(cfg.total, 2u);
    EXPECT_EQ(dimension(cfg), 2u);
}

TEST(Configuration, EmptyFilteredOrbitThrows) {
    const auto idx = fixtures::index(fixtures::docs({{"a", "b"}}, 2000));
    EXPECT_THROW(buildConfiguration(idx, 0, YearRange{2001, 2005}), EmptyOrbitError);
}

TEST(Metrics, HomeomorphismCount) {
    EXPECT_DOUBLE_EQ(homeomorphismLogCount(cfgOf({1, 1, 1, 1})), 0.0);
    EXPECT_NEAR(homeomorphismLogCount(cfgOf({2, 1, 1})), 1.386294, 1e-6);
    EXPECT_NEAR(homeomorphismLogCount(cfgOf({3})), 3 * std::log(3.0), 1e-12);
}

TEST(Metrics, PartitionProbability) {
    EXPECT_NEAR(partitionLogProb(cfgOf({5})), 0.0, 1e-12);
    EXPECT_NEAR(partitionLogProb(cfgOf({1, 1, 1, 1, 1})), -5 * std::log(5.0), 1e-12);
    EXPECT_NEAR(partitionLogProb(cfgOf({2, 1, 1})), -3 * std::log(4.0), 1e-12);
}

TEST(Metrics, Entropy) {
    EXPECT_NEAR(entropy(cfgOf({3, 3, 3, 3})), std::log(4.0), 1e-12);
    EXPECT_NEAR(entropy(cfgOf({2, 1, 1})), 1.039721, 1e-6);
    EXPECT_NEAR(entropy(cfgOf({2, 1, 1})), -0.25 * std::log(1.0 / 64), 1e-12);
    EXPECT_NEAR(entropy(cfgOf({7})), 0.0, 1e-15);
}

TEST(Metrics, NormalizedEntropy) {
    EXPECT_NEAR(normalizedEntropy(cfgOf({4, 4, 4})), 1.0, 1e-12);
    EXPECT_NEAR(normalizedEntropy(cfgOf({2, 1, 1})), 0.946395, 1e-6);
    EXPECT_THROW(normalizedEntropy(cfgOf({3})), DataError);
}

TEST(Metrics, Disequilibrium) {
    EXPECT_NEAR(disequilibrium(cfgOf({2, 2, 2})), 0.0, 1e-15);
    EXPECT_NEAR(disequilibrium(cfgOf({2, 1, 1})), 0.041667, 1e-6);
    // (0.98 - 1/3)^2 + 2 (0.01 - 1/3)^2 = 0.6272666...
    EXPECT_NEAR(disequilibrium(cfgOf({98, 1, 1})), 0.98 * 0.98 + 2 * 0.01 * 0.01 - 1.0 / 3.0, 1e-12);
}

TEST(Metrics, Complexity) {
    EXPECT_NEAR(complexity(cfgOf({5, 5})), 0.0, 1e-15);
    EXPECT_NEAR(complexity(cfgOf({2, 1, 1})), 0.039433, 1e-6);
    EXPECT_LT(complexity(cfgOf({1000000, 1, 1})), 1e-4);
}

TEST(Metrics, BundleMatchesOracle) {
    const auto m = computeMetrics(cfgOf({2, 1, 1}));
    const auto o = oracle::metrics({2, 1, 1});
    EXPECT_EQ(m.dim, 3u);
    EXPECT_NEAR(m.nuLog, o.nuLog, 1e-12);
    EXPECT_NEAR(m.prob, o.lnP, 1e-12);
    EXPECT_NEAR(m.h, o.h, 1e-12);
    EXPECT_NEAR(m.hNorm, o.hn, 1e-12);
    EXPECT_NEAR(m.diseq, o.d, 1e-12);
    EXPECT_NEAR(m.complexity, o.c, 1e-12);
}

// ---------------------------------------------------------------------------
// properties

TEST(SenseProperty, EntropyIsMinusLogProbabilityPerElement) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto cfg = cfgOf(randomMultiplicities(rng));
        ASSERT_LT(std::abs(entropy(cfg) + partitionLogProb(cfg) / static_cast<double>(cfg.total)), 1e-10);
    }
}

TEST(SenseProperty, EntropyBounds) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        auto ms = randomMultiplicities(rng, 50, 20);
        const auto cfg = cfgOf(ms);
        const double h = entropy(cfg), lnDim = std::log(static_cast<double>(ms.size()));
        ASSERT_GE(h, -1e-15);
        ASSERT_LE(h, lnDim + 1e-12);
        const bool uniform = std::all_of(ms.begin(), ms.end(), [&](auto m) { return m == ms[0]; });
        if (!uniform) ASSERT_LT(h, lnDim - 1e-12);
        std::fill(ms.begin(), ms.end(), ms[0]);
        ASSERT_NEAR(entropy(cfgOf(ms)), lnDim, 1e-12);
    }
}

TEST(SenseProperty, PermutationInvariance) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        auto ms = randomMultiplicities(rng, 40, 100);
        const auto a = computeMetrics(cfgOf(ms));
        std::shuffle(ms.begin(), ms.end(), rng);
        const auto b = computeMetrics(cfgOf(ms));
        ASSERT_NEAR(a.h, b.h, 1e-12);
        ASSERT_NEAR(a.hNorm, b.hNorm, 1e-12);
        ASSERT_NEAR(a.diseq, b.diseq, 1e-12);
        ASSERT_NEAR(a.complexity, b.complexity, 1e-12);
        ASSERT_NEAR(a.nuLog, b.nuLog, 1e-9 * std::max(1.0, std::abs(a.nuLog)));
        ASSERT_EQ(a.dim, b.dim);
    }
}

TEST(SenseProperty, ScalingLeavesShapeMetricsUnchanged) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 300; ++i) {
        auto ms = randomMultiplicities(rng, 40, 100);
        const std::uint64_t k = 2 + oracle::below(rng, 9);
        const auto a = computeMetrics(cfgOf(ms));
        for (auto& m : ms) m *= k;
        const auto b = computeMetrics(cfgOf(ms));
        ASSERT_NEAR(a.h, b.h, 1e-10);
        ASSERT_NEAR(a.hNorm, b.hNorm, 1e-10);
        ASSERT_NEAR(a.diseq, b.diseq, 1e-12);
        ASSERT_NEAR(a.complexity, b.complexity, 1e-12);
    }
}

TEST(SenseProperty, ComplexityBoundedAndZeroOnlyWhenUniform) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const auto ms = randomMultiplicities(rng, 30, 10);
        const auto m = computeMetrics(cfgOf(ms));
        const double dim = static_cast<double>(ms.size());
        const double maxDiseq = 1.0 - 1.0 / dim;  // all mass on one entry
        ASSERT_LE(m.complexity, m.hNorm * maxDiseq + 1e-12);
        const bool uniform = std::all_of(ms.begin(), ms.end(), [&](auto x) { return x == ms[0]; });
        ASSERT_EQ(m.complexity < 1e-15, uniform);
    }
}

TEST(SenseProperty, CorpusConfigurationsMatchOracle) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto c = oracle::randomCorpus(rng);
        const auto idx = fixtures::index(c);
        for (const auto& label : c.concepts()) {
            const auto m = computeMetrics(buildConfiguration(idx, fixtures::id(idx, label)));
            const auto o = oracle::metrics(c, label);
            ASSERT_EQ(static_cast<double>(m.dim), o.dim);
            ASSERT_NEAR(m.h, o.h, 1e-12);
            ASSERT_NEAR(m.complexity, o.c, 1e-12);
            ASSERT_NEAR(m.prob, o.lnP, 1e-9);
        }
    }
}
