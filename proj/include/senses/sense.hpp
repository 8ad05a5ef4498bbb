#pragma once

// Single-sense structure and metrics. A sense is represented by the multiset
// of concept multiplicities over its orbit; the discrete topology and its
// quotient space are fully determined by that multiset and are never
// materialized.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"

namespace senses {

struct ConfigurationEntry {
    ConceptId id = 0;
    std::uint64_t multiplicity = 0;

    friend bool operator==(const ConfigurationEntry&, const ConfigurationEntry&) = default;
};

/// Concepts of a sense's spectrum with the number of orbit documents
/// containing each. The focal concept is always the first entry.
struct Configuration {
    ConceptId focal = 0;
    std::vector<ConfigurationEntry> entries;
    std::uint64_t total = 0;  // M

    /// Builds a configuration from bare multiplicities (entry i gets concept id i).
    static Configuration fromMultiplicities(const std::vector<std::uint64_t>& ms) {
        Configuration cfg;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            if (ms[i] == 0) throw DataError("multiplicities must be positive");
            cfg.entries.push_back({static_cast<ConceptId>(i), ms[i]});
            cfg.total += ms[i];
        }
        return cfg;
    }
};

/// Reusable scratch for building many configurations over the same index.
class ConfigurationBuilder {
public:
    explicit ConfigurationBuilder(const CorpusIndex& index)
        : index_(&index), counts_(index.conceptCount(), 0) {}

    Configuration build(ConceptId focal, const std::optional<YearRange>& range = std::nullopt) {
        if (focal >= index_->conceptCount())
            throw DataError("unknown concept id " + std::to_string(focal));
        Configuration cfg;
        cfg.focal = focal;
        touched_.clear();
        touched_.push_back(focal);
        counts_[focal] = 0;
        std::uint64_t orbitSize = 0;
        for (DocIndex d : index_->orbit(focal)) {
            const auto& doc = index_->document(d);
            if (range && !range->contains(doc.year)) continue;
            ++orbitSize;
            for (ConceptId c : doc.keywords) {
                if (counts_[c]++ == 0 && c != focal) touched_.push_back(c);
            }
        }
        if (orbitSize == 0) {
            throw EmptyOrbitError("empty orbit for '" + index_->label(focal) + "'" +
                                  (range ? " in " + std::to_string(range->from) + "-" + std::to_string(range->to) : ""));
        }
        std::sort(touched_.begin() + 1, touched_.end());
        cfg.entries.reserve(touched_.size());
        for (ConceptId c : touched_) {
            cfg.entries.push_back({c, counts_[c]});
            cfg.total += counts_[c];
            counts_[c] = 0;
        }
        return cfg;
    }

private:
    const CorpusIndex* index_;
    std::vector<std::uint64_t> counts_;
    std::vector<ConceptId> touched_;
};

/// Configuration of `focal` over its orbit, optionally restricted to a year range.
inline Configuration buildConfiguration(const CorpusIndex& index, ConceptId focal,
                                        const std::optional<YearRange>& range = std::nullopt) {
    return ConfigurationBuilder(index).build(focal, range);
}

/// Number of distinct concepts in the spectrum, focal included.
inline std::size_t dimension(const Configuration& cfg) { return cfg.entries.size(); }

/// ln of the number of multiplicity-preserving self-maps, sum m ln m.
inline double homeomorphismLogCount(const Configuration& cfg) {
    double s = 0.0;
    for (const auto& e : cfg.entries) {
        const double m = static_cast<double>(e.multiplicity);
        s += m * std::log(m);
    }
    return s;
}

/// ln P{A} = ln nu - M ln M. Never positive.
inline double partitionLogProb(const Configuration& cfg) {
    const double M = static_cast<double>(cfg.total);
    return homeomorphismLogCount(cfg) - M * std::log(M);
}

/// Shannon entropy (nats) of the multiplicity distribution.
inline double entropy(const Configuration& cfg) {
    const double M = static_cast<double>(cfg.total);
    double h = 0.0;
    for (const auto& e : cfg.entries) {
        const double p = static_cast<double>(e.multiplicity) / M;
        h -= p * std::log(p);
    }
    return h;
}

inline double normalizedEntropy(const Configuration& cfg) {
    const auto dim = dimension(cfg);
    if (dim < 2) throw DataError("normalized entropy undefined for dim < 2");
    return entropy(cfg) / std::log(static_cast<double>(dim));
}

/// Squared distance of the multiplicity distribution from uniform.
inline double disequilibrium(const Configuration& cfg) {
    const double M = static_cast<double>(cfg.total);
    const double u = 1.0 / static_cast<double>(dimension(cfg));
    double d = 0.0;
    for (const auto& e : cfg.entries) {
        const double diff = static_cast<double>(e.multiplicity) / M - u;
        d += diff * diff;
    }
    return d;
}

inline double complexity(const Configuration& cfg) { return normalizedEntropy(cfg) * disequilibrium(cfg); }

struct SenseMetrics {
    std::size_t dim = 0;
    double nuLog = 0.0;
    double prob = 0.0;  // ln P{A}
    double h = 0.0;
    double hNorm = 0.0;
    double diseq = 0.0;
    double complexity = 0.0;
};

/// All single-sense metrics at once. Requires dim >= 2.
inline SenseMetrics computeMetrics(const Configuration& cfg) {
    SenseMetrics m;
    m.dim = dimension(cfg);
    m.nuLog = homeomorphismLogCount(cfg);
    m.prob = partitionLogProb(cfg);
    m.h = entropy(cfg);
    m.hNorm = normalizedEntropy(cfg);
    m.diseq = disequilibrium(cfg);
    m.complexity = m.hNorm * m.diseq;
    return m;
}

} // namespace senses
