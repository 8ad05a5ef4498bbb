#pragma once

// Seeded synthetic corpora for demos, benchmarks and end-to-end tests.
// Keywords follow a preferential-attachment process with a steady inflow of
// new concepts; documents cite a few earlier documents.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace senses::synth {

struct SynthOptions {
    std::size_t documents = 1000;
    int firstYear = 1990;
    int years = 25;
    double growth = 0.08;        // per-year growth of the document rate
    double newConceptProb = 0.12;
    std::size_t minKeywords = 2;
    std::size_t maxKeywords = 7;
    std::size_t maxRefs = 4;
    std::uint64_t seed = 0;
};

namespace detail {

// mt19937_64 output is specified by the standard; the std distributions are
// not, so draws are built from raw words to stay identical across platforms.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t below(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

} // namespace detail

inline std::vector<RawRecord> generateCorpus(const SynthOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    std::vector<double> yearWeight(static_cast<std::size_t>(opt.years));
    double total = 0.0;
    for (int i = 0; i < opt.years; ++i) total += yearWeight[i] = std::exp(opt.growth * i);

    std::vector<RawRecord> out;
    out.reserve(opt.documents);
    std::vector<std::uint32_t> urn;  // one entry per past mention
    std::uint32_t concepts = 0;
    std::size_t made = 0;
    for (int i = 0; i < opt.years; ++i) {
        std::size_t quota = static_cast<std::size_t>(std::llround(yearWeight[i] / total * opt.documents));
        if (i + 1 == opt.years || made + quota > opt.documents) quota = opt.documents - made;
        const std::size_t firstOfYear = out.size();
        for (std::size_t k = 0; k < quota; ++k, ++made) {
            RawRecord r;
            r.id = "d" + std::to_string(made);
            r.year = opt.firstYear + i;
            const std::size_t want = opt.minKeywords + detail::below(rng, opt.maxKeywords - opt.minKeywords + 1);
            std::vector<std::uint32_t> picked;
            for (std::size_t guard = 0; picked.size() < want && guard < 20 * want; ++guard) {
                std::uint32_t c;
                if (urn.empty() || concepts < 2 || detail::unit(rng) < opt.newConceptProb) c = concepts++;
                else c = urn[detail::below(rng, urn.size())];
                if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
            }
            for (auto c : picked) {
                r.keywords.push_back("concept " + std::to_string(c));
                urn.push_back(c);
            }
            if (firstOfYear > 0) {
                const std::size_t refs = detail::below(rng, opt.maxRefs + 1);
                for (std::size_t j = 0; j < refs; ++j) r.refs.push_back(out[detail::below(rng, firstOfYear)].id);
            }
            r.line = out.size() + 1;
            out.push_back(std::move(r));
        }
    }
    return out;
}

/// JSONL text of a record list, in the ingest input format.
inline std::string toJsonl(const std::vector<RawRecord>& records) {
    std::string s;
    for (const auto& r : records) {
        nlohmann::json j{{"id", r.id}, {"year", r.year}, {"keywords", r.keywords}, {"refs", r.refs}};
        s += j.dump();
        s += '\n';
    }
    return s;
}

} // namespace senses::synth
