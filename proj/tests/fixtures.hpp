#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "senses/corpus.hpp"

namespace fixtures {

inline senses::CleaningConfig keepAll() {
    senses::CleaningConfig c;
    c.blacklist.clear();
    return c;
}

inline std::vector<senses::RawRecord> records(const oracle::Corpus& c) {
    std::vector<senses::RawRecord> out;
    for (const auto& d : c.docs) {
        senses::RawRecord r;
        r.id = d.id;
        r.year = d.year;
        r.keywords = d.keywords;
        r.refs = d.refs;
        r.line = out.size() + 1;
        out.push_back(std::move(r));
    }
    return out;
}

inline senses::CorpusIndex index(const oracle::Corpus& c) {
    return senses::CorpusIndex::build(records(c), keepAll());
}

/// Documents given as keyword lists; ids d1, d2, ... and one shared year.
inline oracle::Corpus docs(std::initializer_list<std::vector<std::string>> kws, int year = 2000) {
    oracle::Corpus c;
    int i = 0;
    for (const auto& k : kws) c.docs.push_back({"d" + std::to_string(++i), year, k, {}});
    return c;
}

inline senses::ConceptId id(const senses::CorpusIndex& idx, const std::string& label) {
    return idx.find(label).value();
}

} // namespace fixtures
