#pragma once

// Sense-intersection graph: two senses are adjacent when their orbits share
// at least one document. Pairwise and global quantities over it live here.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace senses {

struct SenseEdge {
    ConceptId a = 0;  // a < b
    ConceptId b = 0;
    std::uint32_t cooc = 0;
    double sim = 0.0;  // pointwise mutual information
};

namespace detail {

inline std::uint64_t pairKey(ConceptId a, ConceptId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

inline double pmi(double nab, double na, double nb, double n) { return std::log(nab * n / (na * nb)); }

/// Sorted (pair key, co-document count) list over the given documents.
inline std::vector<std::pair<std::uint64_t, std::uint32_t>> countPairs(const CorpusIndex& index,
                                                                       std::span<const DocIndex> docs,
                                                                       unsigned workers) {
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, docs.size()));
    std::vector<std::vector<std::uint64_t>> local(chunks);
    const std::size_t per = (docs.size() + chunks - 1) / chunks;
    parallelFor(chunks, workers, [&](std::size_t t) {
        auto& keys = local[t];
        const std::size_t end = std::min(docs.size(), (t + 1) * per);
        for (std::size_t i = t * per; i < end; ++i) {
            const auto& kw = index.document(docs[i]).keywords;
            for (std::size_t x = 0; x < kw.size(); ++x)
                for (std::size_t y = x + 1; y < kw.size(); ++y) keys.push_back(pairKey(kw[x], kw[y]));
        }
    });
    std::vector<std::uint64_t> all;
    for (auto& keys : local) all.insert(all.end(), keys.begin(), keys.end());
    std::sort(all.begin(), all.end());
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        out.emplace_back(all[i], static_cast<std::uint32_t>(j - i));
        i = j;
    }
    return out;
}

} // namespace detail

/// Weighted undirected graph over senses. Each edge is stored once with
/// a < b; adjacency lists are sorted by neighbor id.
class SenseGraph {
public:
    SenseGraph() = default;

    /// Builds from explicit edges. Used for synthetic graphs; `sim` is kept as given.
    static SenseGraph fromEdges(std::size_t nodeCount, std::vector<SenseEdge> edges) {
        SenseGraph g;
        g.nodeCount_ = nodeCount;
        for (auto& e : edges) {
            if (e.a == e.b) throw DataError("self-loop on node " + std::to_string(e.a));
            if (e.a >= nodeCount || e.b >= nodeCount) throw DataError("edge endpoint out of range");
            if (e.a > e.b) std::swap(e.a, e.b);
        }
        std::sort(edges.begin(), edges.end(),
                  [](const SenseEdge& x, const SenseEdge& y) { return std::pair(x.a, x.b) < std::pair(y.a, y.b); });
        for (std::size_t i = 1; i < edges.size(); ++i) {
            if (edges[i].a == edges[i - 1].a && edges[i].b == edges[i - 1].b)
                throw DataError("duplicate edge " + std::to_string(edges[i].a) + "-" + std::to_string(edges[i].b));
        }
        g.edges_ = std::move(edges);
        g.orbitSize_.assign(nodeCount, 0);
        g.buildAdjacency();
        return g;
    }

    static SenseGraph build(const CorpusIndex& index, const std::optional<YearRange>& range = std::nullopt,
                            unsigned workers = 1) {
        SenseGraph g;
        g.nodeCount_ = index.conceptCount();
        g.range_ = range;
        std::vector<DocIndex> docs;
        for (std::size_t d = 0; d < index.documentCount(); ++d) {
            if (!range || range->contains(index.document(static_cast<DocIndex>(d)).year))
                docs.push_back(static_cast<DocIndex>(d));
        }
        g.documents_ = docs.size();
        g.orbitSize_.assign(g.nodeCount_, 0);
        for (DocIndex d : docs)
            for (ConceptId c : index.document(d).keywords) ++g.orbitSize_[c];

        const double n = static_cast<double>(g.documents_);
        for (const auto& [key, count] : detail::countPairs(index, docs, workers)) {
            SenseEdge e;
            e.a = static_cast<ConceptId>(key >> 32);
            e.b = static_cast<ConceptId>(key & 0xffffffffu);
            e.cooc = count;
            e.sim = detail::pmi(count, g.orbitSize_[e.a], g.orbitSize_[e.b], n);
            g.edges_.push_back(e);
        }
        g.buildAdjacency();
        return g;
    }

    std::size_t nodeCount() const { return nodeCount_; }
    std::size_t edgeCount() const { return edges_.size(); }
    std::span<const SenseEdge> edges() const { return edges_; }
    const SenseEdge& edge(std::size_t e) const { return edges_[e]; }

    /// Documents inside the graph's year range.
    std::size_t documentCount() const { return documents_; }
    std::uint32_t orbitSize(ConceptId c) const { return orbitSize_.at(c); }
    const std::optional<YearRange>& range() const { return range_; }

    std::size_t degree(ConceptId c) const { return offsets_.at(c + 1) - offsets_[c]; }

    std::span<const ConceptId> neighbors(ConceptId c) const {
        return {neighbors_.data() + offsets_.at(c), degree(c)};
    }

    /// Edge indices parallel to neighbors(c).
    std::span<const std::uint32_t> incidentEdges(ConceptId c) const {
        return {edgeOf_.data() + offsets_.at(c), degree(c)};
    }

    std::optional<std::size_t> findEdge(ConceptId a, ConceptId b) const {
        if (a >= nodeCount_ || b >= nodeCount_) return std::nullopt;
        const auto nb = neighbors(a);
        const auto it = std::lower_bound(nb.begin(), nb.end(), b);
        if (it == nb.end() || *it != b) return std::nullopt;
        return edgeOf_[offsets_[a] + static_cast<std::size_t>(it - nb.begin())];
    }

    bool adjacent(ConceptId a, ConceptId b) const { return findEdge(a, b).has_value(); }

    std::uint32_t coocCount(ConceptId a, ConceptId b) const {
        const auto e = findEdge(a, b);
        return e ? edges_[*e].cooc : 0;
    }

    double similarity(ConceptId a, ConceptId b) const {
        const auto e = findEdge(a, b);
        if (!e) throw NoEdgeError("senses " + std::to_string(a) + " and " + std::to_string(b) + " do not co-occur");
        return edges_[*e].sim;
    }

    /// Connected components as a label per node, numbered by smallest member.
    std::vector<std::uint32_t> components() const {
        constexpr auto unset = static_cast<std::uint32_t>(-1);
        std::vector<std::uint32_t> comp(nodeCount_, unset);
        std::uint32_t next = 0;
        std::vector<ConceptId> stack;
        for (ConceptId s = 0; s < nodeCount_; ++s) {
            if (comp[s] != unset) continue;
            comp[s] = next;
            stack.push_back(s);
            while (!stack.empty()) {
                const ConceptId v = stack.back();
                stack.pop_back();
                for (ConceptId u : neighbors(v)) {
                    if (comp[u] == unset) {
                        comp[u] = next;
                        stack.push_back(u);
                    }
                }
            }
            ++next;
        }
        return comp;
    }

private:
    void buildAdjacency() {
        offsets_.assign(nodeCount_ + 1, 0);
        for (const auto& e : edges_) {
            ++offsets_[e.a + 1];
            ++offsets_[e.b + 1];
        }
        for (std::size_t i = 0; i < nodeCount_; ++i) offsets_[i + 1] += offsets_[i];
        neighbors_.assign(offsets_.back(), 0);
        edgeOf_.assign(offsets_.back(), 0);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            neighbors_[fill[e.a]] = e.b;
            edgeOf_[fill[e.a]++] = static_cast<std::uint32_t>(i);
            neighbors_[fill[e.b]] = e.a;
            edgeOf_[fill[e.b]++] = static_cast<std::uint32_t>(i);
        }
        std::vector<std::pair<ConceptId, std::uint32_t>> tmp;
        for (std::size_t v = 0; v < nodeCount_; ++v) {
            tmp.clear();
            for (std::size_t k = offsets_[v]; k < offsets_[v + 1]; ++k) tmp.emplace_back(neighbors_[k], edgeOf_[k]);
            std::sort(tmp.begin(), tmp.end());
            for (std::size_t k = 0; k < tmp.size(); ++k) {
                neighbors_[offsets_[v] + k] = tmp[k].first;
                edgeOf_[offsets_[v] + k] = tmp[k].second;
            }
        }
    }

    std::size_t nodeCount_ = 0;
    std::size_t documents_ = 0;
    std::optional<YearRange> range_;
    std::vector<SenseEdge> edges_;
    std::vector<std::uint32_t> orbitSize_;
    std::vector<std::size_t> offsets_;
    std::vector<ConceptId> neighbors_;
    std::vector<std::uint32_t> edgeOf_;
};

inline SenseGraph buildGraph(const CorpusIndex& index, const std::optional<YearRange>& range = std::nullopt,
                             unsigned workers = 1) {
    return SenseGraph::build(index, range, workers);
}

/// Pointwise mutual information of the document indicators of a and b,
/// evaluated from the orbits directly.
inline double similarity(const CorpusIndex& index, ConceptId a, ConceptId b,
                         const std::optional<YearRange>& range = std::nullopt) {
    const auto oa = index.orbit(a, range);
    const auto ob = index.orbit(b, range);
    std::vector<DocIndex> both;
    std::set_intersection(oa.begin(), oa.end(), ob.begin(), ob.end(), std::back_inserter(both));
    if (both.empty() || a == b)
        throw NoEdgeError("'" + index.label(a) + "' and '" + index.label(b) + "' have no common document");
    return detail::pmi(static_cast<double>(both.size()), static_cast<double>(oa.size()),
                       static_cast<double>(ob.size()), static_cast<double>(index.documentCount(range)));
}

// ---------------------------------------------------------------------------
// Trajectory mutual information

enum class TmiMode { pointwise, fullMi };

inline std::string_view toString(TmiMode m) { return m == TmiMode::pointwise ? "pointwise" : "full-mi"; }

inline TmiMode parseTmiMode(std::string_view s) {
    if (s == "pointwise") return TmiMode::pointwise;
    if (s == "full-mi") return TmiMode::fullMi;
    throw UsageError("unknown TMI mode '" + std::string(s) + "' (expected pointwise or full-mi)");
}

/// Information contribution of one co-occurring pair in one year slice of n
/// documents, given the counts of documents with a, with b, and with both.
inline double tmiPairTerm(TmiMode mode, std::uint64_t nab, std::uint64_t na, std::uint64_t nb, std::uint64_t n) {
    const double N = static_cast<double>(n);
    auto cell = [N](std::uint64_t nij, std::uint64_t ni, std::uint64_t nj) {
        if (nij == 0) return 0.0;
        const double c = static_cast<double>(nij);
        return c / N * std::log(c * N / (static_cast<double>(ni) * static_cast<double>(nj)));
    };
    if (mode == TmiMode::pointwise) return cell(nab, na, nb);
    const double mi = cell(nab, na, nb) + cell(na - nab, na, n - nb) + cell(nb - nab, n - na, nb) +
                      cell(n - na - nb + nab, n - na, n - nb);
    return std::max(0.0, mi);
}

struct TmiRecord {
    ConceptId sense = 0;
    double tmi = 0.0;
    TmiMode mode = TmiMode::pointwise;
    std::map<int, double> perYear;  // years in which the sense occurs
};

/// TMI of one sense, evaluated straight from the year slices.
inline TmiRecord trajectoryMutualInformation(const CorpusIndex& index, ConceptId a, std::span<const int> years,
                                             TmiMode mode) {
    TmiRecord rec;
    rec.sense = a;
    rec.mode = mode;
    std::vector<int> ys(years.begin(), years.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    for (int t : ys) {
        const auto slice = index.yearlySlice(t);
        std::map<ConceptId, std::uint64_t> withA;
        std::map<ConceptId, std::uint64_t> counts;
        std::uint64_t na = 0;
        for (DocIndex d : slice) {
            const auto& doc = index.document(d);
            const bool hasA = doc.mentions(a);
            na += hasA;
            for (ConceptId c : doc.keywords) {
                ++counts[c];
                if (hasA && c != a) ++withA[c];
            }
        }
        if (na == 0) continue;
        double sum = 0.0;
        for (const auto& [b, nab] : withA) sum += tmiPairTerm(mode, nab, na, counts[b], slice.size());
        rec.perYear[t] = sum;
    }
    if (rec.perYear.empty())
        throw DataError("sense '" + index.label(a) + "' does not occur in the requested years");
    for (const auto& [_, v] : rec.perYear) rec.tmi += v;
    return rec;
}

inline TmiRecord trajectoryMutualInformation(const CorpusIndex& index, ConceptId a, TmiMode mode) {
    const auto years = index.years();
    return trajectoryMutualInformation(index, a, years, mode);
}

/// TMI of every sense over `years`, computed from per-year pair counts.
/// Senses absent from every year get tmi 0 and an empty perYear map.
inline std::vector<TmiRecord> trajectoryMutualInformationAll(const CorpusIndex& index, std::span<const int> years,
                                                             TmiMode mode, unsigned workers = 1) {
    std::vector<int> ys(years.begin(), years.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    // per year: (concept, contribution) pairs in deterministic order
    std::vector<std::vector<std::pair<ConceptId, double>>> yearly(ys.size());
    parallelFor(ys.size(), workers, [&](std::size_t yi) {
        const auto slice = index.yearlySlice(ys[yi]);
        if (slice.empty()) return;
        std::map<ConceptId, std::uint64_t> counts;
        for (DocIndex d : slice)
            for (ConceptId c : index.document(d).keywords) ++counts[c];
        std::map<ConceptId, double> acc;
        for (const auto& [c, _] : counts) acc[c] = 0.0;
        for (const auto& [key, nab] : detail::countPairs(index, slice, 1)) {
            const auto a = static_cast<ConceptId>(key >> 32);
            const auto b = static_cast<ConceptId>(key & 0xffffffffu);
            const double term = tmiPairTerm(mode, nab, counts[a], counts[b], slice.size());
            acc[a] += term;
            acc[b] += term;
        }
        yearly[yi].assign(acc.begin(), acc.end());
    });

    std::vector<TmiRecord> out(index.conceptCount());
    for (ConceptId c = 0; c < out.size(); ++c) {
        out[c].sense = c;
        out[c].mode = mode;
    }
    for (std::size_t yi = 0; yi < ys.size(); ++yi)
        for (const auto& [c, v] : yearly[yi]) out[c].perYear[ys[yi]] = v;
    for (auto& rec : out)
        for (const auto& [_, v] : rec.perYear) rec.tmi += v;
    return out;
}

// ---------------------------------------------------------------------------
// Transitivity and PageRank

/// Local clustering coefficient; nullopt when degree < 2.
inline std::optional<double> transitivity(const SenseGraph& g, ConceptId a) {
    const auto nb = g.neighbors(a);
    const std::size_t k = nb.size();
    if (k < 2) return std::nullopt;
    std::uint64_t closed = 0;
    for (ConceptId u : nb) {
        const auto nu = g.neighbors(u);
        // count common neighbors of a and u by sorted merge
        auto i = nb.begin();
        auto j = nu.begin();
        while (i != nb.end() && j != nu.end()) {
            if (*i < *j) ++i;
            else if (*j < *i) ++j;
            else {
                ++closed;
                ++i;
                ++j;
            }
        }
    }
    closed /= 2;  // each closed pair seen from both ends
    return static_cast<double>(closed) / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-9;
    int maxIter = 200;
};

struct PageRankResult {
    std::vector<double> scores;
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration with each undirected edge taken as two directed edges of
/// weight `weights[e]`. Mass of nodes without edges is spread uniformly.
inline PageRankResult pagerank(const SenseGraph& g, std::span<const double> weights, const PageRankOptions& opt = {}) {
    const std::size_t n = g.nodeCount();
    if (n == 0) throw DataError("pagerank on an empty graph");
    if (weights.size() != g.edgeCount()) throw UsageError("pagerank: one weight per edge required");
    std::vector<double> strength(n, 0.0);
    for (std::size_t e = 0; e < g.edgeCount(); ++e) {
        if (!(weights[e] >= 0.0)) throw DataError("pagerank: negative edge weight");
        strength[g.edge(e).a] += weights[e];
        strength[g.edge(e).b] += weights[e];
    }
    const double d = opt.damping;
    const double invN = 1.0 / static_cast<double>(n);
    std::vector<double> x(n, invN), next(n);
    PageRankResult res;
    for (int it = 1; it <= opt.maxIter; ++it) {
        double dangling = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            if (strength[v] == 0.0) dangling += x[v];
        }
        const double base = (1.0 - d) * invN + d * dangling * invN;
        for (std::size_t v = 0; v < n; ++v) {
            double in = 0.0;
            const auto nb = g.neighbors(static_cast<ConceptId>(v));
            const auto inc = g.incidentEdges(static_cast<ConceptId>(v));
            for (std::size_t k = 0; k < nb.size(); ++k) in += x[nb[k]] * weights[inc[k]] / strength[nb[k]];
            next[v] = base + d * in;
        }
        double resid = 0.0;
        for (std::size_t v = 0; v < n; ++v) resid += std::abs(next[v] - x[v]);
        x.swap(next);
        res.iterations = it;
        res.residual = resid;
        // L1 distance to the fixed point is at most resid * d / (1 - d)
        if (resid * d < opt.tol * (1.0 - d)) {
            double sum = 0.0;
            for (double s : x) sum += s;
            for (double& s : x) s /= sum;
            res.scores = std::move(x);
            return res;
        }
    }
    throw NumericError("pagerank did not converge in " + std::to_string(opt.maxIter) +
                       " iterations (residual " + std::to_string(res.residual) + ")");
}

/// PageRank weighted by co-occurrence counts.
inline PageRankResult pagerank(const SenseGraph& g, const PageRankOptions& opt = {}) {
    std::vector<double> w;
    w.reserve(g.edgeCount());
    for (const auto& e : g.edges()) w.push_back(static_cast<double>(e.cooc));
    return pagerank(g, w, opt);
}

} // namespace senses
