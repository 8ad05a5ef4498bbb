#pragma once

// Walktrap community detection (Pons & Latapy): agglomerative clustering on
// random-walk distances, cut at the merge step of maximal modularity.
// Connected components are clustered independently.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace senses {

enum class WeightMode { count, positivePmi };

inline std::string_view toString(WeightMode m) { return m == WeightMode::count ? "count" : "positive-pmi"; }

inline WeightMode parseWeightMode(std::string_view s) {
    if (s == "count") return WeightMode::count;
    if (s == "positive-pmi" || s == "positivePMI" || s == "ppmi") return WeightMode::positivePmi;
    throw UsageError("unknown weight mode '" + std::string(s) + "' (expected count or positive-pmi)");
}

/// Edge weights for clustering. positivePmi keeps max(sim, 0); zero-weight
/// edges are ignored by the clustering.
inline std::vector<double> clusteringWeights(const SenseGraph& g, WeightMode mode) {
    std::vector<double> w;
    w.reserve(g.edgeCount());
    for (const auto& e : g.edges())
        w.push_back(mode == WeightMode::count ? static_cast<double>(e.cooc) : std::max(0.0, e.sim));
    return w;
}

/// Newman modularity of `membership` on the weighted graph (no self-loops).
inline double modularity(const SenseGraph& g, std::span<const double> weights, std::span<const std::uint32_t> membership) {
    double total = 0.0;
    std::map<std::uint32_t, double> internal, strength;
    for (std::size_t e = 0; e < g.edgeCount(); ++e) {
        const auto& ed = g.edge(e);
        const double w = weights[e];
        if (w <= 0.0) continue;
        total += w;
        strength[membership[ed.a]] += w;
        strength[membership[ed.b]] += w;
        if (membership[ed.a] == membership[ed.b]) internal[membership[ed.a]] += w;
    }
    if (total == 0.0) return 0.0;
    double q = 0.0;
    for (const auto& [c, s] : strength) {
        const double frac = s / (2.0 * total);
        q += internal[c] / total - frac * frac;
    }
    return q;
}

struct WalktrapOptions {
    int steps = 4;
    unsigned workers = 1;
};

struct WalktrapResult {
    std::vector<std::uint32_t> membership;  // cluster id per node
    std::size_t clusterCount = 0;
    double modularity = 0.0;
};

namespace detail {

struct WalktrapMerge {
    std::uint32_t left = 0;
    std::uint32_t right = 0;
};

/// Clusters one connected component given as local adjacency lists.
/// Returns a local cluster representative per local vertex.
class WalktrapComponent {
public:
    WalktrapComponent(std::vector<std::vector<std::pair<std::uint32_t, double>>> adj, int steps)
        : adj_(std::move(adj)), n_(adj_.size()), steps_(steps) {}

    std::vector<std::uint32_t> run() {
        if (n_ == 1) return {0};
        init();
        std::vector<WalktrapMerge> merges;
        std::vector<double> q{q_};
        while (!heap_.empty()) {
            const auto [ds, c1, c2] = *heap_.begin();
            merges.push_back({c1, c2});
            merge(c1, c2);
            q.push_back(q_);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (q[i] > q[best] + 1e-12) best = i;

        // replay the first `best` merges
        std::vector<std::uint32_t> parent(n_ + merges.size());
        std::iota(parent.begin(), parent.end(), 0u);
        for (std::size_t i = 0; i < best; ++i) {
            const auto id = static_cast<std::uint32_t>(n_ + i);
            parent[merges[i].left] = id;
            parent[merges[i].right] = id;
        }
        std::vector<std::uint32_t> rep(n_);
        for (std::uint32_t v = 0; v < n_; ++v) {
            std::uint32_t r = v;
            while (parent[r] != r) r = parent[r];
            rep[v] = r;
        }
        return rep;
    }

private:
    struct Community {
        std::uint32_t size = 0;
        std::vector<double> prob;  // P_C^t
        std::map<std::uint32_t, double> links;  // neighbor community -> cross weight
        double internal = 0.0;
        double strength = 0.0;  // sum of original (loop-free) vertex strengths
        bool alive = false;
    };

    void init() {
        degree_.assign(n_, 0.0);
        std::vector<double> loop(n_, 0.0);
        for (std::size_t v = 0; v < n_; ++v) {
            double s = 0.0;
            for (const auto& [u, w] : adj_[v]) s += w;
            strengthOf_.push_back(s);
            total_ += s;
            // every vertex carries a self-loop weighted by its mean edge weight
            loop[v] = adj_[v].empty() ? 1.0 : s / static_cast<double>(adj_[v].size());
            degree_[v] = s + loop[v];
        }
        total_ /= 2.0;
        loop_ = std::move(loop);

        comms_.resize(2 * n_);
        for (std::uint32_t v = 0; v < n_; ++v) {
            auto& c = comms_[v];
            c.size = 1;
            c.alive = true;
            c.prob = walkFrom(v);
            c.strength = strengthOf_[v];
            for (const auto& [u, w] : adj_[v]) c.links[u] += w;
            const double frac = c.strength / (2.0 * total_);
            q_ -= frac * frac;
        }
        for (std::uint32_t v = 0; v < n_; ++v) {
            for (const auto& [u, _] : comms_[v].links) {
                if (v < u) push(v, u);
            }
        }
        next_ = static_cast<std::uint32_t>(n_);
    }

    std::vector<double> walkFrom(std::uint32_t start) const {
        std::vector<double> cur(n_, 0.0), nxt(n_);
        cur[start] = 1.0;
        for (int s = 0; s < steps_; ++s) {
            std::fill(nxt.begin(), nxt.end(), 0.0);
            for (std::uint32_t j = 0; j < n_; ++j) {
                if (cur[j] == 0.0) continue;
                const double out = cur[j] / degree_[j];
                nxt[j] += out * loop_[j];
                for (const auto& [k, w] : adj_[j]) nxt[k] += out * w;
            }
            cur.swap(nxt);
        }
        return cur;
    }

    double deltaSigma(std::uint32_t a, std::uint32_t b) const {
        const auto& pa = comms_[a].prob;
        const auto& pb = comms_[b].prob;
        double r2 = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            const double d = pa[k] - pb[k];
            r2 += d * d / degree_[k];
        }
        const double sa = comms_[a].size, sb = comms_[b].size;
        return sa * sb / (sa + sb) * r2 / static_cast<double>(n_);
    }

    void push(std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        const double ds = deltaSigma(a, b);
        heap_.emplace(ds, a, b);
        keyOf_[{a, b}] = ds;
    }

    void erase(std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        const auto it = keyOf_.find({a, b});
        if (it == keyOf_.end()) return;
        heap_.erase({it->second, a, b});
        keyOf_.erase(it);
    }

    void merge(std::uint32_t c1, std::uint32_t c2) {
        const std::uint32_t c3 = next_++;
        auto& a = comms_[c1];
        auto& b = comms_[c2];
        auto& m = comms_[c3];
        m.alive = true;
        m.size = a.size + b.size;
        m.prob.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) m.prob[k] = (a.size * a.prob[k] + b.size * b.prob[k]) / m.size;
        const double cross = a.links.at(c2);
        m.internal = a.internal + b.internal + cross;
        m.strength = a.strength + b.strength;
        auto term = [this](const Community& c) {
            const double frac = c.strength / (2.0 * total_);
            return c.internal / total_ - frac * frac;
        };
        q_ += term(m) - term(a) - term(b);

        for (const auto& [c, w] : a.links) {
            if (c == c2) continue;
            m.links[c] += w;
        }
        for (const auto& [c, w] : b.links) {
            if (c == c1) continue;
            m.links[c] += w;
        }
        for (const auto& [c, _] : a.links) erase(c1, c);
        for (const auto& [c, _] : b.links) erase(c2, c);
        for (const auto& [c, w] : m.links) {
            auto& other = comms_[c].links;
            other.erase(c1);
            other.erase(c2);
            other[c3] = w;
        }
        a.alive = b.alive = false;
        a.prob = {};
        b.prob = {};
        a.links.clear();
        b.links.clear();
        for (const auto& [c, _] : m.links) push(c, c3);
    }

    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj_;
    std::size_t n_;
    int steps_;
    std::vector<double> degree_, loop_, strengthOf_;
    double total_ = 0.0;
    double q_ = 0.0;
    std::vector<Community> comms_;
    std::uint32_t next_ = 0;
    std::set<std::tuple<double, std::uint32_t, std::uint32_t>> heap_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> keyOf_;
};

} // namespace detail

/// Walktrap over `weights` (one per edge; non-positive weights drop the edge).
/// Clusters are numbered by their smallest member node. Ties in the merge
/// order go to the lowest community ids, so the result is independent of
/// the worker count.
inline WalktrapResult walktrapClusters(const SenseGraph& g, std::span<const double> weights,
                                       const WalktrapOptions& opt = {}) {
    if (opt.steps < 1) throw UsageError("walktrap needs at least one step");
    if (weights.size() != g.edgeCount()) throw UsageError("walktrap: one weight per edge required");
    WalktrapResult res;
    const std::size_t n = g.nodeCount();
    if (n == 0) return res;

    // components of the positive-weight subgraph
    std::vector<std::uint32_t> root(n);
    std::iota(root.begin(), root.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t e = 0; e < g.edgeCount(); ++e) {
        if (weights[e] <= 0.0) continue;
        const auto ra = find(g.edge(e).a), rb = find(g.edge(e).b);
        if (ra != rb) root[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::uint32_t, std::vector<ConceptId>> byRoot;
    for (ConceptId v = 0; v < n; ++v) byRoot[find(v)].push_back(v);
    std::vector<std::vector<ConceptId>> comps;
    for (auto& [_, members] : byRoot) comps.push_back(std::move(members));

    std::vector<std::vector<std::uint32_t>> localRep(comps.size());
    parallelFor(comps.size(), opt.workers, [&](std::size_t ci) {
        const auto& members = comps[ci];
        std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(members.size());
        for (std::uint32_t i = 0; i < members.size(); ++i) {
            const auto nb = g.neighbors(members[i]);
            const auto inc = g.incidentEdges(members[i]);
            for (std::size_t k = 0; k < nb.size(); ++k) {
                const double w = weights[inc[k]];
                if (w <= 0.0) continue;
                const auto local = static_cast<std::uint32_t>(
                    std::lower_bound(members.begin(), members.end(), nb[k]) - members.begin());
                adj[i].emplace_back(local, w);
            }
        }
        localRep[ci] = detail::WalktrapComponent(std::move(adj), opt.steps).run();
    });

    // final labels ordered by smallest member
    std::map<std::pair<std::size_t, std::uint32_t>, ConceptId> minMember;
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        for (std::size_t i = 0; i < comps[ci].size(); ++i) {
            const auto key = std::pair(ci, localRep[ci][i]);
            const auto [it, inserted] = minMember.try_emplace(key, comps[ci][i]);
            if (!inserted) it->second = std::min(it->second, comps[ci][i]);
        }
    }
    std::vector<std::pair<ConceptId, std::pair<std::size_t, std::uint32_t>>> order;
    for (const auto& [key, mn] : minMember) order.emplace_back(mn, key);
    std::sort(order.begin(), order.end());
    std::map<std::pair<std::size_t, std::uint32_t>, std::uint32_t> label;
    for (std::size_t i = 0; i < order.size(); ++i) label[order[i].second] = static_cast<std::uint32_t>(i);

    res.membership.assign(n, 0);
    for (std::size_t ci = 0; ci < comps.size(); ++ci)
        for (std::size_t i = 0; i < comps[ci].size(); ++i)
            res.membership[comps[ci][i]] = label.at({ci, localRep[ci][i]});
    res.clusterCount = order.size();
    res.modularity = modularity(g, weights, res.membership);
    return res;
}

inline WalktrapResult walktrapClusters(const SenseGraph& g, WeightMode mode, const WalktrapOptions& opt = {}) {
    const auto w = clusteringWeights(g, mode);
    return walktrapClusters(g, w, opt);
}

} // namespace senses
