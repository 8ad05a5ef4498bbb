#pragma once

// Brute-force reference implementations used by the tests. Everything here is
// evaluated straight from the definitions over plain containers, with no
// code shared with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct Doc {
    std::string id;
    int year = 0;
    std::vector<std::string> keywords;  // already clean and distinct
    std::vector<std::string> refs;
};

struct Corpus {
    std::vector<Doc> docs;

    std::set<std::string> concepts() const {
        std::set<std::string> s;
        for (const auto& d : docs) s.insert(d.keywords.begin(), d.keywords.end());
        return s;
    }

    static bool has(const Doc& d, const std::string& c) {
        return std::find(d.keywords.begin(), d.keywords.end(), c) != d.keywords.end();
    }

    std::vector<std::size_t> orbit(const std::string& c) const {
        std::vector<std::size_t> o;
        for (std::size_t i = 0; i < docs.size(); ++i)
            if (has(docs[i], c)) o.push_back(i);
        return o;
    }

    /// concept -> number of orbit documents containing it
    std::map<std::string, double> configuration(const std::string& focal) const {
        std::map<std::string, double> m;
        for (auto i : orbit(focal))
            for (const auto& k : docs[i].keywords) m[k] += 1.0;
        return m;
    }
};

struct Metrics {
    double dim, nuLog, lnP, h, hn, d, c;
};

inline Metrics metrics(const std::vector<double>& ms) {
    Metrics r{};
    double M = 0;
    for (double m : ms) M += m;
    r.dim = static_cast<double>(ms.size());
    // nu = prod m^m, P = nu / M^M
    for (double m : ms) r.nuLog += m * std::log(m);
    r.lnP = r.nuLog - M * std::log(M);
    for (double m : ms) r.h -= (m / M) * std::log(m / M);
    r.hn = r.h / std::log(r.dim);
    for (double m : ms) r.d += std::pow(m / M - 1.0 / r.dim, 2);
    r.c = r.hn * r.d;
    return r;
}

inline Metrics metrics(const Corpus& c, const std::string& focal) {
    std::vector<double> ms;
    for (const auto& [_, m] : c.configuration(focal)) ms.push_back(m);
    return metrics(ms);
}

inline double pmi(const Corpus& c, const std::string& a, const std::string& b) {
    double na = 0, nb = 0, nab = 0, n = static_cast<double>(c.docs.size());
    for (const auto& d : c.docs) {
        const bool ha = Corpus::has(d, a), hb = Corpus::has(d, b);
        na += ha;
        nb += hb;
        nab += ha && hb;
    }
    return std::log((nab / n) / ((na / n) * (nb / n)));
}

inline std::set<std::string> neighbors(const Corpus& c, const std::string& a) {
    std::set<std::string> s;
    for (auto i : c.orbit(a))
        for (const auto& k : c.docs[i].keywords)
            if (k != a) s.insert(k);
    return s;
}

inline std::optional<double> transitivity(const Corpus& c, const std::string& a) {
    const auto nb = neighbors(c, a);
    if (nb.size() < 2) return std::nullopt;
    std::vector<std::string> v(nb.begin(), nb.end());
    double closed = 0, pairs = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            pairs += 1;
            closed += neighbors(c, v[i]).count(v[j]) ? 1 : 0;
        }
    return closed / pairs;
}

/// Per-year sum over neighbours of either the single (1,1) cell or the full
/// 2x2 indicator mutual information, then summed over years.
inline double tmi(const Corpus& c, const std::string& a, bool fullMi) {
    std::set<int> years;
    for (const auto& d : c.docs) years.insert(d.year);
    double total = 0;
    for (int t : years) {
        std::vector<const Doc*> slice;
        for (const auto& d : c.docs)
            if (d.year == t) slice.push_back(&d);
        const double n = static_cast<double>(slice.size());
        std::set<std::string> nb;
        for (auto* d : slice)
            if (Corpus::has(*d, a))
                for (const auto& k : d->keywords)
                    if (k != a) nb.insert(k);
        for (const auto& b : nb) {
            double joint[2][2] = {{0, 0}, {0, 0}};
            for (auto* d : slice) joint[Corpus::has(*d, a)][Corpus::has(*d, b)] += 1.0 / n;
            auto term = [&](int i, int j) {
                const double pij = joint[i][j];
                if (pij == 0) return 0.0;
                const double pi = joint[i][0] + joint[i][1];
                const double pj = joint[0][j] + joint[1][j];
                return pij * std::log(pij / (pi * pj));
            };
            total += fullMi ? term(0, 0) + term(0, 1) + term(1, 0) + term(1, 1) : term(1, 1);
        }
    }
    return total;
}

inline std::map<std::string, double> citationRates(const Corpus& c, int window) {
    std::map<std::string, double> r;
    for (const auto& k : c.concepts()) r[k] = 0;
    std::map<std::string, const Doc*> byId;
    for (const auto& d : c.docs) byId[d.id] = &d;
    for (const auto& z : c.docs) {
        std::set<std::string> refs(z.refs.begin(), z.refs.end());
        for (const auto& ref : refs) {
            auto it = byId.find(ref);
            if (it == byId.end()) continue;
            const Doc& y = *it->second;
            const int lag = z.year - y.year;
            if (lag < 0 || lag > window) continue;
            for (const auto& k : y.keywords) r[k] += 1.0 / static_cast<double>(y.keywords.size());
        }
    }
    return r;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

/// PageRank on a symmetric weight matrix from (I - dM) x = (1 - d)/n, where M
/// is column-stochastic and columns of isolated nodes are uniform.
inline std::vector<double> pagerank(const std::vector<std::vector<double>>& W, double d) {
    const std::size_t n = W.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += W[i][j];
        for (std::size_t i = 0; i < n; ++i) {
            const double m = s > 0 ? W[i][j] / s : 1.0 / static_cast<double>(n);
            A[i][j] = (i == j ? 1.0 : 0.0) - d * m;
        }
    }
    auto x = solve(A, std::vector<double>(n, (1.0 - d) / static_cast<double>(n)));
    double sum = 0;
    for (double v : x) sum += v;
    for (double& v : x) v /= sum;
    return x;
}

/// Newman modularity of a partition of a weighted undirected graph.
inline double modularity(const std::vector<std::vector<double>>& W, const std::vector<int>& part) {
    const std::size_t n = W.size();
    double m2 = 0;
    std::vector<double> k(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k[i] += W[i][j];
            m2 += W[i][j];
        }
    double q = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (part[i] == part[j]) q += W[i][j] - k[i] * k[j] / m2;
    return q / m2;
}

// ---------------------------------------------------------------------------
// Generators

inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t below(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

/// Random small corpus: every document has 2..k distinct keywords.
inline Corpus randomCorpus(std::mt19937_64& rng, std::size_t maxDocs = 12, std::size_t maxConcepts = 8,
                           int firstYear = 2000, int years = 4) {
    Corpus c;
    const std::size_t docs = 2 + below(rng, maxDocs - 1);
    const std::size_t concepts = 2 + below(rng, maxConcepts - 1);
    for (std::size_t i = 0; i < docs; ++i) {
        Doc d;
        d.id = "d" + std::to_string(i);
        d.year = firstYear + static_cast<int>(below(rng, static_cast<std::size_t>(years)));
        const std::size_t want = 2 + below(rng, std::min<std::size_t>(concepts, 5) - 1);
        while (d.keywords.size() < want) {
            const std::string k = "k" + std::to_string(below(rng, concepts));
            if (!Corpus::has(d, k)) d.keywords.push_back(k);
        }
        const std::size_t refs = below(rng, 3);
        for (std::size_t r = 0; r < refs && i > 0; ++r) d.refs.push_back("d" + std::to_string(below(rng, docs)));
        c.docs.push_back(std::move(d));
    }
    return c;
}

/// Fréchet(alpha, beta) draws by inverse transform.
inline std::vector<double> frechetSample(std::mt19937_64& rng, double alpha, double beta, std::size_t n) {
    std::vector<double> xs(n);
    for (auto& x : xs) {
        double u;
        do u = unit(rng);
        while (u <= 0.0);
        x = beta * std::pow(-std::log(u), -1.0 / alpha);
    }
    return xs;
}

/// Lomax(alpha, beta) draws by inverse transform of S(x) = (1 + x/beta)^-alpha.
inline std::vector<double> lomaxSample(std::mt19937_64& rng, double alpha, double beta, std::size_t n) {
    std::vector<double> xs(n);
    for (auto& x : xs) {
        double u;
        do u = unit(rng);
        while (u <= 0.0);
        x = beta * (std::pow(u, -1.0 / alpha) - 1.0);
    }
    return xs;
}

} // namespace oracle
