#pragma once

// Maximum-likelihood fits of the Frechet and Pareto type II (Lomax) laws,
// with Kolmogorov-Smirnov distance to the fitted CDF.
//
// Frechet:  F(x) = exp(-(x/beta)^-alpha), x > 0
// Lomax:    S(x) = (1 + x/beta)^-alpha,  x >= 0
// In both, alpha is the shape and beta the scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <nlohmann/json.hpp>

#include "error.hpp"

namespace senses::evt {

enum class Family { frechet, paretoII };

inline std::string_view toString(Family f) { return f == Family::frechet ? "frechet" : "paretoII"; }

inline Family parseFamily(std::string_view s) {
    if (s == "frechet") return Family::frechet;
    if (s == "paretoII" || s == "pareto2" || s == "lomax") return Family::paretoII;
    throw UsageError("unknown distribution family '" + std::string(s) + "' (expected frechet or paretoII)");
}

struct FitResult {
    Family family = Family::frechet;
    double alpha = 0.0;  // shape
    double beta = 0.0;   // scale
    double logLikelihood = 0.0;
    double ksStat = 0.0;
    std::size_t n = 0;

    nlohmann::json toJson() const {
        return {{"family", toString(family)}, {"alpha", alpha}, {"beta", beta}, {"ks", ksStat},
                {"n", n}, {"loglik", logLikelihood},
                {"convention", family == Family::frechet ? "F(x)=exp(-(x/beta)^-alpha), alpha=shape, beta=scale"
                                                         : "S(x)=(1+x/beta)^-alpha, alpha=shape, beta=scale"}};
    }
};

inline double frechetCdf(double x, double alpha, double beta) {
    if (x <= 0.0) return 0.0;
    return std::exp(-std::pow(x / beta, -alpha));
}

inline double frechetPdf(double x, double alpha, double beta) {
    if (x <= 0.0) return 0.0;
    const double z = std::pow(x / beta, -alpha);
    return alpha / beta * std::pow(x / beta, -alpha - 1.0) * std::exp(-z);
}

inline double lomaxCdf(double x, double alpha, double beta) {
    if (x <= 0.0) return 0.0;
    return -std::expm1(-alpha * std::log1p(x / beta));
}

inline double lomaxPdf(double x, double alpha, double beta) {
    if (x < 0.0) return 0.0;
    return alpha / beta * std::exp(-(alpha + 1.0) * std::log1p(x / beta));
}

inline double frechetLogLikelihood(std::span<const double> xs, double alpha, double beta) {
    double ll = 0.0;
    for (double x : xs) {
        const double lz = std::log(x / beta);
        ll += std::log(alpha / beta) - (alpha + 1.0) * lz - std::exp(-alpha * lz);
    }
    return ll;
}

inline double lomaxLogLikelihood(std::span<const double> xs, double alpha, double beta) {
    double ll = 0.0;
    for (double x : xs) ll += std::log(alpha / beta) - (alpha + 1.0) * std::log1p(x / beta);
    return ll;
}

/// Kolmogorov-Smirnov distance between the sample's empirical CDF and `cdf`.
inline double ksStatistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw DataError("KS statistic of an empty sample");
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return std::min(1.0, d);
}

namespace detail {

inline void checkSample(std::span<const double> xs, bool allowZero) {
    if (xs.size() < 10) throw DataError("fit needs at least 10 values, got " + std::to_string(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (!std::isfinite(x) || x < 0.0 || (!allowZero && x == 0.0))
            throw DataError("invalid value at index " + std::to_string(i) + ": " + std::to_string(x) +
                            (allowZero ? " (must be >= 0)" : " (must be > 0)"));
    }
}

} // namespace detail

/// Frechet MLE. For a fixed shape the scale has the closed form
/// beta^alpha = n / sum x^-alpha; the shape solves the profile score
///   1/alpha - mean(ln x) + sum(w ln x) / sum(w) = 0,  w = x^-alpha,
/// which is strictly decreasing in alpha. Root found on ln(alpha).
inline FitResult fitFrechet(std::span<const double> sample) {
    detail::checkSample(sample, false);
    const std::size_t n = sample.size();
    std::vector<double> lx(n);
    std::transform(sample.begin(), sample.end(), lx.begin(), [](double x) { return std::log(x); });
    const double minLog = *std::min_element(lx.begin(), lx.end());
    const double meanLog = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(n);

    // weights rescaled by exp(alpha * minLog) so the largest is 1
    auto score = [&](double logAlpha) {
        const double a = std::exp(logAlpha);
        double sw = 0.0, swl = 0.0;
        for (double l : lx) {
            const double w = std::exp(-a * (l - minLog));
            sw += w;
            swl += w * l;
        }
        return 1.0 / a - meanLog + swl / sw;
    };

    double lo = std::log(1e-3), hi = std::log(1e3);
    double slo = score(lo), shi = score(hi);
    for (int k = 0; k < 60 && slo <= 0.0; ++k) slo = score(lo -= 2.0);
    for (int k = 0; k < 60 && shi >= 0.0; ++k) shi = score(hi += 2.0);
    if (!(slo > 0.0 && shi < 0.0)) {
        throw NumericError("frechet fit: shape not bracketed (ln alpha in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], score " + std::to_string(slo) + " .. " + std::to_string(shi) +
                           "); sample is degenerate");
    }
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        score, lo, hi, slo, shi, [](double a, double b) { return std::abs(b - a) < 1e-13; }, iters);
    const double logAlpha = 0.5 * (bracket.first + bracket.second);
    if (iters >= 200 || std::abs(score(logAlpha)) > 1e-8) {
        throw NumericError("frechet fit did not converge: bracket [" + std::to_string(bracket.first) + ", " +
                           std::to_string(bracket.second) + "] on ln alpha");
    }

    FitResult r;
    r.family = Family::frechet;
    r.n = n;
    r.alpha = std::exp(logAlpha);
    double sw = 0.0;
    for (double l : lx) sw += std::exp(-r.alpha * (l - minLog));
    // beta = (n / sum x^-alpha)^(1/alpha), computed in logs
    r.beta = std::exp(minLog + (std::log(static_cast<double>(n)) - std::log(sw)) / r.alpha);
    r.logLikelihood = frechetLogLikelihood(sample, r.alpha, r.beta);
    r.ksStat = ksStatistic(sample, [&](double x) { return frechetCdf(x, r.alpha, r.beta); });
    return r;
}

/// Lomax MLE. For a fixed scale the shape is n / sum ln(1 + x/beta); the
/// profile likelihood in ln(beta) is maximized by a grid scan followed by
/// Brent refinement. A light-tailed sample drives beta to the upper end of
/// the search range, where the law approaches an exponential; the boundary
/// estimate is returned in that case.
inline FitResult fitParetoII(std::span<const double> sample) {
    detail::checkSample(sample, true);
    const std::size_t n = sample.size();
    const double maxX = *std::max_element(sample.begin(), sample.end());
    if (maxX <= 0.0) throw DataError("pareto II fit: all values are zero");
    std::vector<double> pos;
    for (double x : sample)
        if (x > 0.0) pos.push_back(x);
    std::sort(pos.begin(), pos.end());
    const double small = pos.front();

    const double nn = static_cast<double>(n);
    auto sumLog = [&](double beta) {
        double s = 0.0;
        for (double x : sample) s += std::log1p(x / beta);
        return s;
    };
    auto negProfile = [&](double logBeta) {
        const double beta = std::exp(logBeta);
        const double L = sumLog(beta);
        return -(nn * std::log(nn / L) - nn * logBeta - nn - L);
    };

    const double lo = std::log(small) - std::log(1e6);
    const double hi = std::log(maxX) + std::log(1e8);
    constexpr int gridPoints = 241;
    const double step = (hi - lo) / (gridPoints - 1);
    int best = 0;
    double bestVal = std::numeric_limits<double>::infinity();
    for (int i = 0; i < gridPoints; ++i) {
        const double v = negProfile(lo + step * i);
        if (v < bestVal) {
            bestVal = v;
            best = i;
        }
    }
    const double a = lo + step * std::max(0, best - 1);
    const double b = lo + step * std::min(gridPoints - 1, best + 1);
    std::uintmax_t iters = 500;
    const auto [logBeta, val] = boost::math::tools::brent_find_minima(negProfile, a, b, 52, iters);
    if (iters >= 500 || !std::isfinite(val))
        throw NumericError("pareto II fit did not converge: bracket [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] on ln beta");

    FitResult r;
    r.family = Family::paretoII;
    r.n = n;
    r.beta = std::exp(logBeta);
    r.alpha = nn / sumLog(r.beta);
    r.logLikelihood = lomaxLogLikelihood(sample, r.alpha, r.beta);
    r.ksStat = ksStatistic(sample, [&](double x) { return lomaxCdf(x, r.alpha, r.beta); });
    return r;
}

inline FitResult fit(Family family, std::span<const double> sample) {
    return family == Family::frechet ? fitFrechet(sample) : fitParetoII(sample);
}

inline double fittedCdf(const FitResult& r, double x) {
    return r.family == Family::frechet ? frechetCdf(x, r.alpha, r.beta) : lomaxCdf(x, r.alpha, r.beta);
}

inline double fittedPdf(const FitResult& r, double x) {
    return r.family == Family::frechet ? frechetPdf(x, r.alpha, r.beta) : lomaxPdf(x, r.alpha, r.beta);
}

/// Inverse-CDF draws from uniforms in (0, 1).
inline double frechetQuantile(double u, double alpha, double beta) { return beta * std::pow(-std::log(u), -1.0 / alpha); }
inline double lomaxQuantile(double u, double alpha, double beta) { return beta * std::expm1(-std::log1p(-u) / alpha); }

} // namespace senses::evt
