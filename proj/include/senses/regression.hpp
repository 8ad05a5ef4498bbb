#pragma once

// Least-squares regression family used for the figure models.
//
//   linear       y = b x + a                coefficients (b, a)
//   quadratic    y = c2 x^2 + c1 x + c0     coefficients (c2, c1, c0)
//   exponential  y = A exp(r x)             coefficients (A, r), fitted as ln y on x
//   loglogPower  ln y = b ln x + a          coefficients (b, a)
//   inverse      y = k / x + c              coefficients (k, c)
//
// R^2 and the overall F-test are evaluated on the fitted (transformed) scale.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "text.hpp"

namespace senses::evt {

enum class Model { linear, quadratic, exponential, loglogPower, inverse };

inline std::string_view toString(Model m) {
    switch (m) {
    case Model::linear: return "linear";
    case Model::quadratic: return "quadratic";
    case Model::exponential: return "exponential";
    case Model::loglogPower: return "loglogPower";
    case Model::inverse: return "inverse";
    }
    return "?";
}

inline Model parseModel(std::string_view s) {
    for (Model m : {Model::linear, Model::quadratic, Model::exponential, Model::loglogPower, Model::inverse})
        if (s == toString(m)) return m;
    throw UsageError("unknown regression model '" + std::string(s) + "'");
}

inline std::size_t arity(Model m) { return m == Model::quadratic ? 3 : 2; }

struct RegressionResult {
    Model model = Model::linear;
    std::vector<double> coefficients;
    double r2 = 0.0;
    double pValue = 1.0;
    double fStat = 0.0;
    std::size_t n = 0;

    double predict(double x) const {
        const auto& c = coefficients;
        switch (model) {
        case Model::linear: return c[0] * x + c[1];
        case Model::quadratic: return (c[0] * x + c[1]) * x + c[2];
        case Model::exponential: return c[0] * std::exp(c[1] * x);
        case Model::loglogPower: return std::exp(c[1]) * std::pow(x, c[0]);
        case Model::inverse: return c[0] / x + c[1];
        }
        return 0.0;
    }

    /// Caption-style equation, e.g. "y = 312.612*exp(0.087*x)".
    std::string equation(std::string_view y = "y", std::string_view x = "x") const {
        const auto f = [](double v) { return text::formatReal(v); };
        const auto& c = coefficients;
        std::string ys(y), xs(x);
        switch (model) {
        case Model::linear: return ys + " = " + f(c[0]) + "*" + xs + " + " + f(c[1]);
        case Model::quadratic: return ys + " = " + f(c[0]) + "*" + xs + "^2 + " + f(c[1]) + "*" + xs + " + " + f(c[2]);
        case Model::exponential: return ys + " = " + f(c[0]) + "*exp(" + f(c[1]) + "*" + xs + ")";
        case Model::loglogPower: return "ln " + ys + " = " + f(c[0]) + "*ln " + xs + " + " + f(c[1]);
        case Model::inverse: return ys + " = " + f(c[0]) + "*" + xs + "^-1 + " + f(c[1]);
        }
        return {};
    }

    /// p-values below 1e-3 are reported as the string "<1e-3".
    nlohmann::json toJson() const {
        nlohmann::json j{{"model", toString(model)}, {"coefficients", coefficients}, {"r2", r2},
                         {"f", fStat}, {"n", n}, {"equation", equation()}};
        if (pValue < 1e-3) j["p"] = "<1e-3";
        else j["p"] = pValue;
        return j;
    }
};

inline RegressionResult regress(Model model, std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw DataError("regression: x and y lengths differ");
    const std::size_t n = xs.size();
    const std::size_t k = arity(model);
    if (n < k + 1)
        throw DataError("regression (" + std::string(toString(model)) + ") needs at least " + std::to_string(k + 1) +
                        " points, got " + std::to_string(n));

    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < n; ++i) {
        const bool badX = (model == Model::loglogPower && !(xs[i] > 0.0)) || (model == Model::inverse && xs[i] == 0.0);
        const bool badY = (model == Model::loglogPower || model == Model::exponential) && !(ys[i] > 0.0);
        if (badX || badY || !std::isfinite(xs[i]) || !std::isfinite(ys[i])) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string list;
        for (std::size_t i = 0; i < bad.size() && i < 20; ++i) list += (i ? "," : "") + std::to_string(bad[i]);
        if (bad.size() > 20) list += ",...";
        throw DataError("regression (" + std::string(toString(model)) + "): invalid values at indices " + list);
    }

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs[i], y = ys[i];
        switch (model) {
        case Model::linear: X.row(i) << x, 1.0; Y(i) = y; break;
        case Model::quadratic: X.row(i) << x * x, x, 1.0; Y(i) = y; break;
        case Model::exponential: X.row(i) << x, 1.0; Y(i) = std::log(y); break;
        case Model::loglogPower: X.row(i) << std::log(x), 1.0; Y(i) = std::log(y); break;
        case Model::inverse: X.row(i) << 1.0 / x, 1.0; Y(i) = y; break;
        }
    }
    // column scaling keeps the quadratic design well conditioned
    Eigen::VectorXd scale(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double m = X.col(j).cwiseAbs().maxCoeff();
        scale(j) = m > 0.0 ? m : 1.0;
        X.col(j) /= scale(j);
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y).cwiseQuotient(scale);
    for (std::size_t j = 0; j < k; ++j) X.col(j) *= scale(j);

    const Eigen::VectorXd resid = Y - X * beta;
    const double ssRes = resid.squaredNorm();
    const double ssTot = (Y.array() - Y.mean()).matrix().squaredNorm();

    RegressionResult r;
    r.model = model;
    r.n = n;
    r.r2 = ssTot > 0.0 ? std::clamp(1.0 - ssRes / ssTot, 0.0, 1.0) : (ssRes == 0.0 ? 1.0 : 0.0);
    if (model == Model::exponential) r.coefficients = {std::exp(beta(1)), beta(0)};
    else r.coefficients.assign(beta.data(), beta.data() + k);

    const double df1 = static_cast<double>(k - 1);
    const double df2 = static_cast<double>(n - k);
    if (r.r2 >= 1.0) {
        r.fStat = std::numeric_limits<double>::infinity();
        r.pValue = 0.0;
    } else {
        r.fStat = (r.r2 / df1) / ((1.0 - r.r2) / df2);
        r.pValue = boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), r.fStat));
    }
    return r;
}

} // namespace senses::evt
