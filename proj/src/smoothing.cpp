#include "coincast/smoothing.hpp"

#include <algorithm>

#include "coincast/error.hpp"

namespace coincast {

HoltModel holt_eval(std::span<const double> series, double alpha, double beta) {
    if (series.size() < 3) {
        throw Error("holt smoothing needs at least 3 observations, got " +
                    std::to_string(series.size()));
    }
    double level = series[0];
    double trend = series[1] - series[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double forecast = level + trend;
        const double err = series[t] - forecast;
        sse += err * err;
        const double prev_level = level;
        level = alpha * series[t] + (1.0 - alpha) * forecast;
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
    }
    return {alpha, beta, level, trend, sse};
}

HoltModel holt_fit(std::span<const double> series) {
    HoltModel best;
    bool have_best = false;
    for (int ai = 1; ai <= 19; ++ai) {
        for (int bi = 1; bi <= 19; ++bi) {
            const double alpha = static_cast<double>(ai) * 0.05;
            const double beta = static_cast<double>(bi) * 0.05;
            const HoltModel candidate = holt_eval(series, alpha, beta);
            if (!have_best || candidate.sse < best.sse) {
                best = candidate;
                have_best = true;
            }
        }
    }
    return best;
}

std::vector<double> holt_forecast(const HoltModel& model, int horizon, double floor) {
    if (horizon < 1) throw Error("forecast horizon must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (int k = 1; k <= horizon; ++k) {
        const double value = model.level + static_cast<double>(k) * model.trend;
        out[static_cast<std::size_t>(k - 1)] = std::max(value, floor);
    }
    return out;
}

PriceMatrix forecast_features(const PriceMatrix& valid,
                              const std::vector<std::string>& features,
                              int horizon) {
    if (horizon < 1) throw Error("forecast horizon must be >= 1");
    if (valid.rows() < 3) {
        throw Error("validation set too short to fit smoothing (" +
                    std::to_string(valid.rows()) + " rows)");
    }
    PriceMatrix out;
    out.variable = valid.variable;
    out.coins = features;
    const Date last = valid.dates.back();
    for (int k = 1; k <= horizon; ++k) out.dates.push_back(last.plus_days(k));
    out.values.assign(static_cast<std::size_t>(horizon) * features.size(), 0.0);

    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto series = valid.column(features[c]); // throws if missing
        const HoltModel model = holt_fit(series);
        const auto path = holt_forecast(model, horizon);
        for (int k = 0; k < horizon; ++k) {
            out.at(static_cast<std::size_t>(k), c) = path[static_cast<std::size_t>(k)];
        }
    }
    out.validate();
    return out;
}

} // namespace coincast
