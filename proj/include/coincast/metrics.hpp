#pragma once

#include <cstddef>
#include <span>

namespace coincast {

struct MetricReport {
    double mape = 0.0; // percentage
    double rmse = 0.0; // price units
    std::size_t n = 0;
};

/// 100 * mean(|p_i - a_i| / |a_i|). Zero actual values are an error.
double mape(std::span<const double> predicted, std::span<const double> actual);

/// sqrt(mean((p_i - a_i)^2)).
double rmse(std::span<const double> predicted, std::span<const double> actual);

MetricReport evaluate_forecast(std::span<const double> predicted,
                               std::span<const double> actual);

} // namespace coincast
