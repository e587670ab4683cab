#pragma once

#include <span>
#include <string>
#include <vector>

#include "coincast/price_matrix.hpp"

namespace coincast {

/// Holt double exponential smoothing state after fitting: the final level
/// and per-day trend plus the one-step-ahead sum of squared errors.
struct HoltModel {
    double alpha = 0.0;
    double beta = 0.0;
    double level = 0.0;
    double trend = 0.0;
    double sse = 0.0;
};

/// Runs the Holt recursion at fixed (alpha, beta):
///   l_t = alpha*y_t + (1-alpha)*(l_{t-1} + b_{t-1})
///   b_t = beta*(l_t - l_{t-1}) + (1-beta)*b_{t-1}
/// with l_1 = y_1, b_1 = y_2 - y_1, and SSE over one-step forecasts from t=2.
HoltModel holt_eval(std::span<const double> series, double alpha, double beta);

/// Fits (alpha, beta) by exhaustive grid search on {0.05, 0.10, ..., 0.95}^2,
/// minimizing SSE; ties resolve to the smaller alpha, then smaller beta.
HoltModel holt_fit(std::span<const double> series);

/// k-step-ahead linear continuation level + k*trend, clamped below at
/// `floor` since prices are positive.
std::vector<double> holt_forecast(const HoltModel& model, int horizon,
                                  double floor = 1e-8);

/// Fits one Holt model per feature column of `valid` and extrapolates each
/// over the horizon. Output dates continue daily after the last valid date.
PriceMatrix forecast_features(const PriceMatrix& valid,
                              const std::vector<std::string>& features,
                              int horizon);

} // namespace coincast
