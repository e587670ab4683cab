#include "coincast/metrics.hpp"

#include <cmath>
#include <string>

#include "coincast/error.hpp"
#include "coincast/kernels.hpp"

namespace coincast {
namespace {

void check_lengths(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) {
        throw Error("metric length mismatch: " + std::to_string(predicted.size()) +
                    " predicted vs " + std::to_string(actual.size()) + " actual");
    }
    if (predicted.empty()) throw Error("metrics need at least one pair");
}

} // namespace

double mape(std::span<const double> predicted, std::span<const double> actual) {
    check_lengths(predicted, actual);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            throw Error("mape undefined: actual value at index " + std::to_string(i) +
                        " is zero");
        }
        acc += std::fabs(predicted[i] - actual[i]) / std::fabs(actual[i]);
    }
    return 100.0 * acc / static_cast<double>(actual.size());
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    check_lengths(predicted, actual);
    const double ss = kernels::sq_diff_sum(predicted.data(), actual.data(),
                                           predicted.size());
    return std::sqrt(ss / static_cast<double>(predicted.size()));
}

MetricReport evaluate_forecast(std::span<const double> predicted,
                               std::span<const double> actual) {
    return {mape(predicted, actual), rmse(predicted, actual), predicted.size()};
}

} // namespace coincast
