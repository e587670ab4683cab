#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "coincast/price_matrix.hpp"

namespace coincast {

enum class CorrMethod { pearson, kendall, spearman };
enum class CorrWindow { daily, weekly, monthly };

CorrMethod parse_corr_method(const std::string& name);
CorrWindow parse_corr_window(const std::string& name);
const char* corr_method_name(CorrMethod m);
const char* corr_window_name(CorrWindow w);

/// Pearson product-moment coefficient, clamped to [-1, 1] against round-off.
/// Constant input is an error (zero variance).
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson applied to fractional (average) ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b with tie correction:
/// (C - D) / sqrt((n0 - n1) (n0 - n2)).
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

/// Average fractional ranks with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

/// daily: identity. weekly/monthly: one row per ISO week / calendar month,
/// cell = mean over the bucket, row date = last day present in the bucket.
PriceMatrix resample(const PriceMatrix& matrix, CorrWindow window);

struct CorrelationMatrix {
    std::vector<std::string> coins;
    CorrMethod method = CorrMethod::pearson;
    CorrWindow window = CorrWindow::daily;
    std::vector<double> values; // coins x coins, symmetric

    double at(std::size_t i, std::size_t j) const {
        return values[i * coins.size() + j];
    }
};

CorrelationMatrix correlation_matrix(const PriceMatrix& matrix, CorrMethod method,
                                     CorrWindow window);

/// Cross-table CSV: ticker header row and column, >= 6 significant digits.
void write_correlations_csv(const CorrelationMatrix& matrix,
                            const std::filesystem::path& path,
                            const std::string& comment = {});

} // namespace coincast
