#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coincast/date.hpp"
#include "coincast/ohlc.hpp"

namespace coincast {

enum class PriceVariable {
    avg_ohlc, // (open + high + low + close) / 4
    close,
};

PriceVariable parse_price_variable(const std::string& name);
const char* price_variable_name(PriceVariable v);

/// Date-aligned matrix of one positive price per coin per day.
/// Dates strictly ascending, coins unique, no missing cells.
struct PriceMatrix {
    std::vector<Date> dates;
    std::vector<std::string> coins;
    std::vector<double> values; // row-major, dates.size() x coins.size()
    PriceVariable variable = PriceVariable::avg_ohlc;

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return coins.size(); }

    double at(std::size_t row, std::size_t col) const {
        return values[row * coins.size() + col];
    }
    double& at(std::size_t row, std::size_t col) {
        return values[row * coins.size() + col];
    }

    /// Index of `coin`; throws if absent.
    std::size_t coin_index(const std::string& coin) const;
    bool has_coin(const std::string& coin) const;

    std::vector<double> column(std::size_t col) const;
    std::vector<double> column(const std::string& coin) const;

    /// Consistency check of the type invariants; throws on violation.
    void validate() const;
};

struct ToMatrixResult {
    PriceMatrix matrix;
    std::vector<Date> dropped_dates; // dates absent from at least one coin
};

/// Builds the per-day price matrix from candle records. Dates are restricted
/// to those present for every coin (inner intersection); the dropped ones are
/// reported so callers can warn.
ToMatrixResult to_price_matrix(const std::vector<OhlcRecord>& records,
                               PriceVariable variable);

struct SplitPair {
    PriceMatrix train;
    PriceMatrix valid;
};

/// Chronological head/tail split. The validation set takes the trailing
/// floor(rows * valid_ratio) rows; no shuffling.
SplitPair chronological_split(const PriceMatrix& matrix, double train_ratio,
                              double valid_ratio);

/// Matrix CSV: optional '#' metadata lines, then header `Date,<coin>,...`,
/// then one row per day with full-precision prices.
void write_matrix_csv(const PriceMatrix& matrix, const std::filesystem::path& path,
                      const std::string& comment = {});

PriceMatrix read_matrix_csv(const std::filesystem::path& path);

} // namespace coincast
