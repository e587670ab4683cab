#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "coincast/price_matrix.hpp"
#include "coincast/rng.hpp"
#include "coincast/synthetic.hpp"

namespace testsupport {

inline std::filesystem::path fixtures_dir() {
    return std::filesystem::path(COINCAST_FIXTURES);
}

inline std::string cli_binary() { return COINCAST_BIN; }

/// Fresh scratch directory under the build tree, wiped per call site.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        dir_ = std::filesystem::temp_directory_path() /
               ("coincast_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }
    std::filesystem::path operator/(const std::string& name) const { return dir_ / name; }

private:
    std::filesystem::path dir_;
};

/// Simple deterministic price matrix: value = base + row*step + col offset.
inline coincast::PriceMatrix
ramp_matrix(std::size_t rows, const std::vector<std::string>& coins, double base = 100.0,
            double step = 1.0) {
    coincast::PriceMatrix m;
    m.coins = coins;
    for (std::size_t r = 0; r < rows; ++r) {
        m.dates.push_back(coincast::Date::from_ymd(2023, 8, 15).plus_days(
            static_cast<std::int64_t>(r)));
        for (std::size_t c = 0; c < coins.size(); ++c) {
            m.values.push_back(base + static_cast<double>(r) * step +
                               10.0 * static_cast<double>(c));
        }
    }
    return m;
}

/// Random positive matrix for property tests.
inline coincast::PriceMatrix random_matrix(coincast::Rng& rng, std::size_t rows,
                                           const std::vector<std::string>& coins) {
    coincast::PriceMatrix m;
    m.coins = coins;
    for (std::size_t r = 0; r < rows; ++r) {
        m.dates.push_back(coincast::Date::from_ymd(2023, 1, 1).plus_days(
            static_cast<std::int64_t>(r)));
        for (std::size_t c = 0; c < coins.size(); ++c) {
            m.values.push_back(1.0 + 100.0 * rng.uniform());
        }
    }
    return m;
}

/// The synthetic split the golden fixture models were trained on; must stay
/// in lockstep with tools/fixturegen.cpp.
inline coincast::SplitPair golden_split() {
    coincast::SyntheticSpec spec;
    spec.seed = 777;
    spec.days = 60;
    spec.coins = coincast::default_universe();
    const auto records = coincast::make_synthetic_market(spec);
    const auto built = coincast::to_price_matrix(records, coincast::PriceVariable::avg_ohlc);
    return coincast::chronological_split(built.matrix, 0.8, 0.2);
}

} // namespace testsupport
