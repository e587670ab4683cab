#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coincast/date.hpp"
#include "coincast/ohlc.hpp"

namespace coincast {

/// One coin of a synthetic market: a base price level, its exposure to the
/// shared market factor, and idiosyncratic noise. Zero loading with small
/// noise gives a stablecoin-like series.
struct SyntheticCoin {
    std::string name;
    double base = 1.0;
    double factor_load = 0.0;
    double noise_sd = 0.001;
};

struct SyntheticSpec {
    std::uint64_t seed = 20230815;
    Date start = Date::from_ymd(2023, 8, 15);
    int days = 93;
    double factor_phi = 0.97; // AR(1) memory of the shared factor
    double factor_sd = 0.012;
    std::vector<SyntheticCoin> coins;
};

/// Demo market of one dominant coin, four correlated alt-coins and three
/// stablecoins; mirrors the shape of a typical top-of-market pull.
std::vector<SyntheticCoin> default_universe();

/// Deterministic OHLC history for the requested coins, ordered by coin then
/// date. Candle invariants hold by construction.
std::vector<OhlcRecord> make_synthetic_market(const SyntheticSpec& spec);

} // namespace coincast
