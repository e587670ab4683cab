#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coincast/date.hpp"

namespace coincast {

/// One coin-day market candle. Prices are USD and must form a sane candle:
/// high >= low > 0 and open/close inside [low, high].
struct OhlcRecord {
    Date date;
    std::string coin; // lowercase ticker
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;

    bool operator==(const OhlcRecord&) const = default;
};

/// Throws coincast::Error describing the violated candle invariant.
/// `context` is prepended to the diagnostic (e.g. "row 17").
void validate_record(const OhlcRecord& rec, const std::string& context = {});

std::string to_lower(std::string s);

/// Dataset CSV: header Date,Open,High,Low,Close,Coin, one row per coin-day.
/// Leading '#' lines are metadata comments and are skipped on read.
void write_dataset(const std::vector<OhlcRecord>& records,
                   const std::filesystem::path& path,
                   const std::string& comment = {});

std::vector<OhlcRecord> read_dataset(const std::filesystem::path& path);

} // namespace coincast
