#pragma once

#include <string>
#include <vector>

#include "coincast/date.hpp"
#include "coincast/ohlc.hpp"

namespace coincast {

/// Where daily OHLC payloads come from. Both kinds serve the same JSON
/// schema: {"coin": "...", "candles": [{"date","open","high","low","close"}]}.
///   http://host[:port][/prefix]  GET <prefix>/ohlc?coin=X&start=D&end=D
///   fixture:<dir>                reads <dir>/<coin>.json
struct SourceDescriptor {
    enum class Kind { http, fixture };
    Kind kind = Kind::fixture;
    std::string location;
};

/// Accepts "fixture:<dir>" or "http://...".
SourceDescriptor parse_source(const std::string& text);

/// One validated record per coin per day in [start, end], ordered by coin
/// (request order) then date ascending.
std::vector<OhlcRecord> fetch_ohlc(const std::vector<std::string>& coins, Date start,
                                   Date end, const SourceDescriptor& source);

/// Parses one per-coin payload document (shared by both source kinds).
std::vector<OhlcRecord> parse_ohlc_payload(const std::string& body,
                                           const std::string& coin,
                                           const std::string& context);

} // namespace coincast
