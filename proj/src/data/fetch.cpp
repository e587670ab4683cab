#include "coincast/fetch.hpp"

#include <algorithm>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"

namespace coincast {
namespace {

using nlohmann::json;

struct HttpTarget {
    std::string host_port; // scheme://host[:port]
    std::string prefix;    // path prefix, possibly empty
};

HttpTarget split_http(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

std::vector<OhlcRecord> fetch_one_http(const std::string& base, const std::string& coin,
                                       Date start, Date end) {
    const HttpTarget target = split_http(base);
    httplib::Client client(target.host_port);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    const std::string path = target.prefix + "/ohlc?coin=" + coin +
                             "&start=" + start.to_string() + "&end=" + end.to_string();
    const auto res = client.Get(path);
    if (!res) {
        throw Error("source unreachable: " + target.host_port + " (" +
                    httplib::to_string(res.error()) + ")");
    }
    if (res->status == 404) {
        throw Error("unknown ticker '" + coin + "' at source " + base);
    }
    if (res->status != 200) {
        throw Error("source returned status " + std::to_string(res->status) +
                    " for coin " + coin);
    }
    return parse_ohlc_payload(res->body, coin, base + path);
}

std::vector<OhlcRecord> fetch_one_fixture(const std::string& dir, const std::string& coin) {
    const std::filesystem::path path = std::filesystem::path(dir) / (coin + ".json");
    if (!std::filesystem::exists(path)) {
        throw Error("unknown ticker '" + coin + "': no payload at " + path.string());
    }
    return parse_ohlc_payload(read_file(path), coin, path.string());
}

} // namespace

SourceDescriptor parse_source(const std::string& text) {
    if (text.rfind("fixture:", 0) == 0) {
        const std::string dir = text.substr(8);
        if (dir.empty()) throw Error("fixture source needs a directory: fixture:<dir>");
        return {SourceDescriptor::Kind::fixture, dir};
    }
    if (text.rfind("http://", 0) == 0 || text.rfind("https://", 0) == 0) {
        return {SourceDescriptor::Kind::http, text};
    }
    throw Error("unrecognized source '" + text +
                "' (expected fixture:<dir> or http://host[:port][/prefix])");
}

std::vector<OhlcRecord> parse_ohlc_payload(const std::string& body,
                                           const std::string& coin,
                                           const std::string& context) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error("malformed payload from " + context + ": " + e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("candles")) {
            throw Error("payload missing 'candles'");
        }
        if (doc.contains("coin") && to_lower(doc["coin"].get<std::string>()) != coin) {
            throw Error("payload coin '" + doc["coin"].get<std::string>() +
                        "' does not match requested '" + coin + "'");
        }
        std::vector<OhlcRecord> records;
        for (const auto& item : doc["candles"]) {
            OhlcRecord rec;
            rec.coin = coin;
            rec.date = Date::parse(item.at("date").get<std::string>());
            rec.open = item.at("open").get<double>();
            rec.high = item.at("high").get<double>();
            rec.low = item.at("low").get<double>();
            rec.close = item.at("close").get<double>();
            validate_record(rec, context);
            records.push_back(std::move(rec));
        }
        return records;
    } catch (const json::exception& e) {
        throw Error("malformed payload from " + context + ": " + e.what());
    }
}

std::vector<OhlcRecord> fetch_ohlc(const std::vector<std::string>& coins, Date start,
                                   Date end, const SourceDescriptor& source) {
    if (coins.empty()) throw Error("coin list is empty");
    if (end < start) {
        throw Error("start date " + start.to_string() + " is after end date " +
                    end.to_string());
    }

    std::vector<OhlcRecord> out;
    for (const auto& raw : coins) {
        const std::string coin = to_lower(raw);
        auto records = source.kind == SourceDescriptor::Kind::http
                           ? fetch_one_http(source.location, coin, start, end)
                           : fetch_one_fixture(source.location, coin);
        records.erase(std::remove_if(records.begin(), records.end(),
                                     [&](const OhlcRecord& r) {
                                         return r.date < start || end < r.date;
                                     }),
                      records.end());
        if (records.empty()) {
            throw Error("no data for coin '" + coin + "' in window " +
                        start.to_string() + " .. " + end.to_string());
        }
        std::sort(records.begin(), records.end(),
                  [](const OhlcRecord& a, const OhlcRecord& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].date == records[i - 1].date) {
                throw Error("duplicate day " + records[i].date.to_string() +
                            " in payload for coin '" + coin + "'");
            }
        }
        out.insert(out.end(), records.begin(), records.end());
    }
    return out;
}

} // namespace coincast
