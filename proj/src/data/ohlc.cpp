#include "coincast/ohlc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/numtext.hpp"

namespace coincast {
namespace {

const char* kDatasetHeader = "Date,Open,High,Low,Close,Coin";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

void validate_record(const OhlcRecord& rec, const std::string& context) {
    const auto fail = [&](const std::string& why) {
        std::string where = context.empty() ? std::string() : context + ": ";
        throw Error(where + "invalid candle for " + rec.coin + " on " +
                    rec.date.to_string() + ": " + why);
    };
    if (rec.coin.empty()) fail("empty coin ticker");
    if (!(rec.low > 0.0)) fail("low must be positive");
    if (!(rec.high >= rec.low)) fail("high < low");
    if (rec.open < rec.low || rec.open > rec.high) fail("open outside [low, high]");
    if (rec.close < rec.low || rec.close > rec.high) fail("close outside [low, high]");
}

void write_dataset(const std::vector<OhlcRecord>& records,
                   const std::filesystem::path& path, const std::string& comment) {
    if (records.empty()) throw Error("refusing to write empty dataset");
    atomic_write(path, [&](std::ostream& out) {
        if (!comment.empty()) out << "# " << comment << "\n";
        out << kDatasetHeader << "\n";
        for (const auto& r : records) {
            out << r.date.to_string() << ',' << format_double(r.open) << ','
                << format_double(r.high) << ',' << format_double(r.low) << ','
                << format_double(r.close) << ',' << r.coin << "\n";
        }
    });
}

std::vector<OhlcRecord> read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset: " + path.string());

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<OhlcRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kDatasetHeader) {
                throw Error(path.string() + ": expected header '" +
                            std::string(kDatasetHeader) + "', got '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        const std::string where = path.string() + " row " + std::to_string(line_no);
        if (fields.size() != 6) {
            throw Error(where + ": expected 6 fields, got " +
                        std::to_string(fields.size()));
        }
        OhlcRecord rec;
        rec.date = Date::parse(fields[0]);
        rec.open = parse_double(fields[1], where);
        rec.high = parse_double(fields[2], where);
        rec.low = parse_double(fields[3], where);
        rec.close = parse_double(fields[4], where);
        rec.coin = to_lower(fields[5]);
        validate_record(rec, where);
        records.push_back(std::move(rec));
    }
    if (!header_seen) throw Error(path.string() + ": missing dataset header");
    if (records.empty()) throw Error(path.string() + ": dataset has no rows");
    return records;
}

} // namespace coincast
