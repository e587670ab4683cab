#include "coincast/price_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/numtext.hpp"

namespace coincast {

PriceVariable parse_price_variable(const std::string& name) {
    if (name == "avg_ohlc") return PriceVariable::avg_ohlc;
    if (name == "close") return PriceVariable::close;
    throw Error("unknown price variable '" + name + "' (expected avg_ohlc or close)");
}

const char* price_variable_name(PriceVariable v) {
    return v == PriceVariable::avg_ohlc ? "avg_ohlc" : "close";
}

std::size_t PriceMatrix::coin_index(const std::string& coin) const {
    const auto it = std::find(coins.begin(), coins.end(), coin);
    if (it == coins.end()) throw Error("coin not present in matrix: " + coin);
    return static_cast<std::size_t>(it - coins.begin());
}

bool PriceMatrix::has_coin(const std::string& coin) const {
    return std::find(coins.begin(), coins.end(), coin) != coins.end();
}

std::vector<double> PriceMatrix::column(std::size_t col) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, col);
    return out;
}

std::vector<double> PriceMatrix::column(const std::string& coin) const {
    return column(coin_index(coin));
}

void PriceMatrix::validate() const {
    if (values.size() != rows() * cols()) throw Error("price matrix shape mismatch");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw Error("price matrix dates not strictly ascending at " +
                        dates[i].to_string());
        }
    }
    std::set<std::string> seen;
    for (const auto& c : coins) {
        if (!seen.insert(c).second) throw Error("duplicate coin in matrix: " + c);
    }
    for (double v : values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error("price matrix contains a non-positive value");
        }
    }
}

ToMatrixResult to_price_matrix(const std::vector<OhlcRecord>& records,
                               PriceVariable variable) {
    if (records.empty()) throw Error("cannot build price matrix from no records");

    // Coins are ordered lexicographically so the matrix is independent of
    // record order.
    std::map<std::string, std::map<Date, double>> series;
    for (const auto& rec : records) {
        validate_record(rec);
        auto& by_date = series[rec.coin];
        const double price = variable == PriceVariable::avg_ohlc
                                 ? (rec.open + rec.high + rec.low + rec.close) / 4.0
                                 : rec.close;
        if (!by_date.emplace(rec.date, price).second) {
            throw Error("duplicate record for " + rec.coin + " on " +
                        rec.date.to_string());
        }
    }
    std::vector<std::string> coins;
    for (const auto& [coin, by_date] : series) coins.push_back(coin);

    // Inner intersection of dates across coins.
    std::map<Date, std::size_t> date_hits;
    for (const auto& [coin, by_date] : series) {
        for (const auto& [date, price] : by_date) ++date_hits[date];
    }
    ToMatrixResult result;
    result.matrix.variable = variable;
    result.matrix.coins = coins;
    for (const auto& [date, hits] : date_hits) {
        if (hits == coins.size()) {
            result.matrix.dates.push_back(date);
        } else {
            result.dropped_dates.push_back(date);
        }
    }
    if (result.matrix.dates.empty()) {
        throw Error("no common dates across coins; cannot build price matrix");
    }

    result.matrix.values.resize(result.matrix.rows() * coins.size());
    for (std::size_t c = 0; c < coins.size(); ++c) {
        const auto& by_date = series[coins[c]];
        for (std::size_t r = 0; r < result.matrix.rows(); ++r) {
            result.matrix.at(r, c) = by_date.at(result.matrix.dates[r]);
        }
    }
    result.matrix.validate();
    return result;
}

SplitPair chronological_split(const PriceMatrix& matrix, double train_ratio,
                              double valid_ratio) {
    if (!(train_ratio > 0.0) || !(valid_ratio > 0.0)) {
        throw Error("split ratios must both be positive");
    }
    if (std::fabs(train_ratio + valid_ratio - 1.0) > 1e-9) {
        throw Error("split ratios must sum to 1 (got " + format_double(train_ratio) +
                    " + " + format_double(valid_ratio) + ")");
    }
    const std::size_t n = matrix.rows();
    if (n < 2) throw Error("need at least 2 rows to split");

    const auto n_valid = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * valid_ratio));
    if (n_valid == 0 || n_valid >= n) {
        throw Error("split leaves an empty train or validation set");
    }
    const std::size_t n_train = n - n_valid;

    SplitPair pair;
    pair.train.variable = pair.valid.variable = matrix.variable;
    pair.train.coins = pair.valid.coins = matrix.coins;
    pair.train.dates.assign(matrix.dates.begin(),
                            matrix.dates.begin() + static_cast<std::ptrdiff_t>(n_train));
    pair.valid.dates.assign(matrix.dates.begin() + static_cast<std::ptrdiff_t>(n_train),
                            matrix.dates.end());
    pair.train.values.assign(matrix.values.begin(),
                             matrix.values.begin() +
                                 static_cast<std::ptrdiff_t>(n_train * matrix.cols()));
    pair.valid.values.assign(matrix.values.begin() +
                                 static_cast<std::ptrdiff_t>(n_train * matrix.cols()),
                             matrix.values.end());
    return pair;
}

void write_matrix_csv(const PriceMatrix& matrix, const std::filesystem::path& path,
                      const std::string& comment) {
    matrix.validate();
    atomic_write(path, [&](std::ostream& out) {
        if (!comment.empty()) out << "# " << comment << "\n";
        out << "# variable: " << price_variable_name(matrix.variable) << "\n";
        out << "Date";
        for (const auto& coin : matrix.coins) out << ',' << coin;
        out << "\n";
        for (std::size_t r = 0; r < matrix.rows(); ++r) {
            out << matrix.dates[r].to_string();
            for (std::size_t c = 0; c < matrix.cols(); ++c) {
                out << ',' << format_double(matrix.at(r, c));
            }
            out << "\n";
        }
    });
}

PriceMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open matrix csv: " + path.string());

    PriceMatrix matrix;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string tag = "# variable: ";
            if (line.rfind(tag, 0) == 0) {
                matrix.variable = parse_price_variable(line.substr(tag.size()));
            }
            continue;
        }
        std::vector<std::string> fields;
        {
            std::stringstream ss(line);
            std::string f;
            while (std::getline(ss, f, ',')) fields.push_back(f);
        }
        const std::string where = path.string() + " row " + std::to_string(line_no);
        if (!header_seen) {
            if (fields.empty() || fields[0] != "Date" || fields.size() < 2) {
                throw Error(where + ": expected header 'Date,<coin>,...'");
            }
            matrix.coins.assign(fields.begin() + 1, fields.end());
            header_seen = true;
            continue;
        }
        if (fields.size() != matrix.coins.size() + 1) {
            throw Error(where + ": expected " + std::to_string(matrix.coins.size() + 1) +
                        " fields, got " + std::to_string(fields.size()));
        }
        matrix.dates.push_back(Date::parse(fields[0]));
        for (std::size_t c = 0; c < matrix.coins.size(); ++c) {
            matrix.values.push_back(parse_double(fields[c + 1], where));
        }
    }
    if (!header_seen) throw Error(path.string() + ": missing matrix header");
    if (matrix.dates.empty()) throw Error(path.string() + ": matrix has no rows");
    matrix.validate();
    return matrix;
}

} // namespace coincast
