#include "coincast/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coincast/error.hpp"
#include "coincast/fileio.hpp"
#include "coincast/kernels.hpp"
#include "coincast/numtext.hpp"

namespace coincast {
namespace {

void check_pair_lengths(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error("series length mismatch: " + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
    }
    if (x.size() < 2) throw Error("need at least 2 points for a correlation");
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

} // namespace

CorrMethod parse_corr_method(const std::string& name) {
    if (name == "pearson") return CorrMethod::pearson;
    if (name == "kendall") return CorrMethod::kendall;
    if (name == "spearman") return CorrMethod::spearman;
    throw Error("unknown correlation method '" + name +
                "' (expected pearson, kendall or spearman)");
}

CorrWindow parse_corr_window(const std::string& name) {
    if (name == "daily") return CorrWindow::daily;
    if (name == "weekly") return CorrWindow::weekly;
    if (name == "monthly") return CorrWindow::monthly;
    throw Error("unknown correlation window '" + name +
                "' (expected daily, weekly or monthly)");
}

const char* corr_method_name(CorrMethod m) {
    switch (m) {
    case CorrMethod::pearson: return "pearson";
    case CorrMethod::kendall: return "kendall";
    case CorrMethod::spearman: return "spearman";
    }
    return "?";
}

const char* corr_window_name(CorrWindow w) {
    switch (w) {
    case CorrWindow::daily: return "daily";
    case CorrWindow::weekly: return "weekly";
    case CorrWindow::monthly: return "monthly";
    }
    return "?";
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair_lengths(x, y);
    const auto n = x.size();
    const double mx = kernels::sum(x.data(), n) / static_cast<double>(n);
    const double my = kernels::sum(y.data(), n) / static_cast<double>(n);
    std::vector<double> cx(n), cy(n);
    for (std::size_t i = 0; i < n; ++i) {
        cx[i] = x[i] - mx;
        cy[i] = y[i] - my;
    }
    const double sxx = kernels::dot(cx.data(), cx.data(), n);
    const double syy = kernels::dot(cy.data(), cy.data(), n);
    if (sxx == 0.0 || syy == 0.0) {
        throw Error("correlation undefined: constant series (zero variance)");
    }
    const double sxy = kernels::dot(cx.data(), cy.data(), n);
    return clamp_unit(sxy / std::sqrt(sxx * syy));
}

std::vector<double> average_ranks(std::span<const double> values) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Tied block [i, j] shares the average of ranks i+1 .. j+1.
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    check_pair_lengths(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
    check_pair_lengths(x, y);
    const auto n = x.size();
    // n1/n2 count every pair tied in x resp. y (both-tied pairs count in each).
    long long concordant = 0, discordant = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool tx = x[i] == x[j];
            const bool ty = y[i] == y[j];
            if (tx) ++n1;
            if (ty) ++n2;
            if (tx || ty) continue;
            if ((x[i] < x[j]) == (y[i] < y[j])) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const auto n0 = static_cast<long long>(n) * (static_cast<long long>(n) - 1) / 2;
    const double denom = std::sqrt(static_cast<double>(n0 - n1) *
                                   static_cast<double>(n0 - n2));
    if (denom == 0.0) {
        throw Error("kendall tau undefined: all pairs tied");
    }
    return clamp_unit(static_cast<double>(concordant - discordant) / denom);
}

PriceMatrix resample(const PriceMatrix& matrix, CorrWindow window) {
    if (matrix.rows() < 2) {
        throw Error("fewer than 2 rows; correlation undefined");
    }
    if (window == CorrWindow::daily) return matrix;

    // Bucket key per row; rows are date-ascending so buckets are contiguous.
    const auto key_of = [&](const Date& d) -> long {
        if (window == CorrWindow::weekly) {
            const auto [year, week] = d.iso_week();
            return static_cast<long>(year) * 100 + week;
        }
        return static_cast<long>(d.year()) * 100 + d.month();
    };

    PriceMatrix out;
    out.variable = matrix.variable;
    out.coins = matrix.coins;

    std::size_t row = 0;
    while (row < matrix.rows()) {
        const long key = key_of(matrix.dates[row]);
        std::size_t end = row + 1;
        while (end < matrix.rows() && key_of(matrix.dates[end]) == key) ++end;
        const auto count = static_cast<double>(end - row);
        out.dates.push_back(matrix.dates[end - 1]);
        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            double acc = 0.0;
            for (std::size_t r = row; r < end; ++r) acc += matrix.at(r, c);
            out.values.push_back(acc / count);
        }
        row = end;
    }
    if (out.rows() < 2) {
        throw Error(std::string("fewer than 2 rows after ") +
                    corr_window_name(window) + " resampling; correlation undefined");
    }
    return out;
}

CorrelationMatrix correlation_matrix(const PriceMatrix& matrix, CorrMethod method,
                                     CorrWindow window) {
    if (matrix.cols() < 2) throw Error("need at least 2 coins for a correlation matrix");
    const PriceMatrix sampled = resample(matrix, window);
    if (sampled.rows() < 2) throw Error("fewer than 2 rows; correlation undefined");

    const auto coef = [&](std::span<const double> x, std::span<const double> y) {
        switch (method) {
        case CorrMethod::pearson: return pearson(x, y);
        case CorrMethod::kendall: return kendall_tau_b(x, y);
        case CorrMethod::spearman: return spearman(x, y);
        }
        throw Error("unreachable correlation method");
    };

    const std::size_t k = sampled.cols();
    std::vector<std::vector<double>> columns(k);
    for (std::size_t c = 0; c < k; ++c) columns[c] = sampled.column(c);

    CorrelationMatrix out;
    out.coins = sampled.coins;
    out.method = method;
    out.window = window;
    out.values.assign(k * k, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double v = 0.0;
            try {
                v = coef(columns[i], columns[j]);
            } catch (const Error& e) {
                throw Error(std::string(e.what()) + " (pair " + out.coins[i] + "/" +
                            out.coins[j] + ")");
            }
            out.values[i * k + j] = v;
            out.values[j * k + i] = v;
        }
    }
    return out;
}

void write_correlations_csv(const CorrelationMatrix& matrix,
                            const std::filesystem::path& path,
                            const std::string& comment) {
    atomic_write(path, [&](std::ostream& out) {
        if (!comment.empty()) out << "# " << comment << "\n";
        const std::size_t k = matrix.coins.size();
        for (const auto& coin : matrix.coins) out << ',' << coin;
        out << "\n";
        for (std::size_t i = 0; i < k; ++i) {
            out << matrix.coins[i];
            for (std::size_t j = 0; j < k; ++j) {
                out << ',' << format_double(matrix.at(i, j), 9);
            }
            out << "\n";
        }
    });
}

} // namespace coincast
