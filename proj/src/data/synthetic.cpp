#include "coincast/synthetic.hpp"

#include <cmath>

#include "coincast/error.hpp"
#include "coincast/rng.hpp"

namespace coincast {

std::vector<SyntheticCoin> default_universe() {
    return {
        {"btc", 30000.0, 1.00, 0.004},
        {"eth", 1800.0, 0.90, 0.005},
        {"usdt", 1.0002, 0.00, 0.0004},
        {"usdc", 0.9999, 0.00, 0.0004},
        {"xrp", 0.55, 0.80, 0.006},
        {"busd", 1.0001, 0.00, 0.0005},
        {"ada", 0.30, 0.85, 0.006},
        {"doge", 0.07, 1.10, 0.008},
    };
}

std::vector<OhlcRecord> make_synthetic_market(const SyntheticSpec& spec) {
    if (spec.days < 1) throw Error("synthetic market needs at least 1 day");
    if (spec.coins.empty()) throw Error("synthetic market needs at least 1 coin");

    const auto n = static_cast<std::size_t>(spec.days);

    // Shared market factor, one AR(1) path for the whole universe.
    std::vector<double> factor(n);
    {
        Rng rng(spec.seed);
        double s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            s = spec.factor_phi * s + spec.factor_sd * rng.normal();
            factor[t] = s;
        }
    }

    std::vector<OhlcRecord> records;
    records.reserve(n * spec.coins.size());
    for (std::size_t c = 0; c < spec.coins.size(); ++c) {
        const SyntheticCoin& coin = spec.coins[c];
        Rng rng(spec.seed * 1000003 + c + 1);

        double idio = 0.0;
        double prev_close = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            idio = 0.9 * idio + coin.noise_sd * rng.normal();
            const double close = coin.base * std::exp(coin.factor_load * factor[t] + idio);

            OhlcRecord rec;
            rec.coin = coin.name;
            rec.date = spec.start.plus_days(static_cast<std::int64_t>(t));
            rec.close = close;
            rec.open = t == 0 ? close * (1.0 + 0.002 * rng.normal()) : prev_close;
            const double spread = 0.003 * std::fabs(rng.normal());
            rec.high = std::max(rec.open, rec.close) * (1.0 + spread);
            rec.low = std::min(rec.open, rec.close) * (1.0 - spread);
            validate_record(rec);
            records.push_back(rec);
            prev_close = close;
        }
    }
    return records;
}

} // namespace coincast
