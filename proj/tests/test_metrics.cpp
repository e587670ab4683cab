#include <doctest.h>

#include <cmath>
#include <vector>

#include "coincast/error.hpp"
#include "coincast/metrics.hpp"
#include "coincast/rng.hpp"

using namespace coincast;

namespace {

// Reference forecast/observation pairs: a 7-day btc horizon with known
// MAPE ~= 6.57% and RMSE ~= 2438.37, paired row-for-row.
const std::vector<double> kRefPredicted{34368.3, 34363.8, 34366.0, 34368.5,
                                        34365.5, 34368.4, 34364.3};
const std::vector<double> kRefReal{36878.7, 36341.8, 36570.9, 36974.1,
                                   37372.6, 36682.0, 36679.2};

} // namespace

TEST_CASE("reference pairs reproduce the published error levels") {
    CHECK(mape(kRefPredicted, kRefReal) == doctest::Approx(6.57).epsilon(0.01 / 6.57));
    CHECK(rmse(kRefPredicted, kRefReal) ==
          doctest::Approx(2438.37).epsilon(0.5 / 2438.37));
    const MetricReport report = evaluate_forecast(kRefPredicted, kRefReal);
    CHECK(report.n == 7);
    CHECK(report.mape == mape(kRefPredicted, kRefReal));
    CHECK(report.rmse == rmse(kRefPredicted, kRefReal));
}

TEST_CASE("degenerate values") {
    const std::vector<double> a{3.0, 4.0, 5.0};
    CHECK(mape(a, a) == 0.0);
    CHECK(rmse(a, a) == 0.0);
    const std::vector<double> p1{9.0}, a1{10.0};
    CHECK(mape(p1, a1) == doctest::Approx(10.0).epsilon(1e-12));
    const std::vector<double> p2{0.0, 0.0}, a2{3.0, 4.0};
    CHECK(rmse(p2, a2) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
}

TEST_CASE("error paths") {
    const std::vector<double> one{1.0}, zero{0.0}, two{1.0, 2.0}, empty;
    CHECK_THROWS_AS(static_cast<void>(mape(one, zero)), Error);
    CHECK_THROWS_AS(static_cast<void>(mape(two, one)), Error);
    CHECK_THROWS_AS(static_cast<void>(rmse(two, one)), Error);
    CHECK_THROWS_AS(static_cast<void>(rmse(empty, empty)), Error);
}

TEST_CASE("metric properties") {
    Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.bounded(20);
        std::vector<double> p(n), a(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.uniform(-100.0, 100.0);
            a[i] = rng.uniform(0.5, 100.0); // nonzero actuals
        }

        // rmse >= mean absolute error >= 0 (Jensen ordering).
        double mae = 0.0;
        for (std::size_t i = 0; i < n; ++i) mae += std::fabs(p[i] - a[i]);
        mae /= static_cast<double>(n);
        CHECK(rmse(p, a) >= mae - 1e-12);
        CHECK(mae >= 0.0);

        // Scale invariance of mape.
        const double k = 0.5 + 5.0 * rng.uniform();
        std::vector<double> kp(p), ka(a);
        for (auto& v : kp) v *= k;
        for (auto& v : ka) v *= k;
        CHECK(mape(kp, ka) == doctest::Approx(mape(p, a)).epsilon(1e-12));

        // Permutation invariance of both metrics (paired shuffle).
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);
        std::vector<double> pp(n), pa(n);
        for (std::size_t i = 0; i < n; ++i) {
            pp[i] = p[perm[i]];
            pa[i] = a[perm[i]];
        }
        CHECK(mape(pp, pa) == doctest::Approx(mape(p, a)).epsilon(1e-12));
        CHECK(rmse(pp, pa) == doctest::Approx(rmse(p, a)).epsilon(1e-12));
    }
}
