#include <doctest.h>

#include "petrocast/diagnostics.hpp"
#include "petrocast/snaive.hpp"
#include "support.hpp"

using namespace petrocast;
using testing_support::monthly;

namespace {

// A fit whose last observed cycle starts with `first_point` and whose residual
// sd is forced to `sd`.
SNaiveFit fixed_fit(double first_point, double sd) {
    Eigen::VectorXd y = testing_support::gaussian(36, 2, 50.0);
    y[24] = first_point;
    SNaiveFit fit = fit_snaive(monthly(y, MonthStamp(2019, 4)));
    fit.residual_sd = sd;
    return fit;
}

}  // namespace

TEST_SUITE("snaive") {

TEST_CASE("fitted values and residuals against a direct loop") {
    const Eigen::VectorXd y = testing_support::gaussian(36, 4, 10.0);
    const SNaiveFit fit = fit_snaive(monthly(y));
    REQUIRE(fit.residuals.size() == 24);
    double mean = 0.0;
    for (int t = 12; t < 36; ++t) {
        CHECK(fit.fitted[t - 12] == y[t - 12]);
        CHECK(fit.residuals[t - 12] == y[t] - y[t - 12]);
        mean += y[t] - y[t - 12];
    }
    mean /= 24.0;
    double ss = 0.0;
    for (int t = 12; t < 36; ++t)
        ss += (y[t] - y[t - 12] - mean) * (y[t] - y[t - 12] - mean);
    CHECK(fit.residual_sd == doctest::Approx(std::sqrt(ss / 23.0)).epsilon(1e-14));
}

TEST_CASE("periodic series has zero residual sd") {
    Eigen::VectorXd y(48);
    for (int t = 0; t < 48; ++t)
        y[t] = 100.0 + (t % 12) * 3.0;
    const SNaiveFit fit = fit_snaive(monthly(y));
    CHECK(fit.residual_sd == 0.0);
    const Forecast fc = forecast_snaive(fit, 24);
    for (const auto& [level, band] : fc.intervals) {
        CHECK(band.lower == fc.points);
        CHECK(band.upper == fc.points);
    }
}

TEST_CASE("too short") {
    CHECK_THROWS_AS(fit_snaive(monthly(Eigen::VectorXd::Ones(23))), Error);
}

TEST_CASE("interval arithmetic of the reference distillate listing") {
    const Forecast fc = forecast_snaive(fixed_fit(100.635, 194.6538), 24);
    CHECK(fc.points[0] == 100.635);
    CHECK(fc.stamp(0) == MonthStamp(2022, 4));
    const Band& b80 = fc.intervals.at(0.8);
    const Band& b95 = fc.intervals.at(0.95);
    CHECK(b80.lower[0] == doctest::Approx(-148.8239).epsilon(1e-3 / 148.8239));
    CHECK(b80.upper[0] == doctest::Approx(350.0939).epsilon(1e-3 / 350.0939));
    CHECK(b95.lower[0] == doctest::Approx(-280.8794).epsilon(1e-3 / 280.8794));
    CHECK(b95.upper[0] == doctest::Approx(482.1494).epsilon(1e-3 / 482.1494));
    CHECK(b80.lower[12] == doctest::Approx(-252.1531).epsilon(1e-3 / 252.1531));
}

TEST_CASE("propane interval arithmetic") {
    const Forecast fc = forecast_snaive(fixed_fit(-40.022, 19.2917), 1, {0.8});
    CHECK(fc.intervals.at(0.8).lower[0] == doctest::Approx(-64.7453).epsilon(1e-3 / 64.7453));
    CHECK(fc.intervals.at(0.8).upper[0] == doctest::Approx(-15.2987).epsilon(1e-3 / 15.2987));
}

TEST_CASE("forecast periodicity and step-shaped widths") {
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const SNaiveFit fit = fit_snaive(monthly(testing_support::gaussian(60, seed, 5.0)));
        const Forecast fc = forecast_snaive(fit, 48);
        fc.check_invariants();
        for (int h = 0; h + 12 < 48; ++h)
            CHECK(fc.points[h] == fc.points[h + 12]);
        const Band& b = fc.intervals.at(0.95);
        for (int h = 1; h < 48; ++h) {
            const double w0 = b.upper[h - 1] - b.lower[h - 1], w1 = b.upper[h] - b.lower[h];
            if (h % 12 == 0)
                CHECK(w1 > w0);
            else
                CHECK(w1 == doctest::Approx(w0).epsilon(1e-14));
        }
    }
}

TEST_CASE("levels default and validation") {
    const SNaiveFit fit = fit_snaive(monthly(testing_support::gaussian(30, 1)));
    const Forecast fc = forecast_snaive(fit, 3, {});
    CHECK(fc.intervals.size() == 2);
    CHECK(fc.intervals.count(0.8) == 1);
    CHECK(fc.intervals.count(0.95) == 1);
    CHECK_THROWS_AS(forecast_snaive(fit, 3, {1.5}), Error);
    CHECK_THROWS_AS(forecast_snaive(fit, 0), Error);
}

TEST_CASE("training MASE is exactly one") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Eigen::VectorXd y = (testing_support::gaussian(40 + seed, seed, 30.0).array() + 500.0).matrix();
        const TimeSeries ts = monthly(y);
        const SNaiveFit fit = fit_snaive(ts);
        const AccuracyMeasures a = accuracy(y.tail(fit.fitted.size()), fit.fitted, ts);
        CHECK(a.mase == 1.0);
    }
}

}
