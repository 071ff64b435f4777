#include <doctest.h>

#include <random>

#include "petrocast/numerics.hpp"
#include "petrocast/sarima.hpp"
#include "petrocast/snaive.hpp"
#include "support.hpp"

using namespace petrocast;
using testing_support::monthly;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v[i++] = x;
    return v;
}

// Causal AR coefficients from partial autocorrelations (test-side Durbin-Levinson).
Eigen::VectorXd random_causal_ar(int p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.85, 0.85);
    Eigen::VectorXd phi(0);
    for (int k = 0; k < p; ++k) {
        const double r = u(rng);
        Eigen::VectorXd next(k + 1);
        for (int j = 0; j < k; ++j)
            next[j] = phi[j] - r * phi[k - 1 - j];
        next[k] = r;
        phi = next;
    }
    return phi;
}

// Power-series coefficients of num(B) / den(B), both given as full polynomials.
Eigen::VectorXd long_division(const Eigen::VectorXd& num, const Eigen::VectorXd& den, int count) {
    Eigen::VectorXd remainder = Eigen::VectorXd::Zero(count + den.size());
    remainder.head(std::min<Eigen::Index>(num.size(), remainder.size())) = num.head(std::min<Eigen::Index>(num.size(), remainder.size()));
    Eigen::VectorXd quotient(count);
    for (int j = 0; j < count; ++j) {
        quotient[j] = remainder[j] / den[0];
        for (Eigen::Index k = 0; k < den.size(); ++k)
            remainder[j + k] -= quotient[j] * den[k];
    }
    return quotient;
}

Eigen::VectorXd full_ar(const Eigen::VectorXd& phi) {
    Eigen::VectorXd out(phi.size() + 1);
    out << 1.0, -phi;
    return out;
}

Eigen::VectorXd full_ma(const Eigen::VectorXd& theta) {
    Eigen::VectorXd out(theta.size() + 1);
    out << 1.0, theta;
    return out;
}

double independent_kpss(const Eigen::VectorXd& x) {
    const std::size_t n = static_cast<std::size_t>(x.size());
    std::vector<double> e(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        mean += x[static_cast<Eigen::Index>(i)];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        e[i] = x[static_cast<Eigen::Index>(i)] - mean;
    const int l = static_cast<int>(4.0 * std::pow(n / 100.0, 0.25));
    double s2 = 0.0;
    for (double v : e)
        s2 += v * v;
    for (int s = 1; s <= l; ++s) {
        double c = 0.0;
        for (std::size_t t = static_cast<std::size_t>(s); t < n; ++t)
            c += e[t] * e[t - static_cast<std::size_t>(s)];
        s2 += 2.0 * (1.0 - s / (l + 1.0)) * c;
    }
    s2 /= static_cast<double>(n);
    double cum = 0.0, eta = 0.0;
    for (double v : e) {
        cum += v;
        eta += cum * cum;
    }
    return eta / (static_cast<double>(n) * static_cast<double>(n) * s2);
}

}  // namespace

TEST_SUITE("sarima") {

TEST_CASE("order parsing, labels and validation") {
    const SarimaOrder o = SarimaOrder::parse("0,1,2,2,1,1");
    CHECK(o == SarimaOrder{0, 1, 2, 2, 1, 1, 12});
    CHECK(o.label() == "ARIMA(0,1,2)(2,1,1)[12]");
    CHECK(SarimaOrder{1, 1, 1, 0, 0, 0, 12}.label() == "ARIMA(1,1,1)");
    CHECK_THROWS_AS(SarimaOrder::parse("1,1,1"), Error);
    CHECK_THROWS_AS(SarimaOrder::parse("1,x,1,0,0,0"), Error);
    CHECK_THROWS_AS(SarimaOrder::parse("0,2,0,0,2,0"), Error);
    CHECK_THROWS_AS((SarimaOrder{0, 0, 0, 1, 0, 0, 1}.validate()), Error);
}

TEST_CASE("polynomial expansion") {
    SarimaCoefficients c;
    c.ar = vec({0.5});
    ArmaPolynomials poly = expand_polynomials({1, 0, 0, 0, 0, 0, 12}, c);
    CHECK(poly.phi.size() == 1);
    CHECK(poly.phi[0] == 0.5);

    c.sar = vec({0.3});
    poly = expand_polynomials({1, 0, 0, 1, 0, 0, 12}, c);
    REQUIRE(poly.phi.size() == 13);
    for (int k = 1; k <= 13; ++k) {
        const double expected = k == 1 ? 0.5 : k == 12 ? 0.3 : k == 13 ? -0.15 : 0.0;
        CHECK(poly.phi[k - 1] == doctest::Approx(expected).epsilon(1e-15));
    }
    CHECK_THROWS_AS(expand_polynomials({2, 0, 0, 1, 0, 0, 12}, c), Error);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    std::uniform_int_distribution<int> k(0, 3), ks(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const SarimaOrder o{k(rng), 0, k(rng), ks(rng), 0, ks(rng), 4 + trial % 9};
        SarimaCoefficients r;
        auto draw = [&](int n) {
            Eigen::VectorXd v(n);
            for (int i = 0; i < n; ++i)
                v[i] = u(rng);
            return v;
        };
        r.ar = draw(o.p);
        r.ma = draw(o.q);
        r.sar = draw(o.P);
        r.sma = draw(o.Q);
        const ArmaPolynomials got = expand_polynomials(o, r);
        CHECK(got.phi.size() == o.p + o.m * o.P);
        CHECK(got.theta.size() == o.q + o.m * o.Q);

        Eigen::VectorXd seasonal_ar = Eigen::VectorXd::Zero(o.m * o.P + 1), seasonal_ma = Eigen::VectorXd::Zero(o.m * o.Q + 1);
        seasonal_ar[0] = seasonal_ma[0] = 1.0;
        for (int j = 0; j < o.P; ++j)
            seasonal_ar[(j + 1) * o.m] = -r.sar[j];
        for (int j = 0; j < o.Q; ++j)
            seasonal_ma[(j + 1) * o.m] = r.sma[j];
        const Eigen::VectorXd ar = testing_support::convolve(full_ar(r.ar), seasonal_ar);
        const Eigen::VectorXd ma = testing_support::convolve(full_ma(r.ma), seasonal_ma);
        CHECK((full_ar(got.phi) - ar).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((full_ma(got.theta) - ma).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((poly_multiply(ar, ma) - testing_support::convolve(ar, ma)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("causality") {
    CHECK(is_causal(vec({0.5})));
    CHECK_FALSE(is_causal(vec({1.2})));
    CHECK_FALSE(is_causal(vec({1.0})));
    CHECK(is_causal(vec({1.2, -0.5})));   // complex roots, modulus sqrt(2)
    CHECK_FALSE(is_causal(vec({0.5, 0.6})));  // root at 1/(1.0217...) inside the circle
    CHECK(is_causal(Eigen::VectorXd()));
}

TEST_CASE("psi weights agree with long division") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::VectorXd phi = random_causal_ar(trial % 4, rng);
        Eigen::VectorXd theta(trial % 3);
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            theta[i] = u(rng);
        const Eigen::VectorXd psi = psi_weights(phi, theta, 30);
        const Eigen::VectorXd oracle = long_division(full_ma(theta), full_ar(phi), 30);
        CHECK((psi - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kalman likelihood: closed forms") {
    const Eigen::VectorXd w = testing_support::gaussian(25, 8, 2.0);
    const KalmanResult wn = kalman_loglik(Eigen::VectorXd(), Eigen::VectorXd(), w);
    const double s2 = w.squaredNorm() / 25.0;
    CHECK(wn.sigma2 == doctest::Approx(s2).epsilon(1e-14));
    CHECK(wn.loglik == doctest::Approx(-12.5 * (std::log(2.0 * 3.141592653589793 * s2) + 1.0)).epsilon(1e-14));

    // AR(1), n = 10, Toeplitz covariance phi^|i-j| / (1 - phi^2)
    const double phi = 0.7;
    const Eigen::VectorXd x = testing_support::gaussian(10, 12);
    Eigen::VectorXd gamma(10);
    for (int k = 0; k < 10; ++k)
        gamma[k] = std::pow(phi, k) / (1.0 - phi * phi);
    CHECK(std::abs(kalman_loglik(vec({phi}), Eigen::VectorXd(), x).loglik - testing_support::dense_arma_loglik(gamma, x)) <
          1e-8);

    // MA(1), n = 8: gamma_0 = 1 + theta^2, gamma_1 = theta
    const double theta = -0.45;
    const Eigen::VectorXd y = testing_support::gaussian(8, 13);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(8);
    g[0] = 1.0 + theta * theta;
    g[1] = theta;
    CHECK(std::abs(kalman_loglik(Eigen::VectorXd(), vec({theta}), y).loglik - testing_support::dense_arma_loglik(g, y)) <
          1e-8);

    const KalmanResult bad = kalman_loglik(vec({1.1}), Eigen::VectorXd(), y);
    CHECK(bad.status == LikelihoodStatus::NonCausal);
    CHECK(bad.loglik == kNonCausalPenalty);
}

TEST_CASE("kalman likelihood matches dense multivariate normal on random ARMA") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    std::uniform_int_distribution<int> order(0, 2), length(3, 20);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd phi = random_causal_ar(order(rng), rng);
        Eigen::VectorXd theta(order(rng));
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            theta[i] = u(rng);
        const int n = length(rng);
        const Eigen::VectorXd w = testing_support::simulate_arma(phi, theta, n, 7000 + trial);
        const double oracle = testing_support::dense_arma_loglik(testing_support::arma_autocovariance(phi, theta, n), w);
        CHECK(std::abs(kalman_loglik(phi, theta, w).loglik - oracle) < 1e-8);
    }
}

TEST_CASE("ARMA(1,1) parameters are recovered") {
    const Eigen::VectorXd x = testing_support::simulate_arma(vec({0.6}), vec({0.3}), 1000, 314);
    const TimeSeries ts = monthly((x.array() + 10.0).matrix());
    const SarimaFit fit = fit_sarima(ts, {1, 0, 1, 0, 0, 0, 12});
    CHECK(fit.include_mean);
    CHECK(std::abs(fit.coefs.ar[0] - 0.6) < 0.08);
    CHECK(std::abs(fit.coefs.ma[0] - 0.3) < 0.08);
    CHECK(std::abs(fit.coefs.mean - 10.0) < 0.5);
    CHECK(fit.sigma2 == doctest::Approx(1.0).epsilon(0.1));
    CHECK(fit.std_errors.size() == 3);
    CHECK((fit.std_errors.array() > 0.0).all());
    CHECK(fit.std_errors[0] < 0.1);
    CHECK(fit.coefficient_names() == std::vector<std::string>{"ar1", "ma1", "mean"});
}

TEST_CASE("fit invariants") {
    const Eigen::VectorXd w = testing_support::simulate_arma(vec({0.4}), Eigen::VectorXd(), 200, 77);
    const TimeSeries ts = monthly(testing_support::integrate(testing_support::integrate(w, 12), 1));
    const SarimaOrder order{1, 1, 1, 0, 1, 1, 12};
    const SarimaFit fit = fit_sarima(ts, order);
    CHECK_FALSE(fit.include_mean);
    CHECK(fit.n_used() == ts.size() - 13);
    CHECK(fit.offset == 13);
    CHECK(fit.polynomials.phi.size() == 1);
    CHECK(fit.polynomials.theta.size() == 13);
    CHECK(fit.model_df() == 3);
    CHECK(fit.aic == doctest::Approx(-2.0 * fit.loglik + 2.0 * 4));
    const double n = static_cast<double>(fit.n_used());
    CHECK(fit.aicc == doctest::Approx(fit.aic + 2.0 * 4 * 5 / (n - 5)));
    CHECK(fit.bic == doctest::Approx(-2.0 * fit.loglik + 4 * std::log(n)));
    CHECK((fit.fitted + fit.residuals - ts.values().tail(fit.n_used())).cwiseAbs().maxCoeff() < 1e-9);

    const SarimaFit again = evaluate_sarima(ts, order, fit.coefs);
    CHECK(again.loglik == fit.loglik);
    CHECK(again.sigma2 == fit.sigma2);

    CHECK_THROWS_AS(fit_sarima(monthly(Eigen::VectorXd::LinSpaced(20, 0, 1)), order), Error);
}

TEST_CASE("differencing choices") {
    const TimeSeries noise = monthly(testing_support::gaussian(240, 1));
    CHECK(ndiffs(noise) == 0);
    CHECK(nsdiffs(noise) == 0);

    int ones = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Eigen::VectorXd rw = testing_support::integrate(testing_support::gaussian(499, seed), 1);
        CHECK(kpss_statistic(rw) == doctest::Approx(independent_kpss(rw)).epsilon(1e-12));
        ones += ndiffs(monthly(rw)) == 1;
    }
    CHECK(ones >= 17);

    Eigen::VectorXd seasonal(240);
    const Eigen::VectorXd e = testing_support::gaussian(240, 4);
    for (int t = 0; t < 240; ++t)
        seasonal[t] = 10.0 * std::sin(2.0 * 3.141592653589793 * t / 12.0) + e[t];
    CHECK(seasonal_strength(monthly(seasonal)) > kSeasonalStrengthThreshold);
    CHECK(nsdiffs(monthly(seasonal)) == 1);
    CHECK_THROWS_AS(nsdiffs(monthly(Eigen::VectorXd::Ones(30))), Error);
}

TEST_CASE("forecasts: closed forms") {
    // white noise with zero mean: flat zero forecast, constant bands
    const TimeSeries noise = monthly(testing_support::gaussian(100, 2));
    const SarimaOrder white{0, 0, 0, 0, 0, 0, 12};
    const Forecast wn = forecast_sarima(evaluate_sarima(noise, white, {}), 12);
    CHECK(wn.points.cwiseAbs().maxCoeff() == 0.0);
    for (int h = 1; h < 12; ++h)
        CHECK(wn.intervals.at(0.95).upper[h] == doctest::Approx(wn.intervals.at(0.95).upper[0]).epsilon(1e-14));

    // AR(1): v_h = sigma^2 (1 - phi^{2h}) / (1 - phi^2)
    const double phi = 0.8;
    const TimeSeries ar = monthly(testing_support::simulate_arma(vec({phi}), Eigen::VectorXd(), 150, 3));
    SarimaCoefficients c;
    c.ar = vec({phi});
    const SarimaFit fit = evaluate_sarima(ar, {1, 0, 0, 0, 0, 0, 12}, c);
    const Forecast fc = forecast_sarima(fit, 20, {0.8});
    const double z = normal_quantile(0.9);
    for (int h = 1; h <= 20; ++h) {
        const double v = fit.sigma2 * (1.0 - std::pow(phi, 2 * h)) / (1.0 - phi * phi);
        CHECK(fc.intervals.at(0.8).upper[h - 1] - fc.points[h - 1] == doctest::Approx(z * std::sqrt(v)).epsilon(1e-12));
        CHECK(fc.points[h - 1] == doctest::Approx(std::pow(phi, h) * ar[149]).epsilon(1e-10));
    }

    // random walk: last value, variance h sigma^2
    const TimeSeries rw = monthly(testing_support::integrate(testing_support::gaussian(99, 6), 1, 50.0));
    const SarimaFit rw_fit = evaluate_sarima(rw, {0, 1, 0, 0, 0, 0, 12}, {});
    const Forecast rwf = forecast_sarima(rw_fit, 10, {0.95});
    for (int h = 1; h <= 10; ++h) {
        CHECK(rwf.points[h - 1] == rw[99]);
        CHECK(rwf.intervals.at(0.95).upper[h - 1] - rwf.points[h - 1] ==
              doctest::Approx(normal_quantile(0.975) * std::sqrt(h * rw_fit.sigma2)).epsilon(1e-12));
    }

    // seasonal random walk reproduces seasonal naive point forecasts
    const TimeSeries srw = monthly(testing_support::integrate(testing_support::gaussian(60, 9), 12, 3.0));
    const Forecast a = forecast_sarima(evaluate_sarima(srw, {0, 0, 0, 0, 1, 0, 12}, {}), 30);
    const Forecast b = forecast_snaive(fit_snaive(srw), 30);
    CHECK((a.points - b.points).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forecast variance uses the integrated operator") {
    const Eigen::VectorXd w = testing_support::simulate_arma(vec({0.3}), vec({-0.4}), 150, 21);
    const TimeSeries ts = monthly(testing_support::integrate(testing_support::integrate(w, 12), 1));
    const SarimaOrder order{1, 1, 1, 0, 1, 1, 12};
    const SarimaFit fit = fit_sarima(ts, order);
    const Forecast fc = forecast_sarima(fit, 36, {0.8, 0.95});
    fc.check_invariants();

    Eigen::VectorXd delta = testing_support::convolve(vec({1.0, -1.0}), [] {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(13);
        s[0] = 1.0;
        s[12] = -1.0;
        return s;
    }());
    const Eigen::VectorXd den = testing_support::convolve(full_ar(fit.polynomials.phi), delta);
    const Eigen::VectorXd psi = long_division(full_ma(fit.polynomials.theta), den, 36);
    const double z = normal_quantile(0.9);
    double cumulative = 0.0, previous = 0.0;
    for (int h = 0; h < 36; ++h) {
        cumulative += psi[h] * psi[h];
        const double half = fc.intervals.at(0.8).upper[h] - fc.points[h];
        CHECK(half == doctest::Approx(z * std::sqrt(fit.sigma2 * cumulative)).epsilon(1e-10));
        CHECK(half >= previous);
        previous = half;
    }
}

TEST_CASE("one-step half-width from a reference variance") {
    const TimeSeries ts = monthly(testing_support::integrate(testing_support::gaussian(100, 1), 1));
    SarimaFit fit = evaluate_sarima(ts, {0, 1, 0, 0, 0, 0, 12}, {});
    fit.sigma2 = 19560.0;
    const Forecast fc = forecast_sarima(fit, 1, {0.8});
    const double half = fc.intervals.at(0.8).upper[0] - fc.points[0];
    CHECK(half == doctest::Approx(normal_quantile(0.9) * std::sqrt(19560.0)).epsilon(1e-14));
    CHECK(std::abs(half - (5155.786 - 4976.552)) < 0.01);
}

}
