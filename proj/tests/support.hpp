#pragma once

// Seeded simulators and brute-force reference implementations shared by the
// unit and acceptance suites. Nothing here calls into the library's own
// recursions, so agreement with it is meaningful.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "petrocast/core.hpp"

namespace testing_support {

using petrocast::MonthStamp;
using petrocast::TimeSeries;

inline TimeSeries monthly(const Eigen::VectorXd& values, MonthStamp start = MonthStamp(2000, 1)) {
    return TimeSeries(start, values, 12);
}

inline Eigen::VectorXd gaussian(Eigen::Index n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = z(rng);
    return out;
}

// Full lag polynomials (entry 0 = 1); naive double loop.
inline Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

// x_t = sum phi_i x_{t-i} + e_t + sum theta_j e_{t-j}, with a burn-in.
inline Eigen::VectorXd simulate_arma(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, Eigen::Index n,
                                     std::uint64_t seed, double sd = 1.0, Eigen::Index burn = 500) {
    const Eigen::VectorXd e = gaussian(n + burn, seed, sd);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n + burn);
    for (Eigen::Index t = 0; t < n + burn; ++t) {
        double v = e[t];
        for (Eigen::Index i = 0; i < phi.size(); ++i)
            if (t - i - 1 >= 0)
                v += phi[i] * x[t - i - 1];
        for (Eigen::Index j = 0; j < theta.size(); ++j)
            if (t - j - 1 >= 0)
                v += theta[j] * e[t - j - 1];
        x[t] = v;
    }
    return x.tail(n);
}

// Undo `lag` differencing with zero anchors.
inline Eigen::VectorXd integrate(const Eigen::VectorXd& w, int lag, double anchor = 0.0) {
    Eigen::VectorXd y(w.size() + lag);
    y.head(lag).setConstant(anchor);
    for (Eigen::Index t = 0; t < w.size(); ++t)
        y[t + lag] = y[t] + w[t];
    return y;
}

// Autocovariances gamma_0..gamma_{n-1} of a causal ARMA with unit innovation
// variance, from a long truncated MA(infinity) sum.
inline Eigen::VectorXd arma_autocovariance(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, Eigen::Index n,
                                           Eigen::Index terms = 20000) {
    std::vector<double> psi(static_cast<std::size_t>(terms), 0.0);
    for (Eigen::Index j = 0; j < terms; ++j) {
        double v = j == 0 ? 1.0 : (j - 1 < theta.size() ? theta[j - 1] : 0.0);
        for (Eigen::Index i = 0; i < phi.size() && i < j; ++i)
            v += phi[i] * psi[static_cast<std::size_t>(j - i - 1)];
        psi[static_cast<std::size_t>(j)] = v;
    }
    Eigen::VectorXd gamma(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j + k < terms; ++j)
            s += psi[static_cast<std::size_t>(j)] * psi[static_cast<std::size_t>(j + k)];
        gamma[k] = s;
    }
    return gamma;
}

// Concentrated Gaussian log-likelihood from the dense Toeplitz covariance.
inline double dense_arma_loglik(const Eigen::VectorXd& gamma, const Eigen::VectorXd& w) {
    const Eigen::Index n = w.size();
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            cov(i, j) = gamma[std::abs(i - j)];
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const double quad = w.dot(llt.solve(w));
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double nd = static_cast<double>(n);
    const double sigma2 = quad / nd;
    return -0.5 * (nd * std::log(2.0 * std::numbers::pi * sigma2) + logdet + nd);
}

// ETS(A|M,N,N|A) log-likelihood with every state materialised in a table.
// seasonal_init[j] = s_{-j} for j = 0..m-1.
inline double ets_table_loglik(bool multiplicative, int m, double alpha, double gamma, double level0,
                               const Eigen::VectorXd& seasonal_init, const Eigen::VectorXd& y) {
    const Eigen::Index n = y.size();
    std::vector<double> level(static_cast<std::size_t>(n + 1));
    std::vector<double> season(static_cast<std::size_t>(n + m));  // season[t + m - 1] = s_t
    level[0] = level0;
    for (int j = 0; j < m; ++j)
        season[static_cast<std::size_t>(m - 1 - j)] = seasonal_init[j];
    double sse = 0.0, log_mu = 0.0;
    for (Eigen::Index t = 1; t <= n; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const double s_prev = m > 0 ? season[ti - 1] : 0.0;  // s_{t-m}
        const double mu = level[ti - 1] + s_prev;
        const double e = y[t - 1] - mu;
        sse += multiplicative ? (e / mu) * (e / mu) : e * e;
        if (multiplicative)
            log_mu += std::log(std::abs(mu));
        level[ti] = level[ti - 1] + alpha * e;
        if (m > 0)
            season[ti + static_cast<std::size_t>(m) - 1] = s_prev + gamma * e;
    }
    const double nd = static_cast<double>(n);
    return -0.5 * nd * (1.0 + std::log(2.0 * std::numbers::pi) + std::log(sse / nd)) - log_mu;
}

// Additive-error ETS(A,N,A) sample path.
inline Eigen::VectorXd simulate_ana(Eigen::Index n, double alpha, double gamma, double level0,
                                    const Eigen::VectorXd& seasonal_init, double sigma, std::uint64_t seed) {
    const int m = static_cast<int>(seasonal_init.size());
    const Eigen::VectorXd e = gaussian(n, seed, sigma);
    std::vector<double> season(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        season[static_cast<std::size_t>(m - 1 - j)] = seasonal_init[j];
    double level = level0;
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        double& s = season[static_cast<std::size_t>(t % m)];
        y[t] = level + s + e[t];
        level += alpha * e[t];
        s += gamma * e[t];
    }
    return y;
}

}  // namespace testing_support
