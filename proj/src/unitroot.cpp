#include <cmath>

#include "petrocast/sarima.hpp"

namespace petrocast {

double kpss_statistic(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    if (n < 3)
        throw Error(ErrorKind::InsufficientData, "kpss: need at least three observations");
    const Eigen::VectorXd e = x.array() - x.mean();
    const auto lags = static_cast<Eigen::Index>(std::trunc(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));

    double long_run = e.squaredNorm();
    for (Eigen::Index s = 1; s <= std::min(lags, n - 1); ++s) {
        const double weight = 1.0 - static_cast<double>(s) / static_cast<double>(lags + 1);
        long_run += 2.0 * weight * e.tail(n - s).dot(e.head(n - s));
    }
    long_run /= static_cast<double>(n);
    if (!(long_run > 0.0))
        throw Error(ErrorKind::Degenerate, "kpss: zero long-run variance");

    double partial = 0.0, sum_sq = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        partial += e[t];
        sum_sq += partial * partial;
    }
    return sum_sq / (static_cast<double>(n) * static_cast<double>(n) * long_run);
}

double seasonal_strength(const TimeSeries& ts) {
    const int m = ts.period();
    const Eigen::Index n = ts.size();
    if (m < 2)
        return 0.0;
    if (n < 2 * m + 1)
        throw Error(ErrorKind::InsufficientData, "seasonal_strength: need more than two full cycles");
    const auto& y = ts.values();

    // Centred moving average of order m (2 x m when m is even).
    const Eigen::Index half = m / 2;
    Eigen::VectorXd trend = Eigen::VectorXd::Constant(n, std::nan(""));
    for (Eigen::Index t = half; t + half < n; ++t) {
        if (m % 2 == 0)
            trend[t] = (0.5 * y[t - half] + y.segment(t - half + 1, m - 1).sum() + 0.5 * y[t + half]) / m;
        else
            trend[t] = y.segment(t - half, m).mean();
    }

    Eigen::VectorXd season_sum = Eigen::VectorXd::Zero(m);
    Eigen::VectorXi season_count = Eigen::VectorXi::Zero(m);
    for (Eigen::Index t = half; t + half < n; ++t) {
        season_sum[ts.season_of(t)] += y[t] - trend[t];
        ++season_count[ts.season_of(t)];
    }
    Eigen::VectorXd figure = season_sum.array() / season_count.cast<double>().array();
    figure.array() -= figure.mean();

    const Eigen::Index count = n - 2 * half;
    Eigen::VectorXd remainder(count), detrended(count);
    for (Eigen::Index t = half, i = 0; t + half < n; ++t, ++i) {
        detrended[i] = y[t] - trend[t];
        remainder[i] = detrended[i] - figure[ts.season_of(t)];
    }
    auto variance = [](const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().sum(); };
    const double total = variance(detrended);
    if (!(total > 0.0))
        return 0.0;
    return std::max(0.0, 1.0 - variance(remainder) / total);
}

int nsdiffs(const TimeSeries& ts) {
    if (ts.period() < 2)
        return 0;
    if (ts.size() < 3 * ts.period())
        throw Error(ErrorKind::InsufficientData, "nsdiffs: need at least three full cycles");
    return seasonal_strength(ts) > kSeasonalStrengthThreshold ? 1 : 0;
}

int ndiffs(const TimeSeries& ts) {
    if (ts.size() < 3 * ts.period())
        throw Error(ErrorKind::InsufficientData, "ndiffs: need at least three full cycles");
    Eigen::VectorXd x = ts.values();
    for (int d = 0; d < 2; ++d) {
        double stat = 0.0;
        try {
            stat = kpss_statistic(x);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Degenerate)
                return d;
            throw;
        }
        if (stat < kKpssCritical5)
            return d;
        x = Eigen::VectorXd(x.tail(x.size() - 1) - x.head(x.size() - 1));
    }
    return 2;
}

}  // namespace petrocast
