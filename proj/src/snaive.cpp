#include "petrocast/snaive.hpp"

#include <cmath>

#include "petrocast/numerics.hpp"
#include "interval_levels.hpp"

namespace petrocast {

SNaiveFit fit_snaive(const TimeSeries& ts) {
    const int m = ts.period();
    const Eigen::Index n = ts.size();
    if (n < 2 * m)
        throw Error(ErrorKind::InsufficientData, "snaive: need at least two full seasonal cycles");

    const auto& y = ts.values();
    Eigen::VectorXd fitted = y.head(n - m);
    Eigen::VectorXd residuals = y.tail(n - m) - fitted;
    const double mean = residuals.mean();
    const double sd = std::sqrt((residuals.array() - mean).square().sum() / static_cast<double>(residuals.size() - 1));
    return SNaiveFit{ts, std::move(fitted), std::move(residuals), sd, m};
}

Forecast forecast_snaive(const SNaiveFit& fit, int horizon, std::vector<double> levels) {
    if (horizon < 1)
        throw Error(ErrorKind::InvalidArgument, "forecast horizon must be at least 1");
    levels = detail::normalize_levels(std::move(levels));

    const int m = fit.period;
    const auto& y = fit.training.values();
    const Eigen::Index n = y.size();

    Forecast fc;
    fc.origin = fit.training.end();
    fc.method_label = "Seasonal naive method";
    fc.points.resize(horizon);
    Eigen::VectorXd scale(horizon);
    for (int h = 1; h <= horizon; ++h) {
        const int k = (h - 1) / m;
        fc.points[h - 1] = y[n - m + (h - 1) % m];
        scale[h - 1] = fit.residual_sd * std::sqrt(static_cast<double>(k + 1));
    }
    for (double level : levels) {
        const double z = normal_quantile(0.5 * (1.0 + level));
        fc.intervals[level] = Band{fc.points - z * scale, fc.points + z * scale};
    }
    return fc;
}

}  // namespace petrocast
