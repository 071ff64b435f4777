#pragma once

#include <vector>

#include "petrocast/core.hpp"

namespace petrocast {

/// Default interval levels used throughout when the caller passes none.
inline const std::vector<double> kDefaultLevels{0.80, 0.95};

struct SNaiveFit {
    TimeSeries training;
    /// fitted[i] and residuals[i] belong to training index i + period.
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double residual_sd = 0.0;
    int period = 12;
};

SNaiveFit fit_snaive(const TimeSeries& ts);

/// Repeats the last observed cycle. Half-width at level L is
/// z_{(1+L)/2} * sd * sqrt(k + 1) with k the number of completed cycles.
Forecast forecast_snaive(const SNaiveFit& fit, int horizon, std::vector<double> levels = {});

}  // namespace petrocast
