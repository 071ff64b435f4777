#pragma once

#include <vector>

#include "petrocast/core.hpp"

namespace petrocast {

struct AccuracyMeasures {
    double me = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    /// Percent units.
    double mpe = 0.0;
    double mape = 0.0;
    double mase = 0.0;
    /// Lag-1 autocorrelation of the errors; NaN when the errors are constant.
    double acf1 = 0.0;
    /// Observations left out of MPE/MAPE because the actual value was zero.
    int zero_actuals_skipped = 0;
};

/// Training-set error measures. `actual` and `fitted` are aligned; entries
/// where either is NaN are ignored. The MASE scale is the in-sample mean
/// absolute seasonal difference of `training`.
AccuracyMeasures accuracy(const Eigen::VectorXd& actual, const Eigen::VectorXd& fitted, const TimeSeries& training);

/// Seasonal-naive MAE of a series: mean |y_t - y_{t-m}|.
double seasonal_naive_scale(const TimeSeries& training);

inline constexpr int kDefaultLjungBoxLags = 24;

struct LjungBoxResult {
    double q_star = 0.0;
    int df = 0;
    double p_value = 1.0;
    int lags_used = 0;
    int model_df = 0;
};

LjungBoxResult ljung_box(const Eigen::VectorXd& residuals, int lags_used = kDefaultLjungBoxLags, int model_df = 0);

struct Histogram {
    std::vector<double> edges;  // bins + 1 entries
    std::vector<int> counts;
};

/// Sturges binning over [min, max].
Histogram sturges_histogram(const Eigen::VectorXd& values);

struct ResidualBundle {
    Eigen::VectorXd residuals;
    Eigen::VectorXd acf;
    /// ±2/sqrt(n) reference band.
    double acf_band = 0.0;
    Histogram histogram;
};

ResidualBundle residual_bundle(const Eigen::VectorXd& residuals);

}  // namespace petrocast
