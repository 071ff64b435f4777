#pragma once

#include <string>
#include <vector>

#include "petrocast/core.hpp"

namespace petrocast {

struct SarimaOrder {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;
    int m = 12;

    void validate() const;
    /// "ARIMA(0,1,2)(2,1,1)[12]"
    std::string label() const;
    int arma_count() const noexcept { return p + q + P + Q; }
    /// Parses "p,d,q,P,D,Q".
    static SarimaOrder parse(std::string_view text, int period = 12);

    friend bool operator==(const SarimaOrder&, const SarimaOrder&) = default;
};

struct SarimaCoefficients {
    Eigen::VectorXd ar, ma, sar, sma;
    /// Only estimated when d + D == 0.
    double mean = 0.0;
};

/// Expanded lag polynomials: phi holds phi_k of 1 - sum phi_k B^k and theta
/// holds theta_k of 1 + sum theta_k B^k.
struct ArmaPolynomials {
    Eigen::VectorXd phi;
    Eigen::VectorXd theta;
};

ArmaPolynomials expand_polynomials(const SarimaOrder& order, const SarimaCoefficients& coefs);

/// Multiplies two lag polynomials given as full coefficient vectors
/// (index = power of B, entry 0 included).
Eigen::VectorXd poly_multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// 1 - sum phi_k B^k has all roots outside the unit circle.
bool is_causal(const Eigen::VectorXd& phi);

/// psi_0..psi_{count-1} of theta(B) / phi(B) with the sign conventions above.
Eigen::VectorXd psi_weights(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, int count);

enum class LikelihoodStatus { Ok, NonCausal };

struct KalmanResult {
    LikelihoodStatus status = LikelihoodStatus::Ok;
    /// Exact Gaussian log-likelihood with sigma^2 replaced by its maximiser.
    /// For NonCausal input this is kNonCausalPenalty.
    double loglik = 0.0;
    double sigma2 = 0.0;
    /// Innovations scaled by sqrt(F_t / sigma^2); equal to raw innovations once
    /// the filter has settled.
    Eigen::VectorXd residuals;
    /// Predicted state a_{n+1|n} after the last observation.
    Eigen::VectorXd next_state;
};

inline constexpr double kNonCausalPenalty = -1e12;

/// Exact ARMA likelihood by Kalman filter in Harvey's state-space form, with
/// the stationary initial state covariance. w must already be stationary and
/// mean-corrected.
KalmanResult kalman_loglik(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, const Eigen::VectorXd& w);

struct SarimaFit {
    SarimaOrder order;
    SarimaCoefficients coefs;
    /// Same layout as coefficient_vector(); NaN where the Hessian is unusable.
    Eigen::VectorXd std_errors{};
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
    double bic = 0.0;
    bool include_mean = false;
    bool converged = true;
    TimeSeries training;
    /// residuals[i] and fitted[i] belong to training index i + offset, where
    /// offset = d + m D.
    Eigen::VectorXd residuals{};
    Eigen::VectorXd fitted{};
    Eigen::Index offset = 0;
    ArmaPolynomials polynomials{};

    /// ar, ma, sar, sma, then mean when estimated.
    Eigen::VectorXd coefficient_vector() const;
    std::vector<std::string> coefficient_names() const;
    /// Estimated coefficients excluding sigma^2.
    int model_df() const noexcept { return order.arma_count() + (include_mean ? 1 : 0); }
    int n_params() const noexcept { return model_df() + 1; }
    Eigen::Index n_used() const noexcept { return residuals.size(); }
};

/// Applies d first differences and D seasonal differences.
Eigen::VectorXd difference_series(const Eigen::VectorXd& y, const SarimaOrder& order);

/// Evaluates the model at fixed coefficients (no optimisation, no standard
/// errors). Throws if the AR side is not causal.
SarimaFit evaluate_sarima(const TimeSeries& ts, const SarimaOrder& order, const SarimaCoefficients& coefs);

SarimaFit fit_sarima(const TimeSeries& ts, const SarimaOrder& order);

/// KPSS level-stationarity statistic with Bartlett weights and bandwidth
/// trunc(4 (n/100)^(1/4)).
double kpss_statistic(const Eigen::VectorXd& x);
inline constexpr double kKpssCritical5 = 0.463;

/// 1 - Var(remainder) / Var(seasonal + remainder) from a classical additive
/// moving-average decomposition, floored at zero.
double seasonal_strength(const TimeSeries& ts);
inline constexpr double kSeasonalStrengthThreshold = 0.64;

int nsdiffs(const TimeSeries& ts);
/// Number of first differences (0..2) needed for KPSS stationarity. Operates on
/// the series as given; auto_sarima passes the seasonally differenced series.
int ndiffs(const TimeSeries& ts);

struct SarimaSearchBounds {
    int max_p = 5, max_q = 5, max_P = 2, max_Q = 2;
    /// Cap on p + q + P + Q for every candidate.
    int max_order = 5;
};

SarimaFit auto_sarima(const TimeSeries& ts, const SarimaSearchBounds& bounds = {});

Forecast forecast_sarima(const SarimaFit& fit, int horizon, std::vector<double> levels = {});

}  // namespace petrocast
