#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "petrocast/core.hpp"

namespace petrocast {

enum class ErrorType { Additive, Multiplicative };
enum class TrendType { None };
enum class SeasonType { None, Additive };

struct EtsSpec {
    ErrorType error = ErrorType::Additive;
    TrendType trend = TrendType::None;
    SeasonType season = SeasonType::Additive;
    int period = 12;

    bool seasonal() const noexcept { return season == SeasonType::Additive; }
    /// "ETS(A,N,A)"
    std::string label() const;
    /// Estimated quantities excluding sigma: smoothing weights, l0 and m-1 free
    /// seasonal states.
    int free_parameters() const noexcept;
};

struct EtsParams {
    double alpha = 0.3;
    double gamma = 0.0;
};

/// Seasonal states are stored most recent first: seasonal[j] = s_{t-j}.
struct EtsStates {
    double level = 0.0;
    Eigen::VectorXd seasonal;
};

struct EtsFilterResult {
    /// One-step forecasts mu_t.
    Eigen::VectorXd fitted;
    /// Innovation residuals: y - mu for additive error, (y - mu) / mu for
    /// multiplicative error.
    Eigen::VectorXd residuals;
    EtsStates final_states;
    double loglik = 0.0;
};

/// Runs the state recursion. The log-likelihood has sigma concentrated out
/// and includes the full Gaussian constant.
EtsFilterResult ets_filter(const EtsSpec& spec, const EtsParams& params, const EtsStates& initial,
                           const TimeSeries& ts);

struct EtsFit {
    EtsSpec spec;
    EtsParams params{};
    EtsStates initial{};
    EtsStates final_states{};
    TimeSeries training;
    Eigen::VectorXd fitted{};
    Eigen::VectorXd residuals{};
    /// sqrt(sum of squared innovation residuals / (n - free_parameters)).
    double sigma = 0.0;
    double loglik = 0.0;
    double start_loglik = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
    double bic = 0.0;
    /// Parameter count used in the information criteria (includes sigma).
    int n_params = 0;
    bool converged = false;

    int model_df() const noexcept { return n_params - 1; }
};

/// Heuristic starting point: l0 from the first two cycles, seasonal pattern
/// from per-season means of the first (up to) three cycles, alpha 0.3, gamma 0.1.
std::pair<EtsParams, EtsStates> ets_initial_guess(const EtsSpec& spec, const TimeSeries& ts);

EtsFit fit_ets(const TimeSeries& ts, const EtsSpec& spec);

/// Fits {A,M} x {N} x {N,A} and keeps the lowest AICc. Multiplicative error
/// is only tried on strictly positive data.
EtsFit auto_ets(const TimeSeries& ts);

inline constexpr int kDefaultSimulationPaths = 5000;

/// Additive error: analytic variance. Multiplicative error: simulated sample
/// paths whose empirical quantiles are corrected by a linearised control path
/// with known Gaussian quantiles.
Forecast forecast_ets(const EtsFit& fit, int horizon, std::vector<double> levels = {}, std::uint64_t seed = 42,
                      int paths = kDefaultSimulationPaths);

}  // namespace petrocast
