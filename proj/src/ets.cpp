#include "petrocast/ets.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "petrocast/numerics.hpp"
#include "interval_levels.hpp"

namespace petrocast {

std::string EtsSpec::label() const {
    std::string out = "ETS(";
    out += error == ErrorType::Additive ? 'A' : 'M';
    out += ",N,";
    out += seasonal() ? 'A' : 'N';
    out += ')';
    return out;
}

int EtsSpec::free_parameters() const noexcept {
    return seasonal() ? 2 + 1 + (period - 1) : 1 + 1;
}

namespace {

void validate(const EtsSpec& spec, const EtsParams& params, const EtsStates& initial, const TimeSeries& ts) {
    if (spec.seasonal()) {
        if (spec.period < 2)
            throw Error(ErrorKind::InvalidArgument, "ets: seasonal model requires period >= 2");
        if (initial.seasonal.size() != spec.period)
            throw Error(ErrorKind::InvalidArgument, "ets: need one initial seasonal state per season");
    }
    if (spec.period != ts.period())
        throw Error(ErrorKind::InvalidArgument, "ets: spec period differs from series period");
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0) || !(params.gamma >= 0.0 && params.gamma <= 1.0 - params.alpha))
        throw Error(ErrorKind::InvalidArgument, "ets: smoothing parameters outside 0 <= alpha <= 1, 0 <= gamma <= 1 - alpha");
}

double gaussian_loglik(double sum_squares, Eigen::Index n) {
    const double nd = static_cast<double>(n);
    return -0.5 * nd * (1.0 + std::log(2.0 * std::numbers::pi) + std::log(sum_squares / nd));
}

}  // namespace

EtsFilterResult ets_filter(const EtsSpec& spec, const EtsParams& params, const EtsStates& initial,
                           const TimeSeries& ts) {
    validate(spec, params, initial, ts);
    const Eigen::Index n = ts.size();
    const int m = spec.seasonal() ? spec.period : 0;
    const bool multiplicative = spec.error == ErrorType::Multiplicative;

    EtsFilterResult out;
    out.fitted.resize(n);
    out.residuals.resize(n);

    double level = initial.level;
    // ring[t % m] holds s_{t-m} when observation t (0-based) arrives.
    Eigen::VectorXd ring(m);
    for (int k = 0; k < m; ++k)
        ring[k] = initial.seasonal[m - 1 - k];

    double log_mu_sum = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double season = m > 0 ? ring[t % m] : 0.0;
        const double mu = level + season;
        const double error = ts[t] - mu;
        if (multiplicative) {
            if (mu == 0.0)
                throw Error(ErrorKind::SingularForecast, "ets: zero one-step forecast under multiplicative error");
            out.residuals[t] = error / mu;
            log_mu_sum += std::log(std::abs(mu));
        } else {
            out.residuals[t] = error;
        }
        out.fitted[t] = mu;
        level += params.alpha * error;
        if (m > 0)
            ring[t % m] = season + params.gamma * error;
    }

    out.final_states.level = level;
    out.final_states.seasonal.resize(m);
    for (int j = 0; j < m; ++j)
        out.final_states.seasonal[j] = ring[((n - 1 - j) % m + m) % m];

    out.loglik = gaussian_loglik(out.residuals.squaredNorm(), n) - log_mu_sum;
    return out;
}

std::pair<EtsParams, EtsStates> ets_initial_guess(const EtsSpec& spec, const TimeSeries& ts) {
    const int m = spec.period;
    const auto& y = ts.values();
    const Eigen::Index n = y.size();

    EtsParams params;
    params.alpha = 0.3;
    params.gamma = spec.seasonal() ? 0.1 : 0.0;

    EtsStates states;
    if (!spec.seasonal()) {
        states.level = y.head(std::min<Eigen::Index>(n, 2 * std::max(m, 1))).mean();
        return {params, states};
    }

    states.level = y.head(std::min<Eigen::Index>(n, 2 * m)).mean();
    const Eigen::Index years = std::clamp<Eigen::Index>(n / m, 1, 3);
    Eigen::VectorXd by_position = Eigen::VectorXd::Zero(m);
    for (Eigen::Index yr = 0; yr < years; ++yr)
        by_position += y.segment(yr * m, m);
    by_position /= static_cast<double>(years);
    by_position.array() -= by_position.mean();

    // Observation t (0-based, first cycle) uses s_{t+1-m}, i.e. seasonal[m-1-t].
    states.seasonal.resize(m);
    for (int t = 0; t < m; ++t)
        states.seasonal[m - 1 - t] = by_position[t];
    return {params, states};
}

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Unconstrained coordinates: [u_alpha, (u_gamma), level offset, m-1 seasonal
// offsets], offsets measured in units of `scale` from the heuristic start. The
// last seasonal state is minus the sum of the others.
struct EtsCoordinates {
    EtsSpec spec;
    EtsStates start;
    double scale = 1.0;

    Eigen::Index size() const { return spec.free_parameters(); }

    Eigen::VectorXd encode(const EtsParams& p) const {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(size());
        z[0] = logit(p.alpha);
        if (spec.seasonal())
            z[1] = logit(p.gamma / (1.0 - p.alpha));
        return z;
    }

    void decode(const Eigen::VectorXd& z, EtsParams& p, EtsStates& s) const {
        p.alpha = logistic(z[0]);
        Eigen::Index i = 1;
        p.gamma = 0.0;
        if (spec.seasonal())
            p.gamma = (1.0 - p.alpha) * logistic(z[i++]);
        s.level = start.level + scale * z[i++];
        if (spec.seasonal()) {
            const int m = spec.period;
            s.seasonal.resize(m);
            s.seasonal.head(m - 1) = start.seasonal.head(m - 1) + scale * z.segment(i, m - 1);
            s.seasonal[m - 1] = -s.seasonal.head(m - 1).sum();
        }
    }
};

}  // namespace

EtsFit fit_ets(const TimeSeries& ts, const EtsSpec& spec) {
    if (spec.period != ts.period())
        throw Error(ErrorKind::InvalidArgument, "ets: spec period differs from series period");
    const Eigen::Index n = ts.size();
    const int k = spec.free_parameters() + 1;
    if (spec.seasonal() && n < 2 * spec.period + 3)
        throw Error(ErrorKind::InsufficientData, "ets: seasonal model needs at least 2m + 3 observations");
    if (n < k + 2)
        throw Error(ErrorKind::InsufficientData, "ets: too few observations for the parameter count");
    if (spec.error == ErrorType::Multiplicative && ts.values().minCoeff() <= 0.0)
        throw Error(ErrorKind::InvalidArgument, "ets: multiplicative error requires strictly positive data");

    auto [start_params, start_states] = ets_initial_guess(spec, ts);
    const Eigen::Index head = std::min<Eigen::Index>(n, 2 * spec.period);
    const auto first = ts.values().head(head);
    double scale = std::sqrt((first.array() - first.mean()).square().sum() / static_cast<double>(head));
    if (!(scale > 0.0))
        scale = std::max(std::abs(first.mean()), 1.0) * 1e-3;

    const EtsCoordinates coords{spec, start_states, scale};
    const Objective objective = [&](const Eigen::VectorXd& z) {
        EtsParams p;
        EtsStates s;
        coords.decode(z, p, s);
        try {
            const double ll = ets_filter(spec, p, s, ts).loglik;
            return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Eigen::VectorXd z = coords.encode(start_params);
    const double start_value = objective(z);
    if (!std::isfinite(start_value))
        throw Error(ErrorKind::FitFailed, spec.label() + ": likelihood is not finite at the heuristic start");

    OptimizerOptions opts;
    opts.max_iterations = 20000;
    opts.abs_tolerance = 1e-9;
    opts.initial_step = 0.5;
    OptimizerResult best = nelder_mead(objective, z, opts);
    for (int round = 0; round < 6; ++round) {
        opts.initial_step = 0.25;
        OptimizerResult next = nelder_mead(objective, best.argmin, opts);
        const bool improved = next.minimum < best.minimum - 1e-7;
        next.iterations += best.iterations;
        best = std::move(next);
        if (!improved)
            break;
    }
    if (!std::isfinite(best.minimum))
        throw Error(ErrorKind::FitFailed, spec.label() + ": optimizer ended at a non-finite likelihood");

    EtsFit fit{.spec = spec, .training = ts};
    coords.decode(best.argmin, fit.params, fit.initial);
    EtsFilterResult filtered = ets_filter(spec, fit.params, fit.initial, ts);
    fit.final_states = std::move(filtered.final_states);
    fit.fitted = std::move(filtered.fitted);
    fit.residuals = std::move(filtered.residuals);
    fit.loglik = filtered.loglik;
    fit.start_loglik = -start_value;
    fit.n_params = k;
    fit.sigma = std::sqrt(fit.residuals.squaredNorm() / static_cast<double>(n - spec.free_parameters()));
    const double nd = static_cast<double>(n);
    fit.aic = -2.0 * fit.loglik + 2.0 * k;
    fit.aicc = fit.aic + 2.0 * k * (k + 1) / (nd - k - 1);
    fit.bic = fit.aic + k * (std::log(nd) - 2.0);
    fit.converged = best.converged;
    return fit;
}

EtsFit auto_ets(const TimeSeries& ts) {
    // Order doubles as the tie-break: additive error first, then non-seasonal.
    std::vector<EtsSpec> candidates;
    const bool positive = ts.values().minCoeff() > 0.0;
    for (ErrorType error : {ErrorType::Additive, ErrorType::Multiplicative}) {
        if (error == ErrorType::Multiplicative && !positive)
            continue;
        for (SeasonType season : {SeasonType::None, SeasonType::Additive}) {
            if (season == SeasonType::Additive && (ts.period() < 2 || ts.size() < 2 * ts.period() + 3))
                continue;
            candidates.push_back(EtsSpec{error, TrendType::None, season, ts.period()});
        }
    }

    std::vector<std::future<EtsFit>> jobs;
    for (const EtsSpec& spec : candidates)
        jobs.push_back(std::async(std::launch::async, [&ts, spec] { return fit_ets(ts, spec); }));

    std::optional<EtsFit> best;
    std::string failures;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            EtsFit fit = jobs[i].get();
            if (!best || fit.aicc < best->aicc)
                best = std::move(fit);
        } catch (const Error& e) {
            failures += std::string(" ") + e.what() + ";";
        }
    }
    if (!best)
        throw Error(ErrorKind::FitFailed, "auto_ets: every candidate failed:" + failures);
    return std::move(*best);
}

namespace {

// Linear-interpolation sample quantile (Hyndman-Fan type 7).
double sample_quantile(std::vector<double>& xs, double p) {
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(lo), xs.end());
    const double a = xs[lo];
    if (lo + 1 >= xs.size())
        return a;
    const double b = *std::min_element(xs.begin() + static_cast<std::ptrdiff_t>(lo) + 1, xs.end());
    return a + (pos - static_cast<double>(lo)) * (b - a);
}

}  // namespace

Forecast forecast_ets(const EtsFit& fit, int horizon, std::vector<double> levels, std::uint64_t seed, int paths) {
    if (horizon < 1)
        throw Error(ErrorKind::InvalidArgument, "forecast horizon must be at least 1");
    if (paths < 2)
        throw Error(ErrorKind::InvalidArgument, "forecast_ets: need at least two simulation paths");
    levels = detail::normalize_levels(std::move(levels));

    const EtsSpec& spec = fit.spec;
    const int m = spec.seasonal() ? spec.period : 0;
    const double alpha = fit.params.alpha, gamma = fit.params.gamma, sigma = fit.sigma;
    const EtsStates& last = fit.final_states;

    Forecast fc;
    fc.origin = fit.training.end();
    fc.method_label = spec.label();
    fc.points.resize(horizon);
    for (int h = 1; h <= horizon; ++h) {
        const double season = m > 0 ? last.seasonal[m * ((h - 1) / m + 1) - h] : 0.0;
        fc.points[h - 1] = last.level + season;
    }

    if (spec.error == ErrorType::Additive) {
        for (double level : levels) {
            const double z = normal_quantile(0.5 * (1.0 + level));
            Band band{Eigen::VectorXd(horizon), Eigen::VectorXd(horizon)};
            for (int h = 1; h <= horizon; ++h) {
                const double k = m > 0 ? static_cast<double>((h - 1) / m) : 0.0;
                const double v = sigma * sigma * (1.0 + alpha * alpha * (h - 1) + gamma * (2.0 * alpha + gamma) * k);
                band.lower[h - 1] = fc.points[h - 1] - z * std::sqrt(v);
                band.upper[h - 1] = fc.points[h - 1] + z * std::sqrt(v);
            }
            fc.intervals[level] = std::move(band);
        }
        return fc;
    }

    // Control path: identical recursion but with error scale frozen at the
    // point forecast, so y_h is exactly Gaussian with variance control_var[h].
    Eigen::VectorXd control_var(horizon);
    for (int h = 1; h <= horizon; ++h) {
        double v = std::pow(fc.points[h - 1], 2);
        for (int i = 1; i < h; ++i) {
            const double weight = alpha + ((m > 0 && (h - i) % m == 0) ? gamma : 0.0);
            v += weight * weight * std::pow(fc.points[i - 1], 2);
        }
        control_var[h - 1] = sigma * sigma * v;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto np = static_cast<std::size_t>(paths);
    std::vector<std::vector<double>> sims(static_cast<std::size_t>(horizon), std::vector<double>(np));
    std::vector<std::vector<double>> controls(static_cast<std::size_t>(horizon), std::vector<double>(np));

    Eigen::VectorXd ring(m), ring_c(m);
    for (std::size_t path = 0; path < np; ++path) {
        double level = last.level, level_c = last.level;
        // ring[(h-1) % m] holds s_{T+h-m} on arrival at step h.
        for (int k = 0; k < m; ++k)
            ring[k] = ring_c[k] = last.seasonal[m - 1 - k];
        for (int h = 1; h <= horizon; ++h) {
            const double eps = normal(rng);
            const int slot = m > 0 ? (h - 1) % m : 0;
            const double season = m > 0 ? ring[slot] : 0.0;
            const double season_c = m > 0 ? ring_c[slot] : 0.0;
            const double mu = level + season;
            const double err = mu * sigma * eps;
            const double err_c = fc.points[h - 1] * sigma * eps;
            sims[static_cast<std::size_t>(h - 1)][path] = mu + err;
            controls[static_cast<std::size_t>(h - 1)][path] = level_c + season_c + err_c;
            level += alpha * err;
            level_c += alpha * err_c;
            if (m > 0) {
                ring[slot] = season + gamma * err;
                ring_c[slot] = season_c + gamma * err_c;
            }
        }
    }

    for (double level : levels) {
        Band band{Eigen::VectorXd(horizon), Eigen::VectorXd(horizon)};
        const double lo_p = 0.5 * (1.0 - level), hi_p = 0.5 * (1.0 + level);
        const double z = normal_quantile(hi_p);
        for (int h = 0; h < horizon; ++h) {
            auto& ys = sims[static_cast<std::size_t>(h)];
            auto& cs = controls[static_cast<std::size_t>(h)];
            const double sd_c = std::sqrt(control_var[h]);
            const double lo = sample_quantile(ys, lo_p) - sample_quantile(cs, lo_p) + (fc.points[h] - z * sd_c);
            const double hi = sample_quantile(ys, hi_p) - sample_quantile(cs, hi_p) + (fc.points[h] + z * sd_c);
            band.lower[h] = std::min(lo, fc.points[h]);
            band.upper[h] = std::max(hi, fc.points[h]);
        }
        fc.intervals[level] = std::move(band);
    }
    return fc;
}

}  // namespace petrocast
