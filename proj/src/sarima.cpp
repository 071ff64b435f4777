#include "petrocast/sarima.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include <Eigen/Cholesky>

#include "petrocast/numerics.hpp"
#include "interval_levels.hpp"

namespace petrocast {

void SarimaOrder::validate() const {
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0)
        throw Error(ErrorKind::InvalidArgument, "sarima: orders must be nonnegative");
    if (m < 1)
        throw Error(ErrorKind::InvalidArgument, "sarima: period must be positive");
    if (d + D > 3)
        throw Error(ErrorKind::InvalidArgument, "sarima: total differencing d + D must not exceed 3");
    if (m == 1 && (P != 0 || D != 0 || Q != 0))
        throw Error(ErrorKind::InvalidArgument, "sarima: seasonal orders must be zero when m = 1");
}

std::string SarimaOrder::label() const {
    std::string out = "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
    if (m > 1 && (P != 0 || D != 0 || Q != 0))
        out += "(" + std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + ")[" +
               std::to_string(m) + "]";
    return out;
}

SarimaOrder SarimaOrder::parse(std::string_view text, int period) {
    std::array<int, 6> values{};
    std::size_t count = 0;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto field = text.substr(0, comma);
        if (count == values.size())
            throw Error(ErrorKind::Parse, "order: expected six comma-separated integers");
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[count]);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            throw Error(ErrorKind::Parse, "order: '" + std::string(field) + "' is not an integer");
        ++count;
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    }
    if (count != values.size())
        throw Error(ErrorKind::Parse, "order: expected six comma-separated integers p,d,q,P,D,Q");
    SarimaOrder order{values[0], values[1], values[2], values[3], values[4], values[5], period};
    order.validate();
    return order;
}

Eigen::VectorXd poly_multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i, b.size()) += a[i] * b;
    return out;
}

namespace {

// [1, sign * c_1 at lag `stride`, sign * c_2 at lag 2 * stride, ...]
Eigen::VectorXd lag_polynomial(const Eigen::VectorXd& coefs, int stride, double sign) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(coefs.size() * stride + 1);
    full[0] = 1.0;
    for (Eigen::Index j = 0; j < coefs.size(); ++j)
        full[(j + 1) * stride] = sign * coefs[j];
    return full;
}

}  // namespace

ArmaPolynomials expand_polynomials(const SarimaOrder& order, const SarimaCoefficients& coefs) {
    order.validate();
    if (coefs.ar.size() != order.p || coefs.ma.size() != order.q || coefs.sar.size() != order.P ||
        coefs.sma.size() != order.Q)
        throw Error(ErrorKind::InvalidArgument, "sarima: coefficient counts do not match the order");
    const Eigen::VectorXd ar = poly_multiply(lag_polynomial(coefs.ar, 1, -1.0), lag_polynomial(coefs.sar, order.m, -1.0));
    const Eigen::VectorXd ma = poly_multiply(lag_polynomial(coefs.ma, 1, 1.0), lag_polynomial(coefs.sma, order.m, 1.0));
    return {-ar.tail(ar.size() - 1), ma.tail(ma.size() - 1)};
}

bool is_causal(const Eigen::VectorXd& phi) {
    // Step-down recursion: causal iff every partial autocorrelation is inside (-1, 1).
    Eigen::VectorXd a = phi;
    for (Eigen::Index k = a.size(); k >= 1; --k) {
        const double r = a[k - 1];
        if (!(std::abs(r) < 1.0))
            return false;
        Eigen::VectorXd next(k - 1);
        for (Eigen::Index j = 1; j < k; ++j)
            next[j - 1] = (a[j - 1] + r * a[k - j - 1]) / (1.0 - r * r);
        a = std::move(next);
    }
    return true;
}

Eigen::VectorXd psi_weights(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, int count) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(std::max(count, 0));
    if (count < 1)
        return psi;
    psi[0] = 1.0;
    for (Eigen::Index j = 1; j < count; ++j) {
        double value = j <= theta.size() ? theta[j - 1] : 0.0;
        for (Eigen::Index i = 1; i <= std::min<Eigen::Index>(j, phi.size()); ++i)
            value += phi[i - 1] * psi[j - i];
        psi[j] = value;
    }
    return psi;
}

namespace {

// Solves P = T P T' + R R' by doubling; T is the Harvey transition with
// first column `phi` and ones on the superdiagonal.
Eigen::MatrixXd stationary_covariance(const Eigen::VectorXd& phi, const Eigen::VectorXd& R) {
    const Eigen::Index r = R.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(r, r);
    A.col(0) = phi;
    if (r > 1)
        A.topRightCorner(r - 1, r - 1).setIdentity();
    Eigen::MatrixXd P = R * R.transpose();
    for (int iter = 0; iter < 128; ++iter) {
        const Eigen::MatrixXd increment = A * P * A.transpose();
        P += increment;
        if (increment.cwiseAbs().maxCoeff() <= 1e-17 * P.cwiseAbs().maxCoeff())
            break;
        A = A * A;
    }
    return 0.5 * (P + P.transpose());
}

}  // namespace

KalmanResult kalman_loglik(const Eigen::VectorXd& phi, const Eigen::VectorXd& theta, const Eigen::VectorXd& w) {
    KalmanResult out;
    if (!is_causal(phi)) {
        out.status = LikelihoodStatus::NonCausal;
        out.loglik = kNonCausalPenalty;
        out.sigma2 = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const Eigen::Index n = w.size();
    if (n < 1)
        throw Error(ErrorKind::InsufficientData, "kalman_loglik: empty series");

    const Eigen::Index r = std::max<Eigen::Index>(phi.size(), theta.size() + 1);
    Eigen::VectorXd T = Eigen::VectorXd::Zero(r);
    T.head(phi.size()) = phi;
    Eigen::VectorXd R = Eigen::VectorXd::Zero(r);
    R[0] = 1.0;
    R.segment(1, theta.size()) = theta;
    const Eigen::MatrixXd RRt = R * R.transpose();

    Eigen::MatrixXd P = stationary_covariance(T, R);
    Eigen::MatrixXd next(r, r);
    Eigen::VectorXd gain(r), shifted(r);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
    out.residuals.resize(n);

    double ssq = 0.0, sumlog = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double v = w[t] - a[0];
        const double F = P(0, 0);
        gain = P.col(0);
        a += gain * (v / F);
        ssq += v * v / F;
        sumlog += std::log(F);
        out.residuals[t] = v / std::sqrt(F);

        // a <- T a
        const double a0 = a[0];
        for (Eigen::Index i = 0; i + 1 < r; ++i)
            a[i] = a[i + 1] + T[i] * a0;
        a[r - 1] = T[r - 1] * a0;

        // P <- T U T' + R R' with U = P - g g' / F. Writing c for U's first
        // column shifted up one place, T U T' = (u00 T + c) T' + T c' + U
        // shifted up and left.
        P.noalias() -= gain * (gain.transpose() / F);
        const double u00 = P(0, 0);
        shifted.head(r - 1) = P.col(0).tail(r - 1);
        shifted[r - 1] = 0.0;
        next.setZero();
        next.topLeftCorner(r - 1, r - 1) = P.bottomRightCorner(r - 1, r - 1);
        next.noalias() += (u00 * T + shifted) * T.transpose();
        next.noalias() += T * shifted.transpose();
        P = next + RRt;
    }

    const double nd = static_cast<double>(n);
    out.sigma2 = ssq / nd;
    out.loglik = -0.5 * (nd * (std::log(2.0 * std::numbers::pi * out.sigma2) + 1.0) + sumlog);
    out.next_state = std::move(a);
    return out;
}

Eigen::VectorXd difference_series(const Eigen::VectorXd& y, const SarimaOrder& order) {
    Eigen::VectorXd w = y;
    auto apply = [&w](int lag) {
        if (w.size() <= lag)
            throw Error(ErrorKind::InsufficientData, "sarima: series too short for the differencing order");
        w = Eigen::VectorXd(w.tail(w.size() - lag) - w.head(w.size() - lag));
    };
    for (int i = 0; i < order.d; ++i)
        apply(1);
    for (int i = 0; i < order.D; ++i)
        apply(order.m);
    return w;
}

Eigen::VectorXd SarimaFit::coefficient_vector() const {
    Eigen::VectorXd out(model_df());
    out << coefs.ar, coefs.ma, coefs.sar, coefs.sma;
    if (include_mean)
        out[model_df() - 1] = coefs.mean;
    return out;
}

std::vector<std::string> SarimaFit::coefficient_names() const {
    std::vector<std::string> names;
    auto add = [&names](const char* prefix, int count) {
        for (int i = 1; i <= count; ++i)
            names.push_back(prefix + std::to_string(i));
    };
    add("ar", order.p);
    add("ma", order.q);
    add("sar", order.P);
    add("sma", order.Q);
    if (include_mean)
        names.emplace_back("mean");
    return names;
}

namespace {

bool wants_mean(const SarimaOrder& order) { return order.d + order.D == 0; }

SarimaCoefficients unpack(const SarimaOrder& order, bool with_mean, const Eigen::VectorXd& v) {
    SarimaCoefficients c;
    Eigen::Index i = 0;
    c.ar = v.segment(i, order.p);
    i += order.p;
    c.ma = v.segment(i, order.q);
    i += order.q;
    c.sar = v.segment(i, order.P);
    i += order.P;
    c.sma = v.segment(i, order.Q);
    i += order.Q;
    if (with_mean)
        c.mean = v[i];
    return c;
}

void fill_criteria(SarimaFit& fit) {
    const double k = fit.n_params();
    const double n = static_cast<double>(fit.n_used());
    fit.aic = -2.0 * fit.loglik + 2.0 * k;
    fit.aicc = fit.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0);
    fit.bic = fit.aic + k * (std::log(n) - 2.0);
}

// Partial autocorrelations -> AR coefficients (Durbin-Levinson).
Eigen::VectorXd pacf_to_ar(const Eigen::VectorXd& partial) {
    Eigen::VectorXd phi(0);
    for (Eigen::Index k = 0; k < partial.size(); ++k) {
        Eigen::VectorXd next(k + 1);
        for (Eigen::Index j = 0; j < k; ++j)
            next[j] = phi[j] - partial[k] * phi[k - 1 - j];
        next[k] = partial[k];
        phi = std::move(next);
    }
    return phi;
}

Eigen::VectorXd ar_to_pacf(const Eigen::VectorXd& phi) {
    Eigen::VectorXd partial(phi.size());
    Eigen::VectorXd a = phi;
    for (Eigen::Index k = a.size(); k >= 1; --k) {
        const double r = std::clamp(a[k - 1], -0.99, 0.99);
        partial[k - 1] = r;
        Eigen::VectorXd next(k - 1);
        for (Eigen::Index j = 1; j < k; ++j)
            next[j - 1] = (a[j - 1] + r * a[k - j - 1]) / (1.0 - r * r);
        a = std::move(next);
    }
    return partial;
}

// Maps unconstrained reals to causal AR / invertible MA blocks via tanh of
// partial autocorrelations; the mean is an offset in units of `mean_scale`.
struct SarimaCoordinates {
    SarimaOrder order;
    bool with_mean = false;
    double mean_start = 0.0;
    double mean_scale = 1.0;

    Eigen::Index size() const { return order.arma_count() + (with_mean ? 1 : 0); }

    SarimaCoefficients decode(const Eigen::VectorXd& u) const {
        SarimaCoefficients c;
        Eigen::Index i = 0;
        auto block = [&](int count, double sign) {
            Eigen::VectorXd partial = u.segment(i, count).array().tanh();
            i += count;
            return Eigen::VectorXd(sign * pacf_to_ar(partial));
        };
        c.ar = block(order.p, 1.0);
        c.ma = block(order.q, -1.0);
        c.sar = block(order.P, 1.0);
        c.sma = block(order.Q, -1.0);
        if (with_mean)
            c.mean = mean_start + mean_scale * u[i];
        return c;
    }

    Eigen::VectorXd encode(const SarimaCoefficients& c) const {
        Eigen::VectorXd u(size());
        Eigen::Index i = 0;
        auto block = [&](const Eigen::VectorXd& coefs, double sign) {
            const Eigen::VectorXd partial = ar_to_pacf(sign * coefs);
            u.segment(i, partial.size()) = partial.array().atanh();
            i += partial.size();
        };
        block(c.ar, 1.0);
        block(c.ma, -1.0);
        block(c.sar, 1.0);
        block(c.sma, -1.0);
        if (with_mean)
            u[i] = (c.mean - mean_start) / mean_scale;
        return u;
    }
};

// Conditional sum of squares objective, 0.5 log(css / n_terms).
double css_objective(const ArmaPolynomials& poly, const Eigen::VectorXd& w) {
    const Eigen::Index p = poly.phi.size(), q = poly.theta.size(), n = w.size();
    const Eigen::Index ncond = p;
    if (n <= ncond)
        return std::numeric_limits<double>::infinity();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    double ssq = 0.0;
    for (Eigen::Index t = ncond; t < n; ++t) {
        double value = w[t];
        for (Eigen::Index i = 1; i <= p; ++i)
            value -= poly.phi[i - 1] * w[t - i];
        for (Eigen::Index j = 1; j <= std::min(q, t - ncond); ++j)
            value -= poly.theta[j - 1] * e[t - j];
        e[t] = value;
        ssq += value * value;
    }
    return 0.5 * std::log(ssq / static_cast<double>(n - ncond));
}

constexpr int kExtraRounds = 1;
OptimizerResult minimise(const Objective& f, const Eigen::VectorXd& start, double tolerance) {
    OptimizerOptions opts;
    opts.max_iterations = 10000;
    opts.abs_tolerance = tolerance;
    opts.initial_step = 0.2;
    OptimizerResult best = nelder_mead(f, start, opts);
    for (int round = 0; round < kExtraRounds; ++round) {
        opts.initial_step = 0.1;
        OptimizerResult next = nelder_mead(f, best.argmin, opts);
        const bool improved = next.minimum < best.minimum - 1e-7;
        next.iterations += best.iterations;
        best = std::move(next);
        if (!improved)
            break;
    }
    return best;
}

}  // namespace

SarimaFit evaluate_sarima(const TimeSeries& ts, const SarimaOrder& order, const SarimaCoefficients& coefs) {
    order.validate();
    if (order.m != ts.period())
        throw Error(ErrorKind::InvalidArgument, "sarima: order period differs from series period");
    const bool with_mean = wants_mean(order);
    Eigen::VectorXd w = difference_series(ts.values(), order);
    if (with_mean)
        w.array() -= coefs.mean;

    SarimaFit fit{.order = order, .coefs = coefs, .include_mean = with_mean, .training = ts};
    if (!with_mean)
        fit.coefs.mean = 0.0;
    fit.polynomials = expand_polynomials(order, coefs);
    KalmanResult kal = kalman_loglik(fit.polynomials.phi, fit.polynomials.theta, w);
    if (kal.status != LikelihoodStatus::Ok)
        throw Error(ErrorKind::InvalidArgument, "sarima: AR polynomial is not causal");

    fit.sigma2 = kal.sigma2;
    fit.loglik = kal.loglik;
    fit.offset = ts.size() - w.size();
    fit.residuals = std::move(kal.residuals);
    fit.fitted = ts.values().tail(fit.residuals.size()) - fit.residuals;
    fit.std_errors = Eigen::VectorXd::Constant(fit.model_df(), std::numeric_limits<double>::quiet_NaN());
    fill_criteria(fit);
    return fit;
}

namespace {

// Maximum-likelihood fit without standard errors.
SarimaFit fit_point_estimates(const TimeSeries& ts, const SarimaOrder& order) {
    order.validate();
    if (order.m != ts.period())
        throw Error(ErrorKind::InvalidArgument, "sarima: order period differs from series period");
    const Eigen::Index n_used = ts.size() - order.d - order.m * order.D;
    const Eigen::Index arma_span = order.p + order.q + order.m * (order.P + order.Q);
    if (n_used <= arma_span + 1)
        throw Error(ErrorKind::InsufficientData,
                    order.label() + ": need more than " + std::to_string(arma_span + 1) + " differenced observations");

    const bool with_mean = wants_mean(order);
    const Eigen::VectorXd w = difference_series(ts.values(), order);
    SarimaCoordinates coords{order, with_mean, 0.0, 1.0};
    if (with_mean) {
        coords.mean_start = w.mean();
        const double sd = std::sqrt((w.array() - w.mean()).square().sum() / static_cast<double>(w.size()));
        coords.mean_scale = sd > 0.0 ? sd / std::sqrt(static_cast<double>(w.size())) : 1.0;
    }

    auto centred = [&](const SarimaCoefficients& c) {
        return with_mean ? Eigen::VectorXd(w.array() - c.mean) : w;
    };
    const Objective css = [&](const Eigen::VectorXd& u) {
        const SarimaCoefficients c = coords.decode(u);
        return css_objective(expand_polynomials(order, c), centred(c));
    };
    const Objective negative_loglik = [&](const Eigen::VectorXd& u) {
        const SarimaCoefficients c = coords.decode(u);
        const ArmaPolynomials poly = expand_polynomials(order, c);
        const KalmanResult kal = kalman_loglik(poly.phi, poly.theta, centred(c));
        return kal.status == LikelihoodStatus::Ok ? -kal.loglik : -kNonCausalPenalty;
    };

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(coords.size());
    Eigen::VectorXd start = zero;
    if (coords.size() > 0 && std::isfinite(css(zero)))
        start = minimise(css, zero, 1e-8).argmin;
    if (!std::isfinite(negative_loglik(start)))
        start = zero;

    const OptimizerResult best = minimise(negative_loglik, start, 1e-6);
    SarimaFit fit = evaluate_sarima(ts, order, coords.decode(best.argmin));
    fit.converged = best.converged;

    return fit;
}

// Square roots of the inverse numerical Hessian of -loglik in the raw
// coefficients; left as NaN when the Hessian is not positive definite.
void attach_standard_errors(SarimaFit& fit) {
    fit.std_errors = Eigen::VectorXd::Constant(fit.model_df(), std::numeric_limits<double>::quiet_NaN());
    if (fit.model_df() == 0)
        return;
    const SarimaOrder& order = fit.order;
    const bool with_mean = fit.include_mean;
    const Eigen::VectorXd w = difference_series(fit.training.values(), order);
    auto centred = [&](const SarimaCoefficients& c) {
        return with_mean ? Eigen::VectorXd(w.array() - c.mean) : w;
    };
    const Objective raw = [&](const Eigen::VectorXd& v) {
        const SarimaCoefficients c = unpack(order, with_mean, v);
        const ArmaPolynomials poly = expand_polynomials(order, c);
        const KalmanResult kal = kalman_loglik(poly.phi, poly.theta, centred(c));
        return kal.status == LikelihoodStatus::Ok ? -kal.loglik : std::numeric_limits<double>::quiet_NaN();
    };
    try {
        const Eigen::MatrixXd hessian = numerical_hessian(raw, fit.coefficient_vector());
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all()) {
            const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(hessian.rows(), hessian.cols()));
            fit.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
        }
    } catch (const Error&) {
        // standard errors stay NaN
    }
}

}  // namespace

SarimaFit fit_sarima(const TimeSeries& ts, const SarimaOrder& order) {
    SarimaFit fit = fit_point_estimates(ts, order);
    attach_standard_errors(fit);
    return fit;
}

SarimaFit auto_sarima(const TimeSeries& ts, const SarimaSearchBounds& bounds) {
    const int m = ts.period();
    const bool seasonal = m > 1;
    int D = 0;
    if (seasonal && ts.size() >= 3 * m)
        D = nsdiffs(ts);
    const TimeSeries base = D > 0 ? difference(ts, m) : ts;
    const int d = ndiffs(base);

    using Key = std::array<int, 4>;  // p, q, P, Q
    std::map<Key, std::optional<SarimaFit>> cache;
    auto score = [&](const Key& key) {
        const auto& fit = cache.at(key);
        return fit ? fit->aicc : std::numeric_limits<double>::infinity();
    };
    auto evaluate = [&](const std::vector<Key>& keys) {
        std::vector<std::pair<Key, std::future<std::optional<SarimaFit>>>> jobs;
        for (const Key& key : keys) {
            if (cache.count(key))
                continue;
            const SarimaOrder order{key[0], d, key[1], key[2], D, key[3], m};
            jobs.emplace_back(key, std::async(std::launch::async, [&ts, order]() -> std::optional<SarimaFit> {
                try {
                    SarimaFit fit = fit_point_estimates(ts, order);
                    if (!std::isfinite(fit.aicc))
                        return std::nullopt;
                    return fit;
                } catch (const Error&) {
                    return std::nullopt;
                }
            }));
            cache[key] = std::nullopt;
        }
        for (auto& [key, job] : jobs)
            cache[key] = job.get();
    };

    auto clamp_key = [&](Key key) {
        key[0] = std::min(key[0], bounds.max_p);
        key[1] = std::min(key[1], bounds.max_q);
        key[2] = seasonal ? std::min(key[2], bounds.max_P) : 0;
        key[3] = seasonal ? std::min(key[3], bounds.max_Q) : 0;
        return key;
    };
    std::vector<Key> seeds;
    for (Key key : {Key{2, 2, 1, 1}, Key{0, 0, 0, 0}, Key{1, 0, 1, 0}, Key{0, 1, 0, 1}}) {
        key = clamp_key(key);
        if (key[0] + key[1] + key[2] + key[3] > bounds.max_order)
            continue;
        if (std::find(seeds.begin(), seeds.end(), key) == seeds.end())
            seeds.push_back(key);
    }
    evaluate(seeds);

    Key current = seeds.front();
    for (const Key& key : seeds)
        if (score(key) < score(current))
            current = key;
    if (!std::isfinite(score(current)))
        throw Error(ErrorKind::FitFailed, "auto_sarima: every starting model failed to fit");

    const std::array<int, 4> upper{bounds.max_p, bounds.max_q, seasonal ? bounds.max_P : 0, seasonal ? bounds.max_Q : 0};
    for (;;) {
        std::vector<Key> neighbours;
        for (std::size_t dim = 0; dim < 4; ++dim) {
            for (int step : {-1, 1}) {
                Key next = current;
                next[dim] += step;
                const int total = next[0] + next[1] + next[2] + next[3];
                if (next[dim] >= 0 && next[dim] <= upper[dim] && total <= bounds.max_order)
                    neighbours.push_back(next);
            }
        }
        evaluate(neighbours);
        Key best = current;
        for (const Key& key : neighbours)
            if (score(key) < score(best))
                best = key;
        if (best == current)
            break;
        current = best;
    }
    SarimaFit chosen = std::move(*cache.at(current));
    attach_standard_errors(chosen);
    return chosen;
}

Forecast forecast_sarima(const SarimaFit& fit, int horizon, std::vector<double> levels) {
    if (horizon < 1)
        throw Error(ErrorKind::InvalidArgument, "forecast horizon must be at least 1");
    levels = detail::normalize_levels(std::move(levels));
    const SarimaOrder& order = fit.order;
    const Eigen::VectorXd& y = fit.training.values();
    const Eigen::Index n = y.size();

    const ArmaPolynomials poly = expand_polynomials(order, fit.coefs);
    Eigen::VectorXd w = difference_series(y, order);
    if (fit.include_mean)
        w.array() -= fit.coefs.mean;
    const KalmanResult kal = kalman_loglik(poly.phi, poly.theta, w);
    if (kal.status != LikelihoodStatus::Ok)
        throw Error(ErrorKind::InvalidArgument, "sarima: AR polynomial is not causal");

    // Conditional expectations of the differenced process: first element of
    // T^{h-1} a_{n+1|n}.
    const Eigen::Index r = kal.next_state.size();
    Eigen::VectorXd T = Eigen::VectorXd::Zero(r);
    T.head(poly.phi.size()) = poly.phi;
    Eigen::VectorXd a = kal.next_state;
    Eigen::VectorXd w_hat(horizon);
    for (int h = 0; h < horizon; ++h) {
        w_hat[h] = a[0] + (fit.include_mean ? fit.coefs.mean : 0.0);
        const double a0 = a[0];
        for (Eigen::Index i = 0; i + 1 < r; ++i)
            a[i] = a[i + 1] + T[i] * a0;
        a[r - 1] = T[r - 1] * a0;
    }

    // delta(B) = (1 - B)^d (1 - B^m)^D
    Eigen::VectorXd delta = Eigen::VectorXd::Ones(1);
    for (int i = 0; i < order.d; ++i)
        delta = poly_multiply(delta, lag_polynomial(Eigen::VectorXd::Ones(1), 1, -1.0));
    for (int i = 0; i < order.D; ++i)
        delta = poly_multiply(delta, lag_polynomial(Eigen::VectorXd::Ones(1), order.m, -1.0));

    Eigen::VectorXd extended(n + horizon);
    extended.head(n) = y;
    for (Eigen::Index t = n; t < n + horizon; ++t) {
        double value = w_hat[t - n];
        for (Eigen::Index k = 1; k < delta.size(); ++k)
            value -= delta[k] * extended[t - k];
        extended[t] = value;
    }

    Eigen::VectorXd ar_full(poly.phi.size() + 1);
    ar_full << 1.0, -poly.phi;
    const Eigen::VectorXd integrated = poly_multiply(ar_full, delta);
    const Eigen::VectorXd psi = psi_weights(-integrated.tail(integrated.size() - 1), poly.theta, horizon);

    Forecast fc;
    fc.origin = fit.training.end();
    fc.method_label = order.label();
    fc.points = extended.tail(horizon);
    Eigen::VectorXd sd(horizon);
    double cumulative = 0.0;
    for (int h = 0; h < horizon; ++h) {
        cumulative += psi[h] * psi[h];
        sd[h] = std::sqrt(fit.sigma2 * cumulative);
    }
    for (double level : levels) {
        const double z = normal_quantile(0.5 * (1.0 + level));
        fc.intervals[level] = Band{fc.points - z * sd, fc.points + z * sd};
    }
    return fc;
}

}  // namespace petrocast
