#include "petrocast/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "petrocast/numerics.hpp"

namespace petrocast {

double seasonal_naive_scale(const TimeSeries& training) {
    const int m = training.period();
    const Eigen::Index n = training.size();
    if (n <= m)
        throw Error(ErrorKind::InsufficientData, "MASE scale needs more than one seasonal cycle");
    const auto& y = training.values();
    // Same expression and summation order as seasonal-naive residuals so that
    // its training MASE comes out as exactly 1.
    const Eigen::VectorXd diffs = y.tail(n - m) - y.head(n - m);
    return diffs.cwiseAbs().sum() / static_cast<double>(n - m);
}

AccuracyMeasures accuracy(const Eigen::VectorXd& actual, const Eigen::VectorXd& fitted, const TimeSeries& training) {
    if (actual.size() != fitted.size())
        throw Error(ErrorKind::InvalidArgument, "accuracy: actual and fitted lengths differ");

    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(actual.size()));
    double pe_sum = 0.0, ape_sum = 0.0;
    int pe_count = 0, skipped = 0;
    for (Eigen::Index i = 0; i < actual.size(); ++i) {
        if (std::isnan(actual[i]) || std::isnan(fitted[i]))
            continue;
        const double e = actual[i] - fitted[i];
        errors.push_back(e);
        if (actual[i] == 0.0) {
            ++skipped;
            continue;
        }
        pe_sum += e / actual[i];
        ape_sum += std::abs(e / actual[i]);
        ++pe_count;
    }
    if (errors.empty())
        throw Error(ErrorKind::InvalidArgument, "accuracy: no aligned observations");
    if (pe_count == 0)
        throw Error(ErrorKind::Degenerate, "accuracy: MAPE undefined, every actual value is zero");

    const Eigen::Map<const Eigen::VectorXd> e(errors.data(), static_cast<Eigen::Index>(errors.size()));
    const double count = static_cast<double>(e.size());

    AccuracyMeasures out;
    out.me = e.sum() / count;
    out.rmse = std::sqrt(e.squaredNorm() / count);
    out.mae = e.cwiseAbs().sum() / count;
    out.mpe = 100.0 * pe_sum / pe_count;
    out.mape = 100.0 * ape_sum / pe_count;
    out.mase = out.mae / seasonal_naive_scale(training);
    out.zero_actuals_skipped = skipped;
    out.acf1 = std::numeric_limits<double>::quiet_NaN();
    if (e.size() >= 2) {
        try {
            out.acf1 = acf(e, 1)[0];
        } catch (const Error&) {
        }
    }
    return out;
}

LjungBoxResult ljung_box(const Eigen::VectorXd& residuals, int lags_used, int model_df) {
    const Eigen::Index n = residuals.size();
    if (lags_used < 1 || model_df < 0 || lags_used <= model_df)
        throw Error(ErrorKind::InvalidArgument, "ljung_box: need lags_used > model_df >= 0");
    if (n <= lags_used)
        throw Error(ErrorKind::InvalidArgument, "ljung_box: more lags than residuals");

    const Eigen::VectorXd r = acf(residuals, lags_used);
    const double nd = static_cast<double>(n);
    double sum = 0.0;
    for (int k = 1; k <= lags_used; ++k)
        sum += r[k - 1] * r[k - 1] / (nd - k);

    LjungBoxResult out;
    out.q_star = nd * (nd + 2.0) * sum;
    out.lags_used = lags_used;
    out.model_df = model_df;
    out.df = lags_used - model_df;
    out.p_value = chi_squared_sf(out.q_star, out.df);
    return out;
}

Histogram sturges_histogram(const Eigen::VectorXd& values) {
    const Eigen::Index n = values.size();
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "histogram: no values");
    const int bins = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    const double lo = values.minCoeff(), hi = values.maxCoeff();
    const double width = hi > lo ? (hi - lo) / bins : 1.0;

    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins + 1));
    for (int b = 0; b <= bins; ++b)
        h.edges[static_cast<std::size_t>(b)] = lo + b * width;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int b = std::clamp(static_cast<int>((values[i] - lo) / width), 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(b)];
    }
    return h;
}

ResidualBundle residual_bundle(const Eigen::VectorXd& residuals) {
    const Eigen::Index n = residuals.size();
    if (n < 2)
        throw Error(ErrorKind::InvalidArgument, "residual_bundle: need at least two residuals");
    ResidualBundle out;
    out.residuals = residuals;
    out.acf = acf(residuals, std::clamp<Eigen::Index>(n / 4, 1, 24));
    out.acf_band = 2.0 / std::sqrt(static_cast<double>(n));
    out.histogram = sturges_histogram(residuals);
    return out;
}

}  // namespace petrocast
