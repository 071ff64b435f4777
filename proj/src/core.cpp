#include "petrocast/core.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace petrocast {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate_series";
    case ErrorKind::InsufficientData: return "insufficient_data";
    case ErrorKind::Range: return "range";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Discontinuity: return "discontinuity";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InvalidStart: return "invalid_start";
    case ErrorKind::Differentiation: return "differentiation";
    case ErrorKind::SingularForecast: return "singular_forecast";
    case ErrorKind::FitFailed: return "fit_failed";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

namespace {

constexpr std::array<const char*, 12> kMonthNames = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

int parse_int(std::string_view text) {
    int value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw Error(ErrorKind::Parse, "not an integer: '" + std::string(text) + "'");
    return value;
}

}  // namespace

std::string month_abbrev(int month) {
    if (month < 1 || month > 12)
        throw Error(ErrorKind::InvalidArgument, "month out of range");
    return kMonthNames[static_cast<std::size_t>(month - 1)];
}

MonthStamp::MonthStamp(int year, int month) : year_(year), month_(month) {
    if (month < 1 || month > 12)
        throw Error(ErrorKind::InvalidArgument,
                    "month must be in 1..12, got " + std::to_string(month));
}

MonthStamp MonthStamp::from_yyyymm(int yyyymm) { return MonthStamp(yyyymm / 100, yyyymm % 100); }

MonthStamp MonthStamp::parse(std::string_view text) {
    if (text.size() == 7 && text[4] == '-')
        return MonthStamp(parse_int(text.substr(0, 4)), parse_int(text.substr(5, 2)));
    if (text.size() == 6)
        return from_yyyymm(parse_int(text));
    throw Error(ErrorKind::Parse, "expected YYYY-MM or YYYYMM, got '" + std::string(text) + "'");
}

MonthStamp MonthStamp::plus(long months) const {
    const long index = static_cast<long>(year_) * 12 + (month_ - 1) + months;
    const long year = index >= 0 ? index / 12 : -((-index + 11) / 12);
    return MonthStamp(static_cast<int>(year), static_cast<int>(index - year * 12) + 1);
}

long MonthStamp::months_until(const MonthStamp& other) const noexcept {
    return (static_cast<long>(other.year_) - year_) * 12 + (other.month_ - month_);
}

std::string MonthStamp::label() const {
    return std::string(kMonthNames[static_cast<std::size_t>(month_ - 1)]) + " " + std::to_string(year_);
}

std::string MonthStamp::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
    return buf;
}

TimeSeries::TimeSeries(MonthStamp start, Eigen::VectorXd values, int period)
    : start_(start), values_(std::move(values)), period_(period) {
    if (period_ < 1)
        throw Error(ErrorKind::InvalidArgument, "period must be positive");
    if (values_.size() < 1)
        throw Error(ErrorKind::InvalidArgument, "time series must hold at least one value");
    if (!values_.allFinite())
        throw Error(ErrorKind::InvalidArgument, "time series values must be finite");
}

TimeSeries::TimeSeries(MonthStamp start, const std::vector<double>& values, int period)
    : TimeSeries(start, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())),
                 period) {}

int TimeSeries::season_of(Eigen::Index i) const {
    if (period_ == 12)
        return stamp_at(i).month() - 1;
    return static_cast<int>(i % period_);
}

void Forecast::check_invariants(double tol) const {
    const Band* inner = nullptr;
    for (const auto& [level, band] : intervals) {
        if (band.lower.size() != points.size() || band.upper.size() != points.size())
            throw Error(ErrorKind::InvalidArgument, "forecast band length mismatch");
        for (Eigen::Index h = 0; h < points.size(); ++h) {
            if (band.lower[h] > points[h] + tol || band.upper[h] < points[h] - tol)
                throw Error(ErrorKind::InvalidArgument, "forecast band does not contain point");
            if (inner && (band.lower[h] > inner->lower[h] + tol || band.upper[h] < inner->upper[h] - tol))
                throw Error(ErrorKind::InvalidArgument, "forecast bands are not nested");
        }
        inner = &band;
    }
}

TimeSeries difference(const TimeSeries& ts, int lag) {
    const Eigen::Index n = ts.size();
    if (lag < 1)
        throw Error(ErrorKind::InvalidArgument, "difference: lag must be positive");
    if (lag >= n)
        throw Error(ErrorKind::InvalidArgument, "difference: lag must be shorter than the series");
    const auto& y = ts.values();
    Eigen::VectorXd out = y.tail(n - lag) - y.head(n - lag);
    return TimeSeries(ts.start().plus(lag), std::move(out), ts.period());
}

TimeSeries reintegrate(const TimeSeries& diffs, const Eigen::VectorXd& anchors, int lag) {
    if (lag < 1 || anchors.size() != lag)
        throw Error(ErrorKind::InvalidArgument, "reintegrate: need exactly `lag` anchor values");
    const Eigen::Index n = diffs.size() + lag;
    Eigen::VectorXd y(n);
    y.head(lag) = anchors;
    for (Eigen::Index t = lag; t < n; ++t)
        y[t] = y[t - lag] + diffs[t - lag];
    return TimeSeries(diffs.start().plus(-lag), std::move(y), diffs.period());
}

TimeSeries slice(const TimeSeries& ts, const MonthStamp& from, const MonthStamp& to) {
    if (to < from)
        throw Error(ErrorKind::Range, "slice: 'from' is after 'to'");
    if (from < ts.start() || ts.end() < to)
        throw Error(ErrorKind::Range, "slice: range " + from.iso() + ".." + to.iso() + " outside series span " +
                                          ts.start().iso() + ".." + ts.end().iso());
    const long offset = ts.start().months_until(from);
    const long count = from.months_until(to) + 1;
    return TimeSeries(from, Eigen::VectorXd(ts.values().segment(offset, count)), ts.period());
}

SeasonalSubseries seasonal_subseries(const TimeSeries& ts) {
    const int m = ts.period();
    if (ts.size() < m)
        throw Error(ErrorKind::InvalidArgument, "seasonal_subseries: series shorter than one period");
    SeasonalSubseries out;
    out.period = m;
    out.values.resize(static_cast<std::size_t>(m));
    out.stamps.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const auto k = static_cast<std::size_t>(ts.season_of(i));
        out.values[k].push_back(ts[i]);
        out.stamps[k].push_back(ts.stamp_at(i));
    }
    out.means.resize(m);
    for (int k = 0; k < m; ++k) {
        const auto& v = out.values[static_cast<std::size_t>(k)];
        out.means[k] = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).mean();
    }
    return out;
}

}  // namespace petrocast
