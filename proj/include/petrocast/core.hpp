#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "petrocast/error.hpp"

namespace petrocast {

/// Calendar month. Ordered by (year, month).
class MonthStamp {
public:
    MonthStamp() = default;
    MonthStamp(int year, int month);

    /// Accepts "YYYY-MM" or "YYYYMM".
    static MonthStamp parse(std::string_view text);
    static MonthStamp from_yyyymm(int yyyymm);

    int year() const noexcept { return year_; }
    int month() const noexcept { return month_; }

    MonthStamp plus(long months) const;
    /// Signed number of months from *this to other.
    long months_until(const MonthStamp& other) const noexcept;

    int yyyymm() const noexcept { return year_ * 100 + month_; }
    /// "Apr 2022"
    std::string label() const;
    /// "2022-04"
    std::string iso() const;

    friend auto operator<=>(const MonthStamp&, const MonthStamp&) = default;

private:
    int year_ = 1970;
    int month_ = 1;
};

/// Contiguous monthly series. Values are finite and immutable once built.
class TimeSeries {
public:
    TimeSeries(MonthStamp start, Eigen::VectorXd values, int period = 12);
    TimeSeries(MonthStamp start, const std::vector<double>& values, int period = 12);

    const MonthStamp& start() const noexcept { return start_; }
    MonthStamp end() const { return start_.plus(size() - 1); }
    MonthStamp stamp_at(Eigen::Index i) const { return start_.plus(i); }
    int period() const noexcept { return period_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    double operator[](Eigen::Index i) const { return values_[i]; }

    /// Position of a calendar month within a seasonal cycle; for monthly data
    /// this is month − 1.
    int season_of(Eigen::Index i) const;

private:
    MonthStamp start_;
    Eigen::VectorXd values_;
    int period_;
};

struct Band {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

struct Forecast {
    MonthStamp origin;
    Eigen::VectorXd points;
    std::map<double, Band> intervals;
    std::string method_label;

    Eigen::Index horizon() const noexcept { return points.size(); }
    MonthStamp stamp(Eigen::Index h) const { return origin.plus(h + 1); }

    /// Throws if lower <= point <= upper or band nesting is violated.
    void check_invariants(double tol = 1e-9) const;
};

TimeSeries difference(const TimeSeries& ts, int lag);

/// Inverse of difference: anchors are the first `lag` values of the
/// undifferenced series, in time order.
TimeSeries reintegrate(const TimeSeries& diffs, const Eigen::VectorXd& anchors, int lag);

TimeSeries slice(const TimeSeries& ts, const MonthStamp& from, const MonthStamp& to);

/// Sample autocorrelations r_1..r_max_lag with the biased (1/n) covariance.
/// r_0 = 1 is implied and not returned.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
acf(const Eigen::MatrixBase<Derived>& values, Eigen::Index max_lag) {
    using Scalar = typename Derived::Scalar;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = values.size();
    if (max_lag < 1)
        throw Error(ErrorKind::InvalidArgument, "acf: max_lag must be positive");
    if (n < max_lag + 1)
        throw Error(ErrorKind::InvalidArgument, "acf: series shorter than max_lag + 1");

    const Vec centred = values.derived().array() - values.mean();
    const Scalar denom = centred.squaredNorm();
    if (!(denom > Scalar(0)))
        throw Error(ErrorKind::Degenerate, "acf: zero-variance series");

    Vec r(max_lag);
    for (Eigen::Index k = 1; k <= max_lag; ++k)
        r[k - 1] = centred.head(n - k).dot(centred.tail(n - k)) / denom;
    return r;
}

struct SeasonalSubseries {
    int period = 12;
    /// values[k] holds every observation in season k (month k+1), in time order.
    std::vector<std::vector<double>> values;
    std::vector<std::vector<MonthStamp>> stamps;
    Eigen::VectorXd means;
};

SeasonalSubseries seasonal_subseries(const TimeSeries& ts);

std::string month_abbrev(int month);

}  // namespace petrocast
