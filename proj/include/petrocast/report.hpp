#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "petrocast/diagnostics.hpp"
#include "petrocast/ets.hpp"
#include "petrocast/sarima.hpp"
#include "petrocast/snaive.hpp"

namespace petrocast {

struct Diagnostics {
    AccuracyMeasures accuracy;
    std::optional<LjungBoxResult> ljung_box;
};

Diagnostics diagnose(const SNaiveFit& fit, int lags = kDefaultLjungBoxLags);
Diagnostics diagnose(const EtsFit& fit, int lags = kDefaultLjungBoxLags);
Diagnostics diagnose(const SarimaFit& fit, int lags = kDefaultLjungBoxLags);

/// 7 significant digits, like "%.7g".
std::string format_sig7(double value);

/// `series_label` names the fitted data in the "Call"/"Series" line.
std::string render_report(const SNaiveFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label = "Y");
std::string render_report(const EtsFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label = "Y");
std::string render_report(const SarimaFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label = "Y");

enum class TableFormat { Csv, Json };

/// CSV header: month,point,lo80,hi80,lo95,hi95 (one lo/hi pair per level).
std::string forecast_csv(const Forecast& forecast);
std::string forecast_json(const Forecast& forecast);
void emit_table(const Forecast& forecast, TableFormat format, const std::filesystem::path& destination);

/// Writes text to a file, throwing ErrorKind::Io on failure.
void write_text(const std::filesystem::path& destination, const std::string& text);

// Plot data, one CSV per figure type.
std::string series_csv(const TimeSeries& ts);
std::string seasonal_plot_csv(const TimeSeries& ts);
std::string subseries_csv(const TimeSeries& ts);
std::string residual_series_csv(const Eigen::VectorXd& residuals, const TimeSeries& training, Eigen::Index offset);
std::string residual_acf_csv(const ResidualBundle& bundle);
std::string residual_histogram_csv(const ResidualBundle& bundle);
std::string forecast_fan_csv(const TimeSeries& history, const Forecast& forecast);

}  // namespace petrocast
