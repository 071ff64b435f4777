#include "petrocast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace petrocast {

std::string format_sig7(double value) {
    if (std::isnan(value))
        return "NaN";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", value);
    return buf;
}

namespace {

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::string level_tag(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", level * 100.0);
    return buf;
}

// Right-aligned columns; first column left-aligned.
std::string render_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : rows)
            width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const std::size_t pad = width[c] - row[c].size();
            if (c == 0)
                out << row[c] << std::string(pad, ' ');
            else
                out << ' ' << std::string(pad, ' ') << row[c];
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows)
        emit(row);
    return out.str();
}

std::string accuracy_block(const AccuracyMeasures& a) {
    return render_table({"", "ME", "RMSE", "MAE", "MPE", "MAPE", "MASE", "ACF1"},
                        {{"Training set", format_sig7(a.me), format_sig7(a.rmse), format_sig7(a.mae), format_sig7(a.mpe),
                          format_sig7(a.mape), format_sig7(a.mase), format_sig7(a.acf1)}});
}

std::string forecast_block(const Forecast& fc) {
    std::vector<std::string> header{"", "Point Forecast"};
    for (const auto& [level, band] : fc.intervals) {
        header.push_back("Lo " + level_tag(level));
        header.push_back("Hi " + level_tag(level));
    }
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index h = 0; h < fc.horizon(); ++h) {
        std::vector<std::string> row{fc.stamp(h).label(), format_sig7(fc.points[h])};
        for (const auto& [level, band] : fc.intervals) {
            row.push_back(format_sig7(band.lower[h]));
            row.push_back(format_sig7(band.upper[h]));
        }
        rows.push_back(std::move(row));
    }
    return render_table(header, rows);
}

std::string ljung_box_block(const Diagnostics& diag, const std::string& data_label) {
    if (!diag.ljung_box)
        return {};
    const LjungBoxResult& lb = *diag.ljung_box;
    char buf[256];
    const std::string p = lb.p_value < 2.2e-16 ? "< 2.2e-16" : "= " + [&] {
        char pb[32];
        std::snprintf(pb, sizeof pb, "%.4g", lb.p_value);
        return std::string(pb);
    }();
    std::snprintf(buf, sizeof buf, "Q* = %.5g, df = %d, p-value %s\n\nModel df: %d. Total lags used: %d\n", lb.q_star, lb.df,
                  p.c_str(), lb.model_df, lb.lags_used);
    return "\nLjung-Box test\n\ndata: Residuals from " + data_label + "\n" + buf;
}

std::string information_criteria(double aic, double aicc, double bic) {
    return render_table({"", "AIC", "AICc", "BIC"}, {{"", format_sig7(aic), format_sig7(aicc), format_sig7(bic)}});
}

std::string tail_sections(const Diagnostics& diag, const Forecast* forecast, const std::string& data_label) {
    std::string out = "\nError measures:\n" + accuracy_block(diag.accuracy);
    if (diag.accuracy.zero_actuals_skipped > 0)
        out += "(" + std::to_string(diag.accuracy.zero_actuals_skipped) + " zero actual values skipped in MPE/MAPE)\n";
    if (forecast)
        out += "\nForecasts:\n" + forecast_block(*forecast);
    out += ljung_box_block(diag, data_label);
    return out;
}

int default_lags(Eigen::Index n, int requested, int model_df) {
    const int lags = static_cast<int>(std::min<Eigen::Index>(requested, n - 1));
    return lags > model_df ? lags : -1;
}

std::optional<LjungBoxResult> maybe_ljung_box(const Eigen::VectorXd& residuals, int lags, int model_df) {
    const int use = default_lags(residuals.size(), lags, model_df);
    if (use < 1)
        return std::nullopt;
    try {
        return ljung_box(residuals, use, model_df);
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

Diagnostics diagnose(const SNaiveFit& fit, int lags) {
    const auto& y = fit.training.values();
    const Eigen::VectorXd actual = y.tail(fit.fitted.size());
    return {accuracy(actual, fit.fitted, fit.training), maybe_ljung_box(fit.residuals, lags, 0)};
}

Diagnostics diagnose(const EtsFit& fit, int lags) {
    return {accuracy(fit.training.values(), fit.fitted, fit.training), maybe_ljung_box(fit.residuals, lags, fit.model_df())};
}

Diagnostics diagnose(const SarimaFit& fit, int lags) {
    const Eigen::VectorXd actual = fit.training.values().tail(fit.fitted.size());
    return {accuracy(actual, fit.fitted, fit.training), maybe_ljung_box(fit.residuals, lags, fit.model_df())};
}

std::string render_report(const SNaiveFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label) {
    std::string out = "Forecast method: Seasonal naive method\n\nModel information:\nCall: snaive(y = " + series_label +
                      ")\n\nResidual sd: " + format_sig7(fit.residual_sd) + "\n";
    return out + tail_sections(diag, forecast, "Seasonal naive method");
}

std::string render_report(const EtsFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label) {
    std::ostringstream out;
    out << "Forecast method: " << fit.spec.label() << "\n\nModel information:\n" << fit.spec.label()
        << "\n\nCall:\nets(y = " << series_label << ")\n\nSmoothing parameters:\n  alpha = " << format_sig7(fit.params.alpha)
        << '\n';
    if (fit.spec.seasonal())
        out << "  gamma = " << format_sig7(fit.params.gamma) << '\n';
    out << "\nInitial states:\n  l = " << format_sig7(fit.initial.level) << '\n';
    if (fit.spec.seasonal()) {
        out << "  s =";
        for (Eigen::Index j = 0; j < fit.initial.seasonal.size(); ++j) {
            if (j > 0 && j % 6 == 0)
                out << "\n     ";
            out << ' ' << format_sig7(fit.initial.seasonal[j]);
        }
        out << '\n';
    }
    out << "\nsigma: " << format_sig7(fit.sigma) << "\nlog likelihood: " << format_sig7(fit.loglik) << "\n\n"
        << information_criteria(fit.aic, fit.aicc, fit.bic);
    return out.str() + tail_sections(diag, forecast, fit.spec.label());
}

std::string render_report(const SarimaFit& fit, const Diagnostics& diag, const Forecast* forecast,
                          const std::string& series_label) {
    std::ostringstream out;
    out << "Forecast method: " << fit.order.label() << "\n\nModel information:\nSeries: " << series_label << '\n'
        << fit.order.label() << "\n\n";
    const auto names = fit.coefficient_names();
    if (!names.empty()) {
        const Eigen::VectorXd coefs = fit.coefficient_vector();
        std::vector<std::string> header{""};
        std::vector<std::string> est{""}, se{"s.e."};
        for (std::size_t i = 0; i < names.size(); ++i) {
            header.push_back(names[i]);
            est.push_back(format_sig7(coefs[static_cast<Eigen::Index>(i)]));
            se.push_back(format_sig7(fit.std_errors[static_cast<Eigen::Index>(i)]));
        }
        out << "Coefficients:\n" << render_table(header, {est, se}) << '\n';
    }
    out << "sigma^2 = " << format_sig7(fit.sigma2) << ": log likelihood = " << format_sig7(fit.loglik) << '\n'
        << information_criteria(fit.aic, fit.aicc, fit.bic);
    if (!fit.converged)
        out << "(optimizer stopped at its iteration budget)\n";
    return out.str() + tail_sections(diag, forecast, fit.order.label());
}

std::string forecast_csv(const Forecast& fc) {
    std::ostringstream out;
    out << "month,point";
    for (const auto& [level, band] : fc.intervals)
        out << ",lo" << level_tag(level) << ",hi" << level_tag(level);
    out << '\n';
    for (Eigen::Index h = 0; h < fc.horizon(); ++h) {
        out << fc.stamp(h).iso() << ',' << fixed6(fc.points[h]);
        for (const auto& [level, band] : fc.intervals)
            out << ',' << fixed6(band.lower[h]) << ',' << fixed6(band.upper[h]);
        out << '\n';
    }
    return out.str();
}

std::string forecast_json(const Forecast& fc) {
    auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
    auto vec = [&](const Eigen::VectorXd& v) {
        nlohmann::json arr = nlohmann::json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i)
            arr.push_back(round6(v[i]));
        return arr;
    };
    nlohmann::json doc;
    doc["method_label"] = fc.method_label;
    doc["origin"] = fc.origin.iso();
    doc["horizon"] = fc.horizon();
    nlohmann::json months = nlohmann::json::array();
    for (Eigen::Index h = 0; h < fc.horizon(); ++h)
        months.push_back(fc.stamp(h).iso());
    doc["months"] = months;
    doc["points"] = vec(fc.points);
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& [level, band] : fc.intervals)
        intervals.push_back({{"level", level}, {"lower", vec(band.lower)}, {"upper", vec(band.upper)}});
    doc["intervals"] = intervals;
    return doc.dump(2) + "\n";
}

void write_text(const std::filesystem::path& destination, const std::string& text) {
    std::ofstream file(destination, std::ios::binary);
    if (!file)
        throw Error(ErrorKind::Io, "cannot open '" + destination.string() + "' for writing");
    file << text;
    if (!file)
        throw Error(ErrorKind::Io, "failed writing '" + destination.string() + "'");
}

void emit_table(const Forecast& forecast, TableFormat format, const std::filesystem::path& destination) {
    write_text(destination, format == TableFormat::Csv ? forecast_csv(forecast) : forecast_json(forecast));
}

std::string series_csv(const TimeSeries& ts) {
    std::ostringstream out;
    out << "month,value\n";
    for (Eigen::Index i = 0; i < ts.size(); ++i)
        out << ts.stamp_at(i).iso() << ',' << fixed6(ts[i]) << '\n';
    return out.str();
}

std::string seasonal_plot_csv(const TimeSeries& ts) {
    std::ostringstream out;
    out << "year,season,value\n";
    for (Eigen::Index i = 0; i < ts.size(); ++i)
        out << ts.stamp_at(i).year() << ',' << ts.season_of(i) + 1 << ',' << fixed6(ts[i]) << '\n';
    return out.str();
}

std::string subseries_csv(const TimeSeries& ts) {
    const SeasonalSubseries sub = seasonal_subseries(ts);
    std::ostringstream out;
    out << "season,month,value,season_mean\n";
    for (int k = 0; k < sub.period; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < sub.values[ku].size(); ++i)
            out << k + 1 << ',' << sub.stamps[ku][i].iso() << ',' << fixed6(sub.values[ku][i]) << ','
                << fixed6(sub.means[k]) << '\n';
    }
    return out.str();
}

std::string residual_series_csv(const Eigen::VectorXd& residuals, const TimeSeries& training, Eigen::Index offset) {
    std::ostringstream out;
    out << "month,residual\n";
    for (Eigen::Index i = 0; i < residuals.size(); ++i)
        out << training.stamp_at(i + offset).iso() << ',' << fixed6(residuals[i]) << '\n';
    return out.str();
}

std::string residual_acf_csv(const ResidualBundle& bundle) {
    std::ostringstream out;
    out << "lag,acf,band_lower,band_upper\n";
    for (Eigen::Index k = 0; k < bundle.acf.size(); ++k)
        out << k + 1 << ',' << fixed6(bundle.acf[k]) << ',' << fixed6(-bundle.acf_band) << ',' << fixed6(bundle.acf_band)
            << '\n';
    return out.str();
}

std::string residual_histogram_csv(const ResidualBundle& bundle) {
    std::ostringstream out;
    out << "bin_lower,bin_upper,count\n";
    for (std::size_t b = 0; b < bundle.histogram.counts.size(); ++b)
        out << fixed6(bundle.histogram.edges[b]) << ',' << fixed6(bundle.histogram.edges[b + 1]) << ','
            << bundle.histogram.counts[b] << '\n';
    return out.str();
}

std::string forecast_fan_csv(const TimeSeries& history, const Forecast& fc) {
    std::ostringstream out;
    out << "month,kind,value";
    for (const auto& [level, band] : fc.intervals)
        out << ",lo" << level_tag(level) << ",hi" << level_tag(level);
    out << '\n';
    for (Eigen::Index i = 0; i < history.size(); ++i) {
        out << history.stamp_at(i).iso() << ",observed," << fixed6(history[i]);
        for (std::size_t k = 0; k < fc.intervals.size(); ++k)
            out << ",,";
        out << '\n';
    }
    for (Eigen::Index h = 0; h < fc.horizon(); ++h) {
        out << fc.stamp(h).iso() << ",forecast," << fixed6(fc.points[h]);
        for (const auto& [level, band] : fc.intervals)
            out << ',' << fixed6(band.lower[h]) << ',' << fixed6(band.upper[h]);
        out << '\n';
    }
    return out.str();
}

}  // namespace petrocast
