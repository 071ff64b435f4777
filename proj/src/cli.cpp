#include "petrocast/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "petrocast/diagnostics.hpp"
#include "petrocast/ets.hpp"
#include "petrocast/ingest.hpp"
#include "petrocast/report.hpp"
#include "petrocast/snaive.hpp"

namespace petrocast {

std::string to_string(Transform transform) {
    switch (transform) {
    case Transform::None: return "none";
    case Transform::Diff: return "diff";
    case Transform::SeasonalDiff: return "seasonal-diff";
    }
    return "none";
}

std::string to_string(ModelKind model) {
    switch (model) {
    case ModelKind::SNaive: return "snaive";
    case ModelKind::Ets: return "ets";
    case ModelKind::Arima: return "arima";
    case ModelKind::AutoCompare: return "auto-compare";
    }
    return "arima";
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidStart:
    case ErrorKind::Differentiation:
    case ErrorKind::SingularForecast:
    case ErrorKind::FitFailed:
        return exit_code::fit;
    default:
        return exit_code::data;
    }
}

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int report_error(std::ostream& err, const std::string& kind, int code, const std::string& message) {
    nlohmann::json record{{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
    err << record.dump() << '\n' << "petrocast: error: " << message << '\n';
    return code;
}

using AnyFit = std::variant<SNaiveFit, EtsFit, SarimaFit>;

struct Loaded {
    LoadedSeries raw;
    TimeSeries model_input;
    std::string label;  // name of the fitted data in reports
};

std::string resolve_msn(const RunConfig& config) {
    if (!config.msn.empty())
        return config.msn;
    std::ifstream file(config.input);
    const auto catalog = list_series(file);
    if (catalog.size() != 1)
        throw UsageError("--msn is required when the input holds " + std::to_string(catalog.size()) + " series");
    return catalog.front().msn;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw Error(ErrorKind::Io, "cannot open input '" + path.string() + "'");
    return file;
}

TimeSeries apply_transform(const TimeSeries& ts, Transform transform) {
    switch (transform) {
    case Transform::None: return ts;
    case Transform::Diff: return difference(ts, 1);
    case Transform::SeasonalDiff: return difference(ts, ts.period());
    }
    return ts;
}

Loaded load(const RunConfig& config) {
    const std::string msn = resolve_msn(config);
    auto file = open_input(config.input);
    LoadedSeries raw = load_mer_csv(file, msn, {config.from, config.to});
    TimeSeries input = apply_transform(raw.series, config.transform);
    const char* label = config.transform == Transform::Diff ? "DY" : config.transform == Transform::SeasonalDiff ? "SDY" : "Y";
    return {std::move(raw), std::move(input), label};
}

AnyFit fit_model(ModelKind model, const TimeSeries& ts, const RunConfig& config) {
    switch (model) {
    case ModelKind::SNaive: return fit_snaive(ts);
    case ModelKind::Ets: return auto_ets(ts);
    default: return config.order ? fit_sarima(ts, *config.order) : auto_sarima(ts);
    }
}

std::string method_label(const AnyFit& fit) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SNaiveFit>)
                return "Seasonal naive method";
            else if constexpr (std::is_same_v<T, EtsFit>)
                return f.spec.label();
            else
                return f.order.label();
        },
        fit);
}

Forecast forecast_any(const AnyFit& fit, const RunConfig& config) {
    return std::visit(
        [&](const auto& f) -> Forecast {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SNaiveFit>)
                return forecast_snaive(f, config.horizon, config.levels);
            else if constexpr (std::is_same_v<T, EtsFit>)
                return forecast_ets(f, config.horizon, config.levels, config.seed);
            else
                return forecast_sarima(f, config.horizon, config.levels);
        },
        fit);
}

std::pair<const Eigen::VectorXd*, Eigen::Index> residuals_of(const AnyFit& fit) {
    return std::visit(
        [](const auto& f) -> std::pair<const Eigen::VectorXd*, Eigen::Index> {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SNaiveFit>)
                return {&f.residuals, f.period};
            else if constexpr (std::is_same_v<T, EtsFit>)
                return {&f.residuals, 0};
            else
                return {&f.residuals, f.offset};
        },
        fit);
}

nlohmann::json diagnostics_json(const Diagnostics& diag, const std::string& model, const RunConfig& config,
                                const Loaded& data) {
    const AccuracyMeasures& a = diag.accuracy;
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json doc{{"msn", data.raw.msn},
                       {"transform", to_string(config.transform)},
                       {"model", model},
                       {"accuracy",
                        {{"me", num(a.me)},
                         {"rmse", num(a.rmse)},
                         {"mae", num(a.mae)},
                         {"mpe", num(a.mpe)},
                         {"mape", num(a.mape)},
                         {"mase", num(a.mase)},
                         {"acf1", num(a.acf1)},
                         {"zero_actuals_skipped", a.zero_actuals_skipped}}}};
    if (diag.ljung_box) {
        const LjungBoxResult& lb = *diag.ljung_box;
        doc["ljung_box"] = {{"q_star", lb.q_star},   {"df", lb.df},           {"p_value", lb.p_value},
                            {"lags_used", lb.lags_used}, {"model_df", lb.model_df}};
    } else {
        doc["ljung_box"] = nullptr;
    }
    return doc;
}

std::string preamble(const RunConfig& config, const Loaded& data) {
    std::ostringstream out;
    out << "Series: " << data.raw.msn;
    if (!data.raw.description.empty())
        out << " (" << data.raw.description << ")";
    out << "\nSample: " << data.raw.series.start().iso() << " to " << data.raw.series.end().iso() << ", "
        << data.raw.series.size() << " months\nTransform: " << to_string(config.transform) << "\n\n";
    return out.str();
}

bool wants(const RunConfig& config, const std::string& format) {
    return std::find(config.formats.begin(), config.formats.end(), format) != config.formats.end();
}

std::filesystem::path prepare_out_dir(const RunConfig& config) {
    std::error_code ec;
    std::filesystem::create_directories(*config.out_dir, ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create output directory '" + config.out_dir->string() + "': " + ec.message());
    return *config.out_dir;
}

void write_series_plots(const std::filesystem::path& dir, const Loaded& data) {
    write_text(dir / "series.csv", series_csv(data.raw.series));
    if (data.raw.series.size() > 1)
        write_text(dir / "differenced.csv", series_csv(difference(data.raw.series, 1)));
    write_text(dir / "seasonal.csv", seasonal_plot_csv(data.model_input));
    write_text(dir / "subseries.csv", subseries_csv(data.model_input));
}

int run_list(const RunConfig& config, std::ostream& out) {
    auto file = open_input(config.input);
    const auto catalog = list_series(file);
    std::vector<std::string> lines;
    out << "msn,first,last,observations,unit,description\n";
    for (const CatalogEntry& e : catalog) {
        std::vector<std::string> fields{e.msn, e.first.iso(), e.last.iso(), std::to_string(e.observations), e.unit,
                                        e.description};
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string& f = fields[i];
            if (i)
                out << ',';
            if (f.find_first_of(",\"") != std::string::npos) {
                out << '"';
                for (char c : f)
                    out << (c == '"' ? "\"\"" : std::string(1, c));
                out << '"';
            } else {
                out << f;
            }
        }
        out << '\n';
    }
    return exit_code::ok;
}

int run_inspect(const RunConfig& config, std::ostream& out) {
    const Loaded data = load(config);
    const TimeSeries& ts = data.model_input;
    const auto& y = ts.values();
    out << preamble(config, data);
    out << "Observations used: " << ts.size() << " (" << ts.start().iso() << " to " << ts.end().iso() << ")\n"
        << "Min: " << format_sig7(y.minCoeff()) << "  Max: " << format_sig7(y.maxCoeff())
        << "  Mean: " << format_sig7(y.mean()) << '\n';
    if (ts.size() >= 3 * ts.period()) {
        out << "Seasonal strength: " << format_sig7(seasonal_strength(ts)) << '\n';
        const int D = nsdiffs(ts);
        const TimeSeries seasonal = D > 0 ? difference(ts, ts.period()) : ts;
        out << "Suggested differencing: d = " << ndiffs(seasonal) << ", D = " << D << '\n';
    }
    if (config.out_dir)
        write_series_plots(prepare_out_dir(config), data);
    return exit_code::ok;
}

int run_compare(const RunConfig& config, std::ostream& out) {
    const Loaded data = load(config);
    const std::vector<ModelKind> kinds{ModelKind::SNaive, ModelKind::Ets, ModelKind::Arima};
    std::vector<std::future<AnyFit>> jobs;
    for (ModelKind kind : kinds)
        jobs.push_back(std::async(std::launch::async, [&, kind] { return fit_model(kind, data.model_input, config); }));

    std::ostringstream table;
    table << "model,method,rmse,mae,mape,mase\n";
    std::ostringstream text;
    char line[256];
    std::snprintf(line, sizeof line, "%-32s %12s %12s %12s %12s\n", "Method", "RMSE", "MAE", "MAPE", "MASE");
    text << preamble(config, data) << line;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const AnyFit fit = jobs[i].get();
        const Diagnostics diag = std::visit([](const auto& f) { return diagnose(f); }, fit);
        const AccuracyMeasures& a = diag.accuracy;
        const std::string label = method_label(fit);
        std::snprintf(line, sizeof line, "%-32s %12s %12s %12s %12s\n", label.c_str(), format_sig7(a.rmse).c_str(),
                      format_sig7(a.mae).c_str(), format_sig7(a.mape).c_str(), format_sig7(a.mase).c_str());
        text << line;
        table << to_string(kinds[i]) << ',' << label << ',' << format_sig7(a.rmse) << ',' << format_sig7(a.mae) << ','
              << format_sig7(a.mape) << ',' << format_sig7(a.mase) << '\n';
    }
    out << text.str();
    if (config.out_dir) {
        const auto dir = prepare_out_dir(config);
        write_text(dir / "compare.txt", text.str());
        write_text(dir / "compare.csv", table.str());
    }
    return exit_code::ok;
}

int run_model(const RunConfig& config, std::ostream& out) {
    const Loaded data = load(config);
    const AnyFit fit = fit_model(config.model, data.model_input, config);
    const Diagnostics diag = std::visit([](const auto& f) { return diagnose(f); }, fit);

    std::optional<Forecast> fc;
    if (config.command == Command::Forecast) {
        fc = forecast_any(fit, config);
        fc->check_invariants();
    }
    const std::string report =
        preamble(config, data) +
        std::visit([&](const auto& f) { return render_report(f, diag, fc ? &*fc : nullptr, data.label); }, fit);
    out << report;

    if (!config.out_dir)
        return exit_code::ok;
    const auto dir = prepare_out_dir(config);
    write_text(dir / "report.txt", report);
    write_text(dir / "diagnostics.json", diagnostics_json(diag, method_label(fit), config, data).dump(2) + "\n");
    write_series_plots(dir, data);

    const auto [residuals, offset] = residuals_of(fit);
    write_text(dir / "residuals.csv", residual_series_csv(*residuals, data.model_input, offset));
    if (residuals->size() >= 2) {
        try {
            const ResidualBundle bundle = residual_bundle(*residuals);
            write_text(dir / "residual_acf.csv", residual_acf_csv(bundle));
            write_text(dir / "residual_hist.csv", residual_histogram_csv(bundle));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Degenerate)
                throw;
        }
    }
    if (fc) {
        if (wants(config, "csv"))
            emit_table(*fc, TableFormat::Csv, dir / "forecast.csv");
        if (wants(config, "json")) {
            auto doc = nlohmann::json::parse(forecast_json(*fc));
            doc["transform"] = to_string(config.transform);
            doc["msn"] = data.raw.msn;
            write_text(dir / "forecast.json", doc.dump(2) + "\n");
        }
        write_text(dir / "forecast_fan.csv", forecast_fan_csv(data.model_input, *fc));
    }
    return exit_code::ok;
}

void validate(const RunConfig& config) {
    if (config.horizon < 1)
        throw UsageError("--horizon must be at least 1");
    if (config.levels.empty())
        throw UsageError("--levels needs at least one value");
    for (double level : config.levels)
        if (!(level > 0.0 && level < 1.0))
            throw UsageError("--levels values must lie strictly between 0 and 1");
    for (const std::string& f : config.formats)
        if (f != "csv" && f != "json")
            throw UsageError("--format accepts csv and json");
    if (config.from && config.to && *config.to < *config.from)
        throw UsageError("--to precedes --from");
    if (config.order)
        config.order->validate();
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate(config);
        switch (config.command) {
        case Command::List: return run_list(config, out);
        case Command::Inspect: return run_inspect(config, out);
        case Command::Compare: return run_compare(config, out);
        default:
            if (config.model == ModelKind::AutoCompare)
                return run_compare(config, out);
            return run_model(config, out);
        }
    } catch (const UsageError& e) {
        return report_error(err, "usage", exit_code::usage, e.what());
    } catch (const Error& e) {
        return report_error(err, std::string(to_string(e.kind())), exit_code_for(e.kind()), e.what());
    } catch (const std::exception& e) {
        return report_error(err, "internal", exit_code::fit, e.what());
    }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Monthly energy series forecasting", "petrocast"};
    app.require_subcommand(1);

    RunConfig config;
    std::string from, to, transform = "none", model = "arima", order;
    std::string levels = "0.8,0.95";
    std::string formats = "csv";
    std::string out_dir;

    auto add_input = [&](CLI::App* sub) { sub->add_option("--input", config.input, "MER CSV file")->required(); };
    auto add_series = [&](CLI::App* sub) {
        add_input(sub);
        sub->add_option("--msn", config.msn, "Series mnemonic (see `list`)");
        sub->add_option("--from", from, "First month, YYYY-MM");
        sub->add_option("--to", to, "Last month, YYYY-MM");
        sub->add_option("--transform", transform, "none | diff | seasonal-diff")
            ->check(CLI::IsMember({"none", "diff", "seasonal-diff"}));
        sub->add_option("--out", out_dir, "Directory for report, tables and plot data");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", model, "snaive | ets | arima | auto-compare")
            ->check(CLI::IsMember({"snaive", "ets", "arima", "auto-compare"}));
        sub->add_option("--order", order, "Fixed SARIMA order p,d,q,P,D,Q");
        sub->add_option("--seed", config.seed, "Seed for simulated intervals");
    };

    CLI::App* list = app.add_subcommand("list", "List series codes in a MER CSV");
    add_input(list);
    CLI::App* inspect = app.add_subcommand("inspect", "Summarise one series and write plot data");
    add_series(inspect);
    CLI::App* fit = app.add_subcommand("fit", "Fit a model and report diagnostics");
    add_series(fit);
    add_model(fit);
    CLI::App* forecast = app.add_subcommand("forecast", "Fit a model and forecast");
    add_series(forecast);
    add_model(forecast);
    forecast->add_option("--horizon", config.horizon, "Months ahead")->capture_default_str();
    forecast->add_option("--levels", levels, "Interval levels, e.g. 0.8,0.95")->capture_default_str();
    forecast->add_option("--format", formats, "csv, json or csv,json")->capture_default_str();
    CLI::App* compare = app.add_subcommand("compare", "Fit all three models and compare training accuracy");
    add_series(compare);
    add_model(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report_error(err, "usage", exit_code::usage, e.what());
    }

    try {
        if (app.got_subcommand(list))
            config.command = Command::List;
        else if (app.got_subcommand(inspect))
            config.command = Command::Inspect;
        else if (app.got_subcommand(fit))
            config.command = Command::Fit;
        else if (app.got_subcommand(forecast))
            config.command = Command::Forecast;
        else
            config.command = Command::Compare;

        if (!from.empty())
            config.from = MonthStamp::parse(from);
        if (!to.empty())
            config.to = MonthStamp::parse(to);
        config.transform = transform == "diff"            ? Transform::Diff
                           : transform == "seasonal-diff" ? Transform::SeasonalDiff
                                                          : Transform::None;
        config.model = model == "snaive" ? ModelKind::SNaive
                       : model == "ets"  ? ModelKind::Ets
                       : model == "auto-compare" ? ModelKind::AutoCompare
                                                 : ModelKind::Arima;
        if (!order.empty()) {
            if (config.model != ModelKind::Arima && config.model != ModelKind::AutoCompare)
                throw UsageError("--order only applies to --model arima");
            config.order = SarimaOrder::parse(order);
        }
        config.levels.clear();
        for (const std::string& field : split_csv_line(levels))
            config.levels.push_back(std::stod(field));
        config.formats = split_csv_line(formats);
        if (!out_dir.empty())
            config.out_dir = out_dir;
    } catch (const UsageError& e) {
        return report_error(err, "usage", exit_code::usage, e.what());
    } catch (const std::exception& e) {
        return report_error(err, "usage", exit_code::usage, e.what());
    }
    return run(config, out, err);
}

}  // namespace petrocast
