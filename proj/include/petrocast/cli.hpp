#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "petrocast/core.hpp"
#include "petrocast/sarima.hpp"

namespace petrocast {

enum class Command { List, Inspect, Fit, Forecast, Compare };
enum class Transform { None, Diff, SeasonalDiff };
enum class ModelKind { SNaive, Ets, Arima, AutoCompare };

struct RunConfig {
    Command command = Command::Forecast;
    std::filesystem::path input;
    /// Empty means "the only series in the file".
    std::string msn;
    std::optional<MonthStamp> from;
    std::optional<MonthStamp> to;
    Transform transform = Transform::None;
    ModelKind model = ModelKind::Arima;
    /// Fixed SARIMA order; automatic selection when absent.
    std::optional<SarimaOrder> order;
    int horizon = 24;
    std::vector<double> levels{0.80, 0.95};
    std::uint64_t seed = 42;
    /// Artifacts are only written when set.
    std::optional<std::filesystem::path> out_dir;
    /// Any of "csv", "json".
    std::vector<std::string> formats{"csv"};
};

std::string to_string(Transform transform);
std::string to_string(ModelKind model);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int data = 3;
inline constexpr int fit = 4;
}  // namespace exit_code

/// Exit code for a library error kind.
int exit_code_for(ErrorKind kind) noexcept;

/// Runs one command. Errors are reported on `err` as one JSON line followed by
/// a human-readable line, and mapped to the exit codes above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and calls run().
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace petrocast
