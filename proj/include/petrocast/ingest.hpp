#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "petrocast/core.hpp"

namespace petrocast {

/// One row of an EIA Monthly Energy Review CSV extract.
struct MerRecord {
    std::string msn;
    int yyyymm = 0;
    std::optional<double> value;
    std::string description;
    std::string unit;
};

struct LoadedSeries {
    TimeSeries series;
    std::string msn;
    std::string description;
    std::string unit;
};

struct CatalogEntry {
    std::string msn;
    std::string description;
    std::string unit;
    MonthStamp first;
    MonthStamp last;
    std::size_t observations = 0;
};

using MonthRange = std::pair<std::optional<MonthStamp>, std::optional<MonthStamp>>;

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

/// Parses every data row. Requires MSN, YYYYMM and Value headers
/// (case-insensitive); Description and Unit are optional.
std::vector<MerRecord> read_mer_records(std::istream& source);

/// Monthly rows of one series (annual month-13 rows and not-available values
/// dropped), sorted, restricted to `range` and checked for gaps.
LoadedSeries load_mer_csv(std::istream& source, const std::string& msn, const MonthRange& range = {});

std::vector<CatalogEntry> list_series(std::istream& source);

/// Writes MER-shaped rows (MSN,YYYYMM,Value,Description,Unit).
void write_mer_csv(std::ostream& out, const LoadedSeries& loaded);

}  // namespace petrocast
