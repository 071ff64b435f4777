#include "petrocast/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace petrocast {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t");
    return std::string(s.substr(first, last - first + 1));
}

bool is_not_available(std::string_view value) {
    const std::string v = lower(trim(value));
    return v.empty() || v == "not available" || v == "na";
}

struct Columns {
    std::size_t msn, yyyymm, value;
    std::optional<std::size_t> description, unit;
};

Columns locate_columns(const std::vector<std::string>& header) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::string name = lower(trim(header[i]));
        // UTF-8 byte-order mark on the first header cell
        if (i == 0 && name.rfind("\xef\xbb\xbf", 0) == 0)
            name = name.substr(3);
        index.emplace(name, i);
    }
    auto required = [&](const char* name) {
        const auto it = index.find(name);
        if (it == index.end())
            throw Error(ErrorKind::Parse, std::string("MER CSV header lacks a '") + name + "' column");
        return it->second;
    };
    auto optional = [&](const char* name) -> std::optional<std::size_t> {
        const auto it = index.find(name);
        return it == index.end() ? std::nullopt : std::optional<std::size_t>(it->second);
    };
    return {required("msn"), required("yyyymm"), required("value"), optional("description"), optional("unit")};
}

}  // namespace

std::vector<MerRecord> read_mer_records(std::istream& source) {
    std::string line;
    if (!std::getline(source, line))
        throw Error(ErrorKind::Parse, "MER CSV is empty (no header line)");
    const Columns cols = locate_columns(split_csv_line(line));
    const std::size_t needed = std::max({cols.msn, cols.yyyymm, cols.value});

    std::vector<MerRecord> records;
    std::size_t row = 1;
    while (std::getline(source, line)) {
        ++row;
        if (trim(line).empty() || trim(line) == "\r")
            continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= needed)
            throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ": expected at least " +
                                              std::to_string(needed + 1) + " fields");
        MerRecord rec;
        rec.msn = trim(fields[cols.msn]);

        const std::string stamp = trim(fields[cols.yyyymm]);
        auto [ptr, ec] = std::from_chars(stamp.data(), stamp.data() + stamp.size(), rec.yyyymm);
        if (ec != std::errc{} || ptr != stamp.data() + stamp.size() || stamp.size() != 6)
            throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ": bad YYYYMM '" + stamp + "'");
        const int month = rec.yyyymm % 100;
        if (month < 1 || month > 13)
            throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ": month field out of 1..13");

        const std::string value = trim(fields[cols.value]);
        if (!is_not_available(value)) {
            double v = 0.0;
            auto [vptr, vec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (vec != std::errc{} || vptr != value.data() + value.size() || !std::isfinite(v))
                throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ": unparseable value '" + value + "'");
            rec.value = v;
        }
        if (cols.description && *cols.description < fields.size())
            rec.description = trim(fields[*cols.description]);
        if (cols.unit && *cols.unit < fields.size())
            rec.unit = trim(fields[*cols.unit]);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<CatalogEntry> list_series(std::istream& source) {
    std::map<std::string, CatalogEntry> catalog;
    for (const MerRecord& rec : read_mer_records(source)) {
        if (rec.yyyymm % 100 == 13 || !rec.value)
            continue;
        const MonthStamp stamp = MonthStamp::from_yyyymm(rec.yyyymm);
        auto [it, inserted] = catalog.try_emplace(rec.msn, CatalogEntry{rec.msn, rec.description, rec.unit, stamp, stamp});
        CatalogEntry& entry = it->second;
        entry.first = std::min(entry.first, stamp);
        entry.last = std::max(entry.last, stamp);
        ++entry.observations;
    }
    std::vector<CatalogEntry> out;
    out.reserve(catalog.size());
    for (auto& [msn, entry] : catalog)
        out.push_back(std::move(entry));
    return out;
}

LoadedSeries load_mer_csv(std::istream& source, const std::string& msn, const MonthRange& range) {
    const auto records = read_mer_records(source);
    std::vector<const MerRecord*> rows;
    std::map<std::string, std::string> known;
    for (const MerRecord& rec : records) {
        known.emplace(rec.msn, rec.description);
        if (rec.msn != msn || rec.yyyymm % 100 == 13 || !rec.value)
            continue;
        const MonthStamp stamp = MonthStamp::from_yyyymm(rec.yyyymm);
        if ((range.first && stamp < *range.first) || (range.second && *range.second < stamp))
            continue;
        rows.push_back(&rec);
    }
    if (!known.count(msn)) {
        std::string available;
        for (const auto& [code, desc] : known)
            available += (available.empty() ? "" : ", ") + code;
        throw Error(ErrorKind::NotFound, "MSN '" + msn + "' not in file; available: " + available);
    }
    if (rows.empty())
        throw Error(ErrorKind::NotFound, "MSN '" + msn + "' has no monthly values in the requested range");

    std::stable_sort(rows.begin(), rows.end(), [](const MerRecord* a, const MerRecord* b) { return a->yyyymm < b->yyyymm; });
    std::vector<double> values;
    values.reserve(rows.size());
    MonthStamp expected = MonthStamp::from_yyyymm(rows.front()->yyyymm);
    for (const MerRecord* rec : rows) {
        const MonthStamp stamp = MonthStamp::from_yyyymm(rec->yyyymm);
        if (stamp != expected) {
            if (stamp < expected)
                throw Error(ErrorKind::Discontinuity, "MSN '" + msn + "': duplicate month " + stamp.iso());
            throw Error(ErrorKind::Discontinuity, "MSN '" + msn + "': gap between " + expected.plus(-1).iso() +
                                                      " and " + stamp.iso());
        }
        values.push_back(*rec->value);
        expected = expected.plus(1);
    }
    if (range.first && MonthStamp::from_yyyymm(rows.front()->yyyymm) != *range.first)
        throw Error(ErrorKind::Discontinuity, "MSN '" + msn + "': no value for requested start " + range.first->iso());
    if (range.second && MonthStamp::from_yyyymm(rows.back()->yyyymm) != *range.second)
        throw Error(ErrorKind::Discontinuity, "MSN '" + msn + "': no value for requested end " + range.second->iso());

    const MerRecord& head = *rows.front();
    return LoadedSeries{TimeSeries(MonthStamp::from_yyyymm(head.yyyymm), values, 12), msn, head.description, head.unit};
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_mer_csv(std::ostream& out, const LoadedSeries& loaded) {
    out << "MSN,YYYYMM,Value,Description,Unit\n";
    char buf[64];
    for (Eigen::Index i = 0; i < loaded.series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", loaded.series[i]);
        out << quote(loaded.msn) << ',' << loaded.series.stamp_at(i).yyyymm() << ',' << buf << ','
            << quote(loaded.description) << ',' << quote(loaded.unit) << '\n';
    }
}

}  // namespace petrocast
