// io.hpp — Deterministic flat-file emission for figure data: CSV and JSON
// tables with '#'-prefixed metadata, plus the grid / list syntax used by the
// command line.
//
// Floats are printed as %.12e with a fixed row order, so identical configs
// produce byte-identical files.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "djcm/model.hpp"

namespace djcm::io {

struct DataTable {
    std::vector<std::pair<std::string, std::string>> meta;  // ordered
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(const std::string& key, const std::string& value) {
        meta.emplace_back(key, value);
    }
    void add_meta(const std::string& key, double value);
};

inline std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

inline void DataTable::add_meta(const std::string& key, double value) {
    meta.emplace_back(key, format_sci(value));
}

inline void write_csv(const DataTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.meta) {
        out << "# " << key << ": " << value << "\n";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_sci(row[c]);
        }
        out << "\n";
    }
}

inline void write_json(const DataTable& table, std::ostream& out) {
    nlohmann::ordered_json j;
    auto& meta = j["meta"];
    for (const auto& [key, value] : table.meta) {
        meta[key] = value;
    }
    j["columns"] = table.columns;
    auto& rows = j["rows"];
    rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        rows.push_back(row);
    }
    out << j.dump(2) << "\n";
}

// Parses a table written by write_csv. Metadata comes back as key/value
// strings; data cells must parse as doubles.
inline DataTable read_csv(std::istream& in) {
    DataTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::size_t start = line.find_first_not_of("# ");
            const std::size_t sep = line.find(": ", start);
            if (sep != std::string::npos) {
                table.meta.emplace_back(line.substr(start, sep - start),
                                        line.substr(sep + 2));
            }
            continue;
        }
        std::stringstream cells(line);
        std::string cell;
        if (!header_seen) {
            while (std::getline(cells, cell, ',')) {
                table.columns.push_back(cell);
            }
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw Error("read_csv: non-numeric cell '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != table.columns.size()) {
            throw Error("read_csv: row width does not match header");
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ------------------------------ grid parsing --------------------------------

inline std::vector<double> linspace(double start, double stop,
                                    std::size_t count) {
    if (count == 0) {
        throw Error("linspace: count must be >= 1");
    }
    if (count == 1) {
        return {start};
    }
    std::vector<double> g(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        g[i] = start + step * static_cast<double>(i);
    }
    g.back() = stop;
    return g;
}

// "start:stop:count" with both endpoints included; count = 1 collapses to
// the single point start.
inline std::vector<double> parse_grid(const std::string& text) {
    const std::size_t c1 = text.find(':');
    const std::size_t c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
        throw Error("grid '" + text + "' must be start:stop:count");
    }
    char* end = nullptr;
    const std::string s_start = text.substr(0, c1);
    const std::string s_stop = text.substr(c1 + 1, c2 - c1 - 1);
    const std::string s_count = text.substr(c2 + 1);
    const double start = std::strtod(s_start.c_str(), &end);
    if (end == s_start.c_str() || !std::isfinite(start)) {
        throw Error("grid '" + text + "': bad start");
    }
    const double stop = std::strtod(s_stop.c_str(), &end);
    if (end == s_stop.c_str() || !std::isfinite(stop)) {
        throw Error("grid '" + text + "': bad stop");
    }
    const long count = std::strtol(s_count.c_str(), &end, 10);
    if (end == s_count.c_str() || count < 1) {
        throw Error("grid '" + text + "': count must be a positive integer");
    }
    if (count > 1 && !(stop > start)) {
        throw Error("grid '" + text + "': needs stop > start for count > 1");
    }
    return linspace(start, stop, static_cast<std::size_t>(count));
}

inline std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || !std::isfinite(v)) {
            throw Error("list '" + text + "': bad value '" + item + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        throw Error("list '" + text + "' is empty");
    }
    return values;
}

}  // namespace djcm::io
