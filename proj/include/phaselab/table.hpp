#pragma once
// Column table with RFC-4180-style CSV in/out. Numbers are written with
// std::to_chars (shortest form that parses back to the same double), so a
// write/parse round trip is exact and repeated runs are byte-identical.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace phaselab {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    long cols() const { return static_cast<long>(header.size()); }
    long size() const { return static_cast<long>(rows.size()); }

    void add_row(std::vector<double> row) {
        if (row.size() != header.size()) throw std::invalid_argument("Table: row width mismatch");
        rows.push_back(std::move(row));
    }

    long column_index(const std::string& name) const {
        for (long i = 0; i < cols(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("Table: no column named " + name);
    }
};

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string to_csv(const Table& t) {
    std::string out;
    for (long c = 0; c < t.cols(); ++c) {
        if (c) out += ',';
        out += t.header[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

inline void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_csv(t);
}

inline Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t pos = line.find(',', start);
            cells.push_back(line.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const std::string& cell : cells) {
            double v = 0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc()) throw std::runtime_error("CSV: bad number '" + cell + "'");
            row.push_back(v);
        }
        t.add_row(std::move(row));
    }
    return t;
}

inline Table read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

} // namespace phaselab
