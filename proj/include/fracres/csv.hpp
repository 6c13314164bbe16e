#ifndef FRACRES_CSV_HPP
#define FRACRES_CSV_HPP

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracres {

/// Column-named table of samples; column 0 is the time axis t_over_T.
struct TimeSeries {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::invalid_argument("unknown column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t idx = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }
};

/// CSV with a header row, comma separators, LF line endings and 17
/// significant digits, enough to round-trip doubles exactly.
inline void write_csv(const TimeSeries& ts, std::ostream& out) {
    for (std::size_t i = 0; i < ts.columns.size(); ++i)
        out << (i ? "," : "") << ts.columns[i];
    out << "\n";
    char buf[64];
    for (const auto& row : ts.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

inline void write_csv_file(const TimeSeries& ts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(ts, out);
}

inline TimeSeries read_csv(std::istream& in) {
    TimeSeries ts;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) ts.columns.push_back(cell);
    if (ts.columns.empty()) throw std::runtime_error("CSV: empty header row");

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        row.reserve(ts.columns.size());
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size())
                throw std::runtime_error("CSV: bad numeric cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != ts.columns.size())
            throw std::runtime_error("CSV: row width does not match the header");
        ts.rows.push_back(std::move(row));
    }
    return ts;
}

inline TimeSeries read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_csv(in);
}

}  // namespace fracres

#endif
