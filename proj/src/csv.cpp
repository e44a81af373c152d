#include "vdo/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vdo/errors.hpp"

namespace vdo {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& col) {
    const std::string s = trim(raw);
    if (s.empty())
        throw data_error("CSV: empty cell in column '" + col + "' at data row " +
                         std::to_string(row));
    double value = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw data_error("CSV: non-numeric cell '" + s + "' in column '" + col +
                         "' at data row " + std::to_string(row));
    return value;
}

}  // namespace

const std::vector<double>& Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return values[i];
    throw data_error("Table: no column named '" + name + "'");
}

bool Table::has_column(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Table load_timeseries_csv(const std::string& path,
                          const std::vector<std::string>& column_names) {
    std::ifstream in(path);
    if (!in) throw data_error("CSV: cannot open file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw data_error("CSV: file '" + path + "' is empty");
    std::vector<std::string> header = split_line(line);
    for (auto& h : header) h = trim(h);

    std::vector<std::size_t> pick;
    std::vector<std::string> out_names;
    if (column_names.empty()) {
        out_names = header;
        pick.resize(header.size());
        for (std::size_t i = 0; i < header.size(); ++i) pick[i] = i;
    } else {
        for (const auto& want : column_names) {
            auto it = std::find(header.begin(), header.end(), want);
            if (it == header.end())
                throw data_error("CSV: file '" + path + "' is missing column '" + want + "'");
            pick.push_back(static_cast<std::size_t>(it - header.begin()));
            out_names.push_back(want);
        }
    }

    Table table;
    table.columns = out_names;
    table.values.assign(out_names.size(), {});

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_line(line);
        if (cells.size() < header.size())
            throw data_error("CSV: data row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        for (std::size_t k = 0; k < pick.size(); ++k)
            table.values[k].push_back(parse_cell(cells[pick[k]], row, out_names[k]));
    }
    if (row == 0) throw data_error("CSV: file '" + path + "' has a header but no data rows");
    return table;
}

void write_csv(const std::string& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw data_error("CSV: cannot write file '" + path + "'");
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << "\n";
    char buf[64];
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.values.size(); ++c) {
            const int len = std::snprintf(buf, sizeof buf, "%.17g", table.values[c][r]);
            out << (c ? "," : "") << std::string_view(buf, static_cast<std::size_t>(len));
        }
        out << "\n";
    }
}

}  // namespace vdo
