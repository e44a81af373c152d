#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vdo {

// Column-oriented table of named real-valued series, as read from CSV.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;  // one vector per column

    std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

// Reads a comma-separated file with a mandatory header row and '.' decimal
// separator. If column_names is nonempty, all named columns must be present
// and only those are returned (in the requested order).
Table load_timeseries_csv(const std::string& path,
                          const std::vector<std::string>& column_names = {});

void write_csv(const std::string& path, const Table& table);

}  // namespace vdo
