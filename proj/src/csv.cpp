#include "fieldroad/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fieldroad/errors.hpp"

namespace fieldroad {

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0 into 0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw ConfigError("csv row has " + std::to_string(row.size()) + " fields, header has " +
                          std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k > 0) out << ',';
        out << fields[k];
    }
    out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
    write_line(out, table.header);
    for (const auto& row : table.rows) write_line(out, row);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_csv(out, table);
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fieldroad
