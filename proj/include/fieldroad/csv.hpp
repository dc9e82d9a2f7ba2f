#pragma once

// Minimal CSV writer with a fixed number format: 17 significant digits,
// which round-trips every double, and '\n' line endings.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fieldroad {

std::string format_number(double value);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Appends a row; throws ConfigError if its width differs from the header.
    void add_row(std::vector<std::string> row);
};

void write_csv(std::ostream& out, const CsvTable& table);

/// Throws IoError naming the path when the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace fieldroad
