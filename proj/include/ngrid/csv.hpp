#pragma once

// Minimal CSV support for the numeric tables this project exchanges.
// Fields never contain commas or quotes, so no quoting rules apply.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ngrid::csv {

struct Table {
    std::string source; // path or "<memory>", used in diagnostics
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column position by name; throws ValidationError naming the source if absent.
    std::size_t column(std::string_view name) const;
    // -1 when absent.
    int find_column(std::string_view name) const;
};

Table parse(std::string_view text, std::string source = "<memory>");
// Throws IoError if the file cannot be read.
Table read_file(const std::string& path);

double to_double(const std::string& field, const Table& t, std::size_t row, std::string_view column);
int to_int(const std::string& field, const Table& t, std::size_t row, std::string_view column);

// Fixed-notation rendering used by every CSV writer, so outputs are byte-stable.
std::string fmt(double value, int decimals = 6);

// Writes `content` to `path`, throwing IoError on failure.
void write_file(const std::string& path, const std::string& content);

} // namespace ngrid::csv
