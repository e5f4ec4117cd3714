#include "ngrid/csv.hpp"

#include "ngrid/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ngrid::csv {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::string where(const Table& t, std::size_t row, std::string_view column) {
    // +2: one for the header line, one for 1-based numbering.
    return t.source + ":" + std::to_string(row + 2) + " column '" + std::string(column) + "'";
}

} // namespace

int Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Table::column(std::string_view name) const {
    const int i = find_column(name);
    if (i < 0) throw ValidationError(source + ": missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(i);
}

Table parse(std::string_view text, std::string source) {
    Table t;
    t.source = std::move(source);
    std::size_t pos = 0;
    bool have_header = false;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') {
            if (nl == text.size()) break;
            continue;
        }
        auto fields = split_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header.size()) {
                throw ValidationError(t.source + ":" + std::to_string(line_no) + ": expected " +
                                      std::to_string(t.header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
            }
            t.rows.push_back(std::move(fields));
        }
        if (nl == text.size()) break;
    }
    if (!have_header) throw ValidationError(t.source + ": missing header row");
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, std::strerror(errno));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

double to_double(const std::string& field, const Table& t, std::size_t row, std::string_view column) {
    if (field.empty()) throw ValidationError(where(t, row, column) + ": empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ValidationError(where(t, row, column) + ": '" + field + "' is not a finite number");
    }
    return v;
}

int to_int(const std::string& field, const Table& t, std::size_t row, std::string_view column) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(field.c_str(), &end, 10);
    if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE || v < -1000000000L ||
        v > 1000000000L) {
        throw ValidationError(where(t, row, column) + ": '" + field + "' is not an integer");
    }
    return static_cast<int>(v);
}

std::string fmt(double value, int decimals) {
    if (value == 0.0) value = 0.0; // fold -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, std::strerror(errno));
    out << content;
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

} // namespace ngrid::csv
