#ifndef SPINPORT_CSV_HPP
#define SPINPORT_CSV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace spinport {

// Formats a double with 12 significant digits ("%.12g"). All CSV output
// goes through this so that emitted files are deterministic byte-for-byte.
std::string format_sig12(double value);

std::string format_count(std::int64_t value);

// Joins fields with commas and a trailing LF.
std::string csv_row(const std::vector<std::string>& fields);

// Splits one CSV line into fields (no quoting; the emitters never quote).
std::vector<std::string> split_csv_line(const std::string& line);

// Splits a CSV document into non-empty lines.
std::vector<std::string> split_lines(const std::string& text);

double parse_double_strict(const std::string& field);

} // namespace spinport

#endif
