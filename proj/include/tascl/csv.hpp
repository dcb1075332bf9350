// Locale-independent number formatting/parsing and CSV row helpers.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tascl {

/// Shortest representation that round-trips; "nan" for NaN.
std::string format_number(double value);
std::string format_number(std::int64_t value);

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

/// Comma separated list of reals, e.g. "1,1.5,2". Empty input is an error.
std::vector<double> parse_double_list(std::string_view text);

/// Writes one comma-joined line.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace tascl
