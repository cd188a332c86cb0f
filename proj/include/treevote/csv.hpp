#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "treevote/dataset.hpp"

namespace treevote {

/// RFC 4180 record splitter. Handles quoted fields with embedded commas,
/// doubled quotes and line breaks; accepts LF or CRLF line endings.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Parses a CSV document whose header names every schema column (any order).
/// Errors name the 1-based data row and the column.
Dataset load_csv(std::istream& in, const Schema& schema);
Dataset load_csv_text(std::string_view text, const Schema& schema);

/// Header in schema order; numbers with up to 6 fractional digits, no exponent.
void write_csv(std::ostream& out, const Dataset& data);
std::string to_csv(const Dataset& data);

std::string format_number(double value);
std::string quote_csv_field(const std::string& field);

}  // namespace treevote
