#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace policybound {

// RFC 4180 table: first row is the header. Cells keep their raw text;
// callers parse numbers where the schema requires them.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws SchemaError
  bool has_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

// Quote a single field per RFC 4180 (quotes only when needed).
std::string csv_quote(std::string_view field);

std::string write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

// Shortest-faithful decimal rendering of a double (17 significant digits,
// '.' separator, no locale); round-trips bit-exactly through parse.
std::string format_double(double value);

// Strict double parse of a whole field. Throws SchemaError on failure.
double parse_double_field(std::string_view field, std::string_view context);

// True when the whole field parses as a finite double.
bool looks_numeric(std::string_view field);

// Strict integer parse of a whole field. Throws SchemaError on failure.
long long parse_int_field(std::string_view field, std::string_view context);

}  // namespace policybound
