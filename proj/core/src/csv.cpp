#include "policybound/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "policybound/errors.hpp"

namespace policybound {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) {
      return j;
    }
  }
  throw SchemaError("missing column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) {
      return true;
    }
  }
  return false;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&]() {
    end_field();
    if (table.header.empty()) {
      table.header = record;
    } else {
      if (record.size() != table.header.size()) {
        throw SchemaError("row " + std::to_string(table.rows.size() + 2) +
                          " has " + std::to_string(record.size()) +
                          " fields, header has " +
                          std::to_string(table.header.size()));
      }
      table.rows.push_back(record);
    }
    record.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_started = true;
        break;
      case ',':
        end_field();
        row_started = true;
        break;
      case '\r':
        break;  // tolerate CRLF input
      case '\n':
        if (row_started || !field.empty() || !record.empty()) {
          end_record();
        }
        break;
      default:
        field.push_back(c);
        row_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw SchemaError("unterminated quoted field at end of input");
  }
  if (row_started || !field.empty() || !record.empty()) {
    end_record();
  }
  if (table.header.empty()) {
    throw SchemaError("empty CSV input: no header row");
  }
  return table;
}

std::string csv_quote(std::string_view field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string write_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  auto append_record = [&out](const std::vector<std::string>& record) {
    for (std::size_t j = 0; j < record.size(); ++j) {
      if (j > 0) {
        out.push_back(',');
      }
      out += csv_quote(record[j]);
    }
    out.push_back('\n');
  };
  append_record(header);
  for (const auto& row : rows) {
    append_record(row);
  }
  return out;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double_field(std::string_view field, std::string_view context) {
  const std::string s(field);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE ||
      !std::isfinite(v)) {
    throw SchemaError("expected a finite number for " + std::string(context) +
                      ", got '" + s + "'");
  }
  return v;
}

bool looks_numeric(std::string_view field) {
  const std::string s(field);
  if (s.empty()) {
    return false;
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE && std::isfinite(v);
}

long long parse_int_field(std::string_view field, std::string_view context) {
  const std::string s(field);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty() || errno == ERANGE) {
    throw SchemaError("expected an integer for " + std::string(context) +
                      ", got '" + s + "'");
  }
  return v;
}

}  // namespace policybound
