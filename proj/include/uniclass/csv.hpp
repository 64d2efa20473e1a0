#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace uniclass::csv {

struct Record {
    std::size_t line = 0;  // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// Parses RFC-4180 CSV (quoted fields, doubled quotes, embedded newlines,
/// LF or CRLF line endings). Blank lines are skipped. Throws ParseError on
/// an unterminated quote or stray characters after a closing quote.
std::vector<Record> parse(std::string_view text, const std::string& source_name);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

std::string format_row(const std::vector<std::string>& fields);

}  // namespace uniclass::csv
