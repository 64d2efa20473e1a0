#include "uniclass/csv.hpp"

#include "uniclass/error.hpp"

namespace uniclass::csv {

std::vector<Record> parse(std::string_view text, const std::string& source_name) {
    std::vector<Record> records;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    // UTF-8 byte order mark
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    while (i < n) {
        if (text[i] == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
            ++line;
            i += 2;
            continue;
        }

        Record record;
        record.line = line;
        std::string field;
        bool record_done = false;
        while (!record_done) {
            field.clear();
            if (i < n && text[i] == '"') {
                const std::size_t quote_line = line;
                ++i;
                bool closed = false;
                while (i < n) {
                    const char c = text[i];
                    if (c == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field.push_back('"');
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
                if (!closed) throw ParseError(source_name, quote_line, "unterminated quoted field");
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    throw ParseError(source_name, line, "unexpected character after closing quote");
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    if (text[i] == '"') throw ParseError(source_name, line, "quote inside unquoted field");
                    field.push_back(text[i]);
                    ++i;
                }
            }
            record.fields.push_back(field);

            if (i >= n) {
                record_done = true;
            } else if (text[i] == ',') {
                ++i;
            } else if (text[i] == '\n') {
                ++i;
                ++line;
                record_done = true;
            } else if (text[i] == '\r') {
                if (i + 1 < n && text[i + 1] == '\n') {
                    i += 2;
                    ++line;
                    record_done = true;
                } else {
                    throw ParseError(source_name, line, "bare carriage return");
                }
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::string escape_field(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape_field(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace uniclass::csv
