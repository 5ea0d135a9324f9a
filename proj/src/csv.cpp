#include "ctmine/csv.hpp"

#include <sstream>
#include <stdexcept>

namespace ctmine::csv {

std::string escape(std::string_view field) {
    bool needs_quote = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quote = true;
            break;
        }
    }
    if (!needs_quote) return std::string(field);
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

std::string join_row(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += escape(fields[i]);
    }
    return line;
}

std::vector<std::string> split_row(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool any = false;

    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    cur.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\n') {
            fields.push_back(std::move(cur));
            cur.clear();
            rows.push_back(std::move(fields));
            fields.clear();
            any = false;
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    if (any) {
        fields.push_back(std::move(cur));
        rows.push_back(std::move(fields));
    }
    return rows;
}

Writer::Writer(const std::string& path, bool append)
    : out_(path, append ? std::ios::app | std::ios::binary : std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open CSV file for writing: " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
    out_ << join_row(fields) << '\n';
}

void Writer::flush() { out_.flush(); }

}  // namespace ctmine::csv
