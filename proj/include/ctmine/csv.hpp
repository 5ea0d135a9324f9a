#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace ctmine::csv {

// RFC-4180 style quoting: fields containing comma, quote or newline are
// wrapped in double quotes with inner quotes doubled.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

// Splits one logical CSV line (no embedded newlines) into fields.
std::vector<std::string> split_row(std::string_view line);

// Reads a whole CSV file. Handles quoted fields with embedded newlines.
// Returns rows of fields; the caller interprets the header.
std::vector<std::vector<std::string>> read_file(const std::string& path);

class Writer {
public:
    explicit Writer(const std::string& path, bool append = false);

    void row(const std::vector<std::string>& fields);
    void flush();
    bool ok() const { return static_cast<bool>(out_); }

private:
    std::ofstream out_;
};

}  // namespace ctmine::csv
