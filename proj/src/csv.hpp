#pragma once

// Minimal comma-separated reader shared by the ingest and trace parsers. No
// quoting; fields are trimmed.

#include "hashalloc/errors.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hashalloc::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline std::string row_error(int line_no, const std::string& what) {
    return "row " + std::to_string(line_no) + ": " + what;
}

inline double parse_double(const std::string& field, int line_no, const char* column) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw InputError(row_error(line_no, std::string("malformed ") + column + " '" + field + "'"));
    }
    return value;
}

inline std::int64_t parse_int(const std::string& field, int line_no, const char* column) {
    std::int64_t value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw InputError(row_error(line_no, std::string("malformed ") + column + " '" + field + "'"));
    }
    return value;
}

// Reads a header row, then yields each data row with its 1-based line number.
// Lines beginning with '#' and blank lines are skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {
        std::string line;
        while (next_line(line)) {
            header_ = split(line);
            for (std::size_t i = 0; i < header_.size(); ++i) {
                index_[header_[i]] = i;
            }
            return;
        }
        throw InputError("CSV input is empty (missing header row)");
    }

    std::size_t column(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) {
            throw InputError("CSV header lacks column '" + name + "'");
        }
        return it->second;
    }

    std::optional<std::size_t> optional_column(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        if (!next_line(line)) {
            return false;
        }
        fields = split(line);
        if (fields.size() != header_.size()) {
            throw InputError(row_error(line_no_, "expected " + std::to_string(header_.size()) +
                                                     " fields, got " +
                                                     std::to_string(fields.size())));
        }
        return true;
    }

    int line_no() const { return line_no_; }

private:
    bool next_line(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto t = trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            return true;
        }
        return false;
    }

    std::istream& in_;
    std::vector<std::string> header_;
    std::map<std::string, std::size_t> index_;
    int line_no_ = 0;
};

} // namespace hashalloc::csv
