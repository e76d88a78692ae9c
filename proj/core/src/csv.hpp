#pragma once

// Minimal delimiter-separated text helpers shared by the loaders.

#include <charconv>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "merton/errors.hpp"

namespace merton::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view line, char delim = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

inline bool is_comment_or_blank(std::string_view line) {
    line = trim(line);
    return line.empty() || line.front() == '#';
}

/// Column positions by name, resolved from a header row.
class Header {
public:
    explicit Header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(names[i], i);
        width_ = names.size();
    }

    std::optional<std::size_t> find(const std::string& name) const {
        const auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require(const std::string& name, const std::string& file_kind) const {
        if (auto pos = find(name)) return *pos;
        throw SchemaError(name, file_kind + " is missing mandatory column '" + name + "'");
    }

    std::size_t width() const { return width_; }

private:
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t width_ = 0;
};

/// Reads the next non-comment, non-blank line. Tracks 1-based line numbers.
inline bool next_record(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!is_comment_or_blank(line)) return true;
    }
    return false;
}

}  // namespace merton::csv
