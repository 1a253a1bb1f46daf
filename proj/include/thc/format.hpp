#pragma once

#include <array>
#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace thc {

/// Shortest decimal string that parses back to exactly `v`.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

/// Comma-separated, one header row, '\n' line endings, no quoting.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    CsvWriter& field(double v) { return raw(format_double(v)); }
    CsvWriter& field(std::string_view s) { return raw(s); }
    CsvWriter& field(int v) { return raw(std::to_string(v)); }

    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(std::string_view s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ostream& out_;
    bool first_ = true;
};

}  // namespace thc
