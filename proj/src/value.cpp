#include "capql/value.hpp"

#include <charconv>
#include <cmath>

namespace capql {

std::string value_type_name(const SqlValue& v) {
    switch (v.index()) {
    case 0: return "null";
    case 1: return "integer";
    case 2: return "real";
    default: return "text";
    }
}

namespace {

std::string double_to_string(double d) {
    if (!std::isfinite(d)) {
        // SQLite treats NaN as NULL; infinities never come out of the parser.
        return std::isnan(d) ? "NULL" : (d > 0 ? "9e999" : "-9e999");
    }
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    std::string s(buf, end);
    // Keep reals lexically distinct from integers so rendering round-trips.
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

} // namespace

std::string value_to_string(const SqlValue& v) {
    switch (v.index()) {
    case 0: return "NULL";
    case 1: return std::to_string(std::get<std::int64_t>(v));
    case 2: return double_to_string(std::get<double>(v));
    default: {
        const auto& text = std::get<std::string>(v);
        std::string out;
        out.reserve(text.size() + 2);
        out += '\'';
        for (char c : text) {
            out += c;
            if (c == '\'') out += '\'';
        }
        out += '\'';
        return out;
    }
    }
}

bool operator==(const RowSet& a, const RowSet& b) {
    return a.columns == b.columns && a.rows == b.rows;
}

} // namespace capql
