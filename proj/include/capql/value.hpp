#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace capql {

/// A database value: NULL, 64-bit integer, double, or unicode text.
/// Text is stored unescaped; escaping happens only at render/bind time.
using SqlValue = std::variant<std::monostate, std::int64_t, double, std::string>;

inline SqlValue sql_null() { return SqlValue{std::monostate{}}; }

inline bool is_null(const SqlValue& v) { return std::holds_alternative<std::monostate>(v); }

/// Human-readable type tag, used in error messages.
std::string value_type_name(const SqlValue& v);

/// Debug rendering ("NULL", 42, 2.5, 'text'); not injection-safe SQL.
std::string value_to_string(const SqlValue& v);

using Row = std::vector<SqlValue>;

/// Materialized query result. Column order follows the view schema.
struct RowSet {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }
};

bool operator==(const RowSet& a, const RowSet& b);

} // namespace capql
