#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "capql/expr.hpp"

namespace capql {

/// Parse a boolean expression. Aggregation calls and placeholders are
/// rejected here.
ExprPtr parse_predicate(std::string_view text);

/// Parse a HAVING clause: a predicate that may additionally contain
/// aggregation calls.
ExprPtr parse_having(std::string_view text);

/// Parse a comma-separated select list. `AS` (or implicit) aliases raise
/// AliasNotSupported; a bare `*` is a parse error (star is only legal inside
/// COUNT in aggregate lists).
std::vector<SelectItem> parse_select_list(std::string_view text);

/// Parse a comma-separated aggregate item list: select items and calls of
/// COUNT, SUM, AVG, MIN, MAX. Other function names are parse errors.
std::vector<AggItem> parse_agg_list(std::string_view text);

/// Parse a comma-separated `col = expr` list. Each target column may appear
/// at most once.
std::vector<Assignment> parse_assignments(std::string_view text);

/// Parse `text` as a comma-separated list of aggregate function names
/// ("MIN, MAX"). Used by the #:aggrs contract modifier.
std::vector<AggFunc> parse_agg_func_list(std::string_view text);

/// Safe argument splicing. The template is parsed with each `$k` as a hole,
/// then arguments are substituted as literal nodes, so argument text can
/// never change the expression's shape. Placeholders must be contiguous from
/// $1 and match the argument count.
ExprPtr sqlformat(std::string_view tmpl, const std::vector<SqlValue>& args);

} // namespace capql
