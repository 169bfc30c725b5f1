#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capql/expr.hpp"

namespace capql {

/// Base-table provenance of a view column, when it has one.
struct ColumnOrigin {
    std::string table;
    std::string column;
};

struct ColumnInfo {
    std::string name;
    std::string declared_type; // engine type text; empty for derived columns
    bool nullable = true;
    bool is_simple = true;
    std::optional<ColumnOrigin> origin; // nullopt => derived
};

/// Ordered output columns of a view. Names need not be unique after joins;
/// ambiguity is surfaced by validate, not hidden here.
struct ViewSchema {
    std::vector<ColumnInfo> columns;

    /// Indices of columns matching `name` case-insensitively.
    std::vector<std::size_t> find(const std::string& name) const;
    bool has_column(const std::string& name) const { return !find(name).empty(); }
    std::vector<std::string> column_names() const;
};

/// An expression whose column references all resolved to exactly one schema
/// column. `bindings` maps each mentioned name to its column index.
struct ValidatedExpr {
    ExprPtr expr;
    std::map<std::string, std::size_t, CiLess> bindings;
};

/// Resolve every column reference in `expr` against `schema`. Total: either
/// succeeds or raises exactly one of UnknownColumn / AmbiguousColumn.
ValidatedExpr validate(const ExprPtr& expr, const ViewSchema& schema);

} // namespace capql
