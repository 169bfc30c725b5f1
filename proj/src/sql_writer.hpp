#pragma once

#include <string>
#include <vector>

#include "capql/expr.hpp"
#include "capql/schema.hpp"

namespace capql::detail {

/// Double-quote an identifier, doubling embedded quotes.
std::string quote_ident(const std::string& name);

/// Emits engine SQL. Every literal becomes a `?` and its value is appended
/// to the parameter list, in text order, so no value payload ever reaches
/// statement text.
class SqlWriter {
public:
    void write(std::string_view sql) { out_.append(sql); }
    void write_ident(const std::string& name) { out_ += quote_ident(name); }
    void write_expr(const ExprPtr& expr);

    std::string take_sql() { return std::move(out_); }
    std::vector<SqlValue> take_params() { return std::move(params_); }

private:
    std::string out_;
    std::vector<SqlValue> params_;
};

/// Storage class a check literal should assume inside the trigger, chosen
/// so comparisons behave exactly as they would in a regular WHERE clause.
/// Trigger WHEN expressions see `NEW.col` without column affinity, so the
/// coercion a query would get for free is reproduced by storing each
/// literal in a param-table column of the matching affinity.
enum class ParamAffinity { None, Numeric, Text };

/// Renders a check predicate for a trigger body. Column references read the
/// candidate row (`NEW."col"`); literals cannot be bound inside trigger DDL,
/// so each becomes a scalar subquery against a per-operation temp table
/// whose rows are inserted with bound parameters.
struct TriggerCheckSql {
    std::string when_clause;
    std::vector<SqlValue> params; // row k of the param table holds params[k-1]
    std::vector<ParamAffinity> affinities;
};
TriggerCheckSql render_trigger_check(const ExprPtr& check, const std::string& param_table,
                                     const ViewSchema& table_schema);

} // namespace capql::detail
