#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "capql/value.hpp"

namespace capql {

/// Case-insensitive identifier comparison. Identifiers match
/// case-insensitively but are preserved as written for rendering.
struct CiLess {
    using is_transparent = void;
    bool operator()(const std::string& a, const std::string& b) const;
};

bool ci_equal(const std::string& a, const std::string& b);
std::string to_lower(const std::string& s);

using NameSet = std::set<std::string, CiLess>;

enum class UnaryOp {
    Not,
    Neg,
    IsNull,    // postfix `IS NULL`
    IsNotNull, // postfix `IS NOT NULL`
};

enum class BinaryOp {
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
};

enum class AggFunc { Count, Sum, Avg, Min, Max };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);
const char* to_string(AggFunc f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ColumnRef {
    std::string name;
};

struct Literal {
    SqlValue value;
};

struct Unary {
    UnaryOp op;
    ExprPtr operand;
};

struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};

/// A `$k` hole in a sqlformat template. Never survives sqlformat: arguments
/// replace holes before the expression is handed out.
struct Placeholder {
    int index; // 1-based
};

/// An aggregation call. Legal only in aggregate item lists and HAVING
/// clauses; the predicate grammar rejects it.
struct AggExpr {
    AggFunc func;
    ExprPtr argument; // null => `*` (COUNT only)
};

/// Immutable expression tree for the validated SQL subset: boolean and
/// arithmetic expressions over columns, strings, and number literals.
struct Expr {
    std::variant<ColumnRef, Literal, Unary, Binary, Placeholder, AggExpr> node;
};

ExprPtr make_column(std::string name);
ExprPtr make_literal(SqlValue value);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_placeholder(int index);
ExprPtr make_agg(AggFunc func, ExprPtr argument);

/// Conjoin two optional predicates; absent operands drop out.
ExprPtr conjoin(ExprPtr a, ExprPtr b);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

/// Equal up to literal payloads. Two expressions with the same shape differ
/// only in the values stored in Literal nodes.
bool same_shape(const ExprPtr& a, const ExprPtr& b);

/// Exactly the set of column names appearing in the tree.
NameSet mentions(const ExprPtr& expr);

bool contains_placeholder(const ExprPtr& expr);
bool contains_aggregate(const ExprPtr& expr);

/// Deterministic, fully parenthesized rendering. Text literals are
/// single-quoted with internal quotes doubled; parse_predicate(render(e))
/// is structurally equal to e.
std::string render(const ExprPtr& expr);

/// One entry of a select list. output_name is never caller-chosen: it is the
/// column name for a bare column reference and the canonical space-stripped
/// rendering otherwise.
struct SelectItem {
    ExprPtr expr;
    bool is_simple = false;
    std::string output_name;
};

SelectItem make_select_item(ExprPtr expr);

/// One entry of an aggregate item list: a plain select item or an
/// aggregation call.
struct AggItem {
    std::variant<SelectItem, AggExpr> item;

    bool is_aggregate() const { return std::holds_alternative<AggExpr>(item); }
    std::string output_name() const;
};

/// One `col = expr` pair of an update's SET list.
struct Assignment {
    std::string column;
    ExprPtr value;
};

} // namespace capql
