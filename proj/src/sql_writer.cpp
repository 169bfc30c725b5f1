#include "sql_writer.hpp"

namespace capql::detail {

std::string quote_ident(const std::string& name) {
    std::string out;
    out.reserve(name.size() + 2);
    out += '"';
    for (char c : name) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

namespace {

/// Shared expression renderer; the two literal strategies differ only in
/// what a Literal node turns into.
template <typename LiteralFn, typename ColumnFn>
void render_expr(const ExprPtr& expr, std::string& out, LiteralFn&& on_literal,
                 ColumnFn&& on_column) {
    if (const auto* c = std::get_if<ColumnRef>(&expr->node)) {
        on_column(c->name, out);
    } else if (const auto* l = std::get_if<Literal>(&expr->node)) {
        on_literal(l->value, out);
    } else if (const auto* u = std::get_if<Unary>(&expr->node)) {
        out += '(';
        switch (u->op) {
        case UnaryOp::Not:
            out += "NOT ";
            render_expr(u->operand, out, on_literal, on_column);
            break;
        case UnaryOp::Neg:
            out += '-';
            render_expr(u->operand, out, on_literal, on_column);
            break;
        case UnaryOp::IsNull:
            render_expr(u->operand, out, on_literal, on_column);
            out += " IS NULL";
            break;
        case UnaryOp::IsNotNull:
            render_expr(u->operand, out, on_literal, on_column);
            out += " IS NOT NULL";
            break;
        }
        out += ')';
    } else if (const auto* b = std::get_if<Binary>(&expr->node)) {
        out += '(';
        render_expr(b->lhs, out, on_literal, on_column);
        out += ' ';
        out += to_string(b->op);
        out += ' ';
        render_expr(b->rhs, out, on_literal, on_column);
        out += ')';
    } else if (const auto* g = std::get_if<AggExpr>(&expr->node)) {
        out += to_string(g->func);
        out += '(';
        if (g->argument) {
            render_expr(g->argument, out, on_literal, on_column);
        } else {
            out += '*';
        }
        out += ')';
    } else {
        // Placeholders never reach the writer: sqlformat substitutes them.
        out += "$?";
    }
}

} // namespace

void SqlWriter::write_expr(const ExprPtr& expr) {
    render_expr(
        expr, out_,
        [this](const SqlValue& v, std::string& out) {
            out += '?';
            params_.push_back(v);
        },
        [](const std::string& name, std::string& out) { out += quote_ident(name); });
}

namespace {

/// Column affinity from a declared type, per the engine's rules.
ParamAffinity affinity_from_type(const std::string& declared) {
    std::string t = to_lower(declared);
    if (t.find("int") != std::string::npos) return ParamAffinity::Numeric;
    if (t.find("char") != std::string::npos || t.find("clob") != std::string::npos ||
        t.find("text") != std::string::npos) {
        return ParamAffinity::Text;
    }
    if (t.empty() || t.find("blob") != std::string::npos) return ParamAffinity::None;
    return ParamAffinity::Numeric; // REAL / FLOA / DOUB / anything else
}

ParamAffinity side_affinity(const ExprPtr& e, const ViewSchema& schema) {
    if (const auto* c = std::get_if<ColumnRef>(&e->node)) {
        auto matches = schema.find(c->name);
        if (matches.size() == 1) {
            return affinity_from_type(schema.columns[matches.front()].declared_type);
        }
    }
    return ParamAffinity::None;
}

bool is_comparison(BinaryOp op) {
    switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
        return true;
    default:
        return false;
    }
}

const char* param_column(ParamAffinity a) {
    switch (a) {
    case ParamAffinity::Numeric: return "vn";
    case ParamAffinity::Text: return "vt";
    default: return "v";
    }
}

struct TriggerRenderer {
    const ViewSchema& schema;
    const std::string& param_table;
    TriggerCheckSql& out;

    /// `context` is the affinity a comparison would apply to this operand,
    /// honored only when the operand is a literal.
    void render(const ExprPtr& e, ParamAffinity context) {
        if (const auto* c = std::get_if<ColumnRef>(&e->node)) {
            out.when_clause += "NEW." + quote_ident(c->name);
        } else if (const auto* l = std::get_if<Literal>(&e->node)) {
            out.params.push_back(l->value);
            out.affinities.push_back(context);
            out.when_clause += "(SELECT ";
            out.when_clause += param_column(context);
            out.when_clause += " FROM temp." + quote_ident(param_table) +
                               " WHERE k = " + std::to_string(out.params.size()) + ")";
        } else if (const auto* u = std::get_if<Unary>(&e->node)) {
            out.when_clause += '(';
            switch (u->op) {
            case UnaryOp::Not:
                out.when_clause += "NOT ";
                render(u->operand, ParamAffinity::None);
                break;
            case UnaryOp::Neg:
                out.when_clause += '-';
                render(u->operand, ParamAffinity::None);
                break;
            case UnaryOp::IsNull:
                render(u->operand, ParamAffinity::None);
                out.when_clause += " IS NULL";
                break;
            case UnaryOp::IsNotNull:
                render(u->operand, ParamAffinity::None);
                out.when_clause += " IS NOT NULL";
                break;
            }
            out.when_clause += ')';
        } else if (const auto* b = std::get_if<Binary>(&e->node)) {
            ParamAffinity lhs_ctx = ParamAffinity::None;
            ParamAffinity rhs_ctx = ParamAffinity::None;
            if (is_comparison(b->op)) {
                // A regular query would coerce each operand by the other
                // side's affinity; reproduce that for literal operands.
                lhs_ctx = side_affinity(b->rhs, schema);
                rhs_ctx = side_affinity(b->lhs, schema);
            }
            out.when_clause += '(';
            render(b->lhs, lhs_ctx);
            out.when_clause += ' ';
            out.when_clause += to_string(b->op);
            out.when_clause += ' ';
            render(b->rhs, rhs_ctx);
            out.when_clause += ')';
        } else {
            // Aggregates and placeholders cannot occur in check predicates.
            out.when_clause += "NULL";
        }
    }
};

} // namespace

TriggerCheckSql render_trigger_check(const ExprPtr& check, const std::string& param_table,
                                     const ViewSchema& table_schema) {
    TriggerCheckSql result;
    TriggerRenderer renderer{table_schema, param_table, result};
    renderer.render(check, ParamAffinity::None);
    return result;
}

} // namespace capql::detail
