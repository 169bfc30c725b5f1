#include "capql/expr.hpp"

#include <algorithm>
#include <cctype>

namespace capql {

bool CiLess::operator()(const std::string& a, const std::string& b) const {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](unsigned char x, unsigned char y) {
            return std::tolower(x) < std::tolower(y);
        });
}

bool ci_equal(const std::string& a, const std::string& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const char* to_string(UnaryOp op) {
    switch (op) {
    case UnaryOp::Not: return "NOT";
    case UnaryOp::Neg: return "-";
    case UnaryOp::IsNull: return "IS NULL";
    case UnaryOp::IsNotNull: return "IS NOT NULL";
    }
    return "?";
}

const char* to_string(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "AND";
    case BinaryOp::Or: return "OR";
    }
    return "?";
}

const char* to_string(AggFunc f) {
    switch (f) {
    case AggFunc::Count: return "COUNT";
    case AggFunc::Sum: return "SUM";
    case AggFunc::Avg: return "AVG";
    case AggFunc::Min: return "MIN";
    case AggFunc::Max: return "MAX";
    }
    return "?";
}

ExprPtr make_column(std::string name) {
    return std::make_shared<Expr>(Expr{ColumnRef{std::move(name)}});
}

ExprPtr make_literal(SqlValue value) {
    return std::make_shared<Expr>(Expr{Literal{std::move(value)}});
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
    return std::make_shared<Expr>(Expr{Unary{op, std::move(operand)}});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr make_placeholder(int index) {
    return std::make_shared<Expr>(Expr{Placeholder{index}});
}

ExprPtr make_agg(AggFunc func, ExprPtr argument) {
    return std::make_shared<Expr>(Expr{AggExpr{func, std::move(argument)}});
}

ExprPtr conjoin(ExprPtr a, ExprPtr b) {
    if (!a) return b;
    if (!b) return a;
    return make_binary(BinaryOp::And, std::move(a), std::move(b));
}

namespace {

bool equal_impl(const ExprPtr& a, const ExprPtr& b, bool compare_literals) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    if (const auto* ca = std::get_if<ColumnRef>(&a->node)) {
        return ci_equal(ca->name, std::get<ColumnRef>(b->node).name);
    }
    if (const auto* la = std::get_if<Literal>(&a->node)) {
        return !compare_literals || la->value == std::get<Literal>(b->node).value;
    }
    if (const auto* ua = std::get_if<Unary>(&a->node)) {
        const auto& ub = std::get<Unary>(b->node);
        return ua->op == ub.op && equal_impl(ua->operand, ub.operand, compare_literals);
    }
    if (const auto* ba = std::get_if<Binary>(&a->node)) {
        const auto& bb = std::get<Binary>(b->node);
        return ba->op == bb.op && equal_impl(ba->lhs, bb.lhs, compare_literals) &&
               equal_impl(ba->rhs, bb.rhs, compare_literals);
    }
    if (const auto* pa = std::get_if<Placeholder>(&a->node)) {
        return pa->index == std::get<Placeholder>(b->node).index;
    }
    const auto& ga = std::get<AggExpr>(a->node);
    const auto& gb = std::get<AggExpr>(b->node);
    if (ga.func != gb.func) return false;
    if (!ga.argument || !gb.argument) return !ga.argument && !gb.argument;
    return equal_impl(ga.argument, gb.argument, compare_literals);
}

void collect_mentions(const ExprPtr& expr, NameSet& out) {
    if (!expr) return;
    if (const auto* c = std::get_if<ColumnRef>(&expr->node)) {
        out.insert(c->name);
    } else if (const auto* u = std::get_if<Unary>(&expr->node)) {
        collect_mentions(u->operand, out);
    } else if (const auto* b = std::get_if<Binary>(&expr->node)) {
        collect_mentions(b->lhs, out);
        collect_mentions(b->rhs, out);
    } else if (const auto* g = std::get_if<AggExpr>(&expr->node)) {
        collect_mentions(g->argument, out);
    }
}

template <typename Pred>
bool any_node(const ExprPtr& expr, Pred pred) {
    if (!expr) return false;
    if (pred(*expr)) return true;
    if (const auto* u = std::get_if<Unary>(&expr->node)) {
        return any_node(u->operand, pred);
    }
    if (const auto* b = std::get_if<Binary>(&expr->node)) {
        return any_node(b->lhs, pred) || any_node(b->rhs, pred);
    }
    if (const auto* g = std::get_if<AggExpr>(&expr->node)) {
        return any_node(g->argument, pred);
    }
    return false;
}

void render_into(const ExprPtr& expr, std::string& out) {
    if (const auto* c = std::get_if<ColumnRef>(&expr->node)) {
        out += c->name;
    } else if (const auto* l = std::get_if<Literal>(&expr->node)) {
        out += value_to_string(l->value);
    } else if (const auto* u = std::get_if<Unary>(&expr->node)) {
        out += '(';
        switch (u->op) {
        case UnaryOp::Not:
            out += "NOT ";
            render_into(u->operand, out);
            break;
        case UnaryOp::Neg:
            out += '-';
            render_into(u->operand, out);
            break;
        case UnaryOp::IsNull:
            render_into(u->operand, out);
            out += " IS NULL";
            break;
        case UnaryOp::IsNotNull:
            render_into(u->operand, out);
            out += " IS NOT NULL";
            break;
        }
        out += ')';
    } else if (const auto* b = std::get_if<Binary>(&expr->node)) {
        out += '(';
        render_into(b->lhs, out);
        out += ' ';
        out += to_string(b->op);
        out += ' ';
        render_into(b->rhs, out);
        out += ')';
    } else if (const auto* p = std::get_if<Placeholder>(&expr->node)) {
        out += '$';
        out += std::to_string(p->index);
    } else {
        const auto& g = std::get<AggExpr>(expr->node);
        out += to_string(g.func);
        out += '(';
        if (g.argument) {
            render_into(g.argument, out);
        } else {
            out += '*';
        }
        out += ')';
    }
}

} // namespace

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    return equal_impl(a, b, /*compare_literals=*/true);
}

bool same_shape(const ExprPtr& a, const ExprPtr& b) {
    return equal_impl(a, b, /*compare_literals=*/false);
}

NameSet mentions(const ExprPtr& expr) {
    NameSet out;
    collect_mentions(expr, out);
    return out;
}

bool contains_placeholder(const ExprPtr& expr) {
    return any_node(expr, [](const Expr& e) {
        return std::holds_alternative<Placeholder>(e.node);
    });
}

bool contains_aggregate(const ExprPtr& expr) {
    return any_node(expr, [](const Expr& e) {
        return std::holds_alternative<AggExpr>(e.node);
    });
}

std::string render(const ExprPtr& expr) {
    std::string out;
    render_into(expr, out);
    return out;
}

namespace {

std::string strip_spaces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c != ' ') out += c;
    }
    return out;
}

} // namespace

SelectItem make_select_item(ExprPtr expr) {
    SelectItem item;
    item.is_simple = std::holds_alternative<ColumnRef>(expr->node);
    item.output_name =
        item.is_simple ? std::get<ColumnRef>(expr->node).name : strip_spaces(render(expr));
    item.expr = std::move(expr);
    return item;
}

std::string AggItem::output_name() const {
    if (const auto* s = std::get_if<SelectItem>(&item)) {
        return s->output_name;
    }
    const auto& agg = std::get<AggExpr>(item);
    std::string out = to_string(agg.func);
    out += '(';
    out += agg.argument ? strip_spaces(render(agg.argument)) : "*";
    out += ')';
    return out;
}

} // namespace capql
