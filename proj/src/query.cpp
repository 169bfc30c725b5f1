#include "capql/query.hpp"

#include <atomic>

#include "capql/error.hpp"
#include "sql_writer.hpp"

namespace capql {

namespace {

std::atomic<bool> g_validate_expressions{true};

ValidatedExpr maybe_validate(const ExprPtr& expr, const ViewSchema& schema) {
    if (contains_placeholder(expr)) {
        throw ParseError("expression contains an unsubstituted placeholder", 0);
    }
    if (!g_validate_expressions.load(std::memory_order_relaxed)) {
        return ValidatedExpr{expr, {}};
    }
    return validate(expr, schema);
}

const ColumnInfo* lookup_unique(const ViewSchema& schema, const std::string& name) {
    auto matches = schema.find(name);
    return matches.size() == 1 ? &schema.columns[matches.front()] : nullptr;
}

ViewSchema project_schema(const ViewSchema& child, const std::vector<SelectItem>& items) {
    ViewSchema out;
    for (const auto& item : items) {
        if (item.is_simple) {
            const ColumnInfo* src = lookup_unique(child, item.output_name);
            ColumnInfo info = src ? *src : ColumnInfo{};
            info.name = item.output_name;
            info.is_simple = src ? src->is_simple : true;
            out.columns.push_back(std::move(info));
        } else {
            out.columns.push_back(ColumnInfo{item.output_name, "", true, false, std::nullopt});
        }
    }
    return out;
}

ViewSchema aggregate_schema(const ViewSchema& child, const std::vector<AggItem>& items) {
    ViewSchema out;
    for (const auto& item : items) {
        if (const auto* sel = std::get_if<SelectItem>(&item.item)) {
            const ColumnInfo* src =
                sel->is_simple ? lookup_unique(child, sel->output_name) : nullptr;
            ColumnInfo info = src ? *src : ColumnInfo{};
            info.name = sel->output_name;
            info.is_simple = sel->is_simple && src && src->is_simple;
            out.columns.push_back(std::move(info));
        } else {
            out.columns.push_back(ColumnInfo{item.output_name(), "", true, false, std::nullopt});
        }
    }
    return out;
}

Updatability full_updatability(const ViewSchema& schema) {
    Updatability u;
    u.insertable = true;
    u.deletable = true;
    for (const auto& c : schema.columns) {
        u.updatable_columns.insert(c.name);
    }
    return u;
}

Updatability project_updatability(const QueryPtr& child, const std::vector<SelectItem>& items) {
    const Updatability& inner = child->updatability();
    Updatability u;
    u.deletable = inner.deletable;

    NameSet projected;
    for (const auto& item : items) {
        projected.insert(item.output_name);
        if (item.is_simple && inner.updatable_columns.count(item.output_name)) {
            u.updatable_columns.insert(item.output_name);
        }
    }
    u.insertable = inner.insertable;
    if (u.insertable) {
        // An insert through this projection cannot supply omitted columns,
        // so each must accept NULL.
        for (const auto& c : child->schema().columns) {
            if (!projected.count(c.name) && !c.nullable) {
                u.insertable = false;
                break;
            }
        }
    }
    return u;
}

} // namespace

Query::Query(Node node, ViewSchema schema, Updatability updatability)
    : node_(std::move(node)), schema_(std::move(schema)), updatability_(std::move(updatability)) {}

QueryPtr Query::base(std::string table, ViewSchema schema) {
    Updatability u = full_updatability(schema);
    BaseNode node{std::move(table), schema};
    return QueryPtr(new Query(Node{std::move(node)}, std::move(schema), std::move(u)));
}

QueryPtr Query::where(QueryPtr child, const ExprPtr& pred, std::string pred_text) {
    if (contains_aggregate(pred)) {
        throw ParseError("aggregation calls are not allowed in WHERE clauses", 0);
    }
    ValidatedExpr validated = maybe_validate(pred, child->schema());
    ViewSchema schema = child->schema();
    Updatability u = child->updatability();
    WhereNode node{std::move(child), std::move(validated), std::move(pred_text)};
    return QueryPtr(new Query(Node{std::move(node)}, std::move(schema), std::move(u)));
}

QueryPtr Query::project(QueryPtr child, std::vector<SelectItem> items) {
    if (items.empty()) {
        throw ParseError("select list must not be empty", 0);
    }
    for (const auto& item : items) {
        if (contains_aggregate(item.expr)) {
            throw ParseError("aggregation calls require the aggregate operation", 0);
        }
        maybe_validate(item.expr, child->schema());
    }
    ViewSchema schema = project_schema(child->schema(), items);
    Updatability u = project_updatability(child, items);
    ProjectNode node{std::move(child), std::move(items)};
    return QueryPtr(new Query(Node{std::move(node)}, std::move(schema), std::move(u)));
}

QueryPtr Query::join(QueryPtr left, QueryPtr right, const ExprPtr& pred) {
    ViewSchema combined;
    combined.columns = left->schema().columns;
    combined.columns.insert(combined.columns.end(), right->schema().columns.begin(),
                            right->schema().columns.end());
    std::optional<ValidatedExpr> validated;
    if (pred) {
        if (contains_aggregate(pred)) {
            throw ParseError("aggregation calls are not allowed in join conditions", 0);
        }
        validated = maybe_validate(pred, combined);
    }
    JoinNode node{std::move(left), std::move(right), std::move(validated)};
    // Joined views are never insertable, deletable, or updatable.
    return QueryPtr(new Query(Node{std::move(node)}, std::move(combined), Updatability{}));
}

QueryPtr Query::aggregate(QueryPtr child, std::vector<AggItem> items,
                          std::vector<std::string> group_by, const ExprPtr& having) {
    if (items.empty()) {
        throw ParseError("aggregate item list must not be empty", 0);
    }
    NameSet grouped;
    for (const auto& name : group_by) {
        maybe_validate(make_column(name), child->schema());
        grouped.insert(name);
    }
    for (const auto& item : items) {
        if (const auto* sel = std::get_if<SelectItem>(&item.item)) {
            maybe_validate(sel->expr, child->schema());
            // A non-aggregated output is only well-defined per group.
            if (!sel->is_simple || !grouped.count(sel->output_name)) {
                throw ParseError("non-aggregated item '" + sel->output_name +
                                     "' must be a GROUP BY column",
                                 0);
            }
        } else {
            const auto& agg = std::get<AggExpr>(item.item);
            if (agg.argument) {
                maybe_validate(agg.argument, child->schema());
            }
        }
    }
    std::optional<ValidatedExpr> validated_having;
    if (having) {
        if (group_by.empty()) {
            // The engine dialect only accepts HAVING after GROUP BY.
            throw ParseError("HAVING requires a GROUP BY clause", 0);
        }
        validated_having = maybe_validate(having, child->schema());
    }
    ViewSchema schema = aggregate_schema(child->schema(), items);
    AggregateNode node{std::move(child), std::move(items), std::move(group_by),
                       std::move(validated_having)};
    return QueryPtr(new Query(Node{std::move(node)}, std::move(schema), Updatability{}));
}

ViewSchema derive_schema(const QueryPtr& ast) {
    return ast->schema();
}

Updatability derive_updatability(const QueryPtr& ast) {
    return ast->updatability();
}

std::optional<CheckClause> check_clause(const QueryPtr& ast) {
    if (const auto* w = std::get_if<WhereNode>(&ast->node())) {
        auto inner = check_clause(w->child);
        if (!inner) {
            return CheckClause{w->pred.expr, w->pred_text};
        }
        return CheckClause{conjoin(inner->expr, w->pred.expr),
                           inner->text + " AND " + w->pred_text};
    }
    if (const auto* p = std::get_if<ProjectNode>(&ast->node())) {
        return check_clause(p->child);
    }
    return std::nullopt;
}

std::optional<std::string> base_table(const QueryPtr& ast) {
    if (const auto* b = std::get_if<BaseNode>(&ast->node())) {
        return b->table;
    }
    if (const auto* w = std::get_if<WhereNode>(&ast->node())) {
        return base_table(w->child);
    }
    if (const auto* p = std::get_if<ProjectNode>(&ast->node())) {
        return base_table(p->child);
    }
    return std::nullopt;
}

namespace {

void write_select(const QueryPtr& q, detail::SqlWriter& w) {
    if (const auto* b = std::get_if<BaseNode>(&q->node())) {
        w.write("SELECT ");
        bool first = true;
        for (const auto& c : b->schema.columns) {
            if (!first) w.write(", ");
            first = false;
            w.write_ident(c.name);
        }
        w.write(" FROM ");
        w.write_ident(b->table);
    } else if (const auto* wh = std::get_if<WhereNode>(&q->node())) {
        w.write("SELECT * FROM (");
        write_select(wh->child, w);
        w.write(") AS \"_v\" WHERE ");
        w.write_expr(wh->pred.expr);
    } else if (const auto* p = std::get_if<ProjectNode>(&q->node())) {
        w.write("SELECT ");
        bool first = true;
        for (const auto& item : p->items) {
            if (!first) w.write(", ");
            first = false;
            w.write_expr(item.expr);
            w.write(" AS ");
            w.write_ident(item.output_name);
        }
        w.write(" FROM (");
        write_select(p->child, w);
        w.write(") AS \"_v\"");
    } else if (const auto* j = std::get_if<JoinNode>(&q->node())) {
        w.write("SELECT * FROM (");
        write_select(j->left, w);
        if (j->pred) {
            w.write(") AS \"_l\" INNER JOIN (");
        } else {
            w.write(") AS \"_l\" CROSS JOIN (");
        }
        write_select(j->right, w);
        w.write(") AS \"_r\"");
        if (j->pred) {
            w.write(" ON ");
            w.write_expr(j->pred->expr);
        }
    } else {
        const auto& a = std::get<AggregateNode>(q->node());
        w.write("SELECT ");
        bool first = true;
        for (const auto& item : a.items) {
            if (!first) w.write(", ");
            first = false;
            if (const auto* sel = std::get_if<SelectItem>(&item.item)) {
                w.write_expr(sel->expr);
            } else {
                w.write_expr(std::make_shared<Expr>(Expr{std::get<AggExpr>(item.item)}));
            }
            w.write(" AS ");
            w.write_ident(item.output_name());
        }
        w.write(" FROM (");
        write_select(a.child, w);
        w.write(") AS \"_v\"");
        if (!a.group_by.empty()) {
            w.write(" GROUP BY ");
            first = true;
            for (const auto& name : a.group_by) {
                if (!first) w.write(", ");
                first = false;
                w.write_ident(name);
            }
        }
        if (a.having) {
            w.write(" HAVING ");
            w.write_expr(a.having->expr);
        }
    }
}

} // namespace

ConcreteQuery concretize(const QueryPtr& ast) {
    detail::SqlWriter w;
    write_select(ast, w);
    return ConcreteQuery{w.take_sql(), w.take_params()};
}

void set_expression_validation(bool enabled) {
    g_validate_expressions.store(enabled, std::memory_order_relaxed);
}

bool expression_validation_enabled() {
    return g_validate_expressions.load(std::memory_order_relaxed);
}

} // namespace capql
