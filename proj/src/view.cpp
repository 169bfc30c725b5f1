#include "capql/view.hpp"

#include <algorithm>

#include "capql/contract.hpp"
#include "capql/error.hpp"
#include "capql/parser.hpp"

namespace capql {

ViewPtr detail_mint_raw_view(QueryPtr ast, std::shared_ptr<Connection> conn) {
    return ViewPtr(new RawView(std::move(ast), std::move(conn)));
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

struct Flattened {
    std::vector<LayerPtr> layers; // outermost first
    std::shared_ptr<const RawView> core;
};

Flattened flatten(const ViewPtr& v) {
    Flattened out;
    ViewPtr cur = v;
    while (auto guarded = std::dynamic_pointer_cast<const GuardedView>(cur)) {
        out.layers.push_back(guarded->layer());
        cur = guarded->inner();
    }
    out.core = std::dynamic_pointer_cast<const RawView>(cur);
    if (!out.core) {
        throw Error("view value has no underlying capability");
    }
    return out;
}

/// Consult one contract layer for one operation. Empty contracts carry only
/// join-group membership and deny nothing.
const PrivilegeGrant* check_layer(const LayerPtr& layer, Privilege p) {
    layer->checks.fetch_add(1, std::memory_order_relaxed);
    if (layer->contract.empty()) {
        return nullptr;
    }
    const PrivilegeGrant* grant = layer->contract.grant(p);
    if (!grant) {
        throw ContractViolation(layer->blame, p,
                                std::string("operation requires the ") + to_string(p) +
                                    " privilege");
    }
    return grant;
}

ViewPtr rewrap(const Flattened& flat, ViewPtr core) {
    for (auto it = flat.layers.rbegin(); it != flat.layers.rend(); ++it) {
        core = std::make_shared<GuardedView>(*it, std::move(core));
    }
    return core;
}

QueryPtr core_ast(const ViewPtr& v) {
    return flatten(v).core->ast();
}

/// Apply a #:restrict transform for a modification operation and verify it
/// only narrowed the view: the result must reach the original tree through
/// Where/Project nodes alone.
QueryPtr apply_narrowing(const ViewTransform& transform, const QueryPtr& base,
                         const std::shared_ptr<Connection>& conn, Privilege op) {
    ViewPtr transformed = transform(detail_mint_raw_view(base, conn));
    QueryPtr ast = core_ast(transformed);
    QueryPtr cur = ast;
    while (cur != base) {
        if (const auto* w = std::get_if<WhereNode>(&cur->node())) {
            cur = w->child;
        } else if (const auto* p = std::get_if<ProjectNode>(&cur->node())) {
            cur = p->child;
        } else {
            const std::string detail =
                "a #:restrict transform for a modification may only narrow the view "
                "with where/select";
            switch (op) {
            case Privilege::Update: throw NotUpdatable(detail);
            case Privilege::Insert: throw NotInsertable(detail);
            default: throw NotDeletable(detail);
            }
        }
    }
    return ast;
}

/// Collect restrict transforms for `op` from all layers (outermost first),
/// enforcing the privilege along the way.
std::vector<ViewTransform> collect_restricts(const Flattened& flat, Privilege op) {
    std::vector<ViewTransform> out;
    for (const auto& layer : flat.layers) {
        const PrivilegeGrant* grant = check_layer(layer, op);
        if (grant && grant->restrict_transform) {
            out.push_back(*grant->restrict_transform);
        }
    }
    return out;
}

/// Every definition predicate of the effective tree must still make sense
/// against the view the operation targets; a predicate over a column the
/// view projected away is rejected here rather than at the engine.
void revalidate_chain_predicates(const QueryPtr& ast, const ViewSchema& visible) {
    QueryPtr cur = ast;
    while (true) {
        if (const auto* w = std::get_if<WhereNode>(&cur->node())) {
            validate(w->pred.expr, visible);
            cur = w->child;
        } else if (const auto* p = std::get_if<ProjectNode>(&cur->node())) {
            cur = p->child;
        } else {
            break;
        }
    }
}

std::string resolve_base_table(const QueryPtr& ast, Privilege op) {
    auto table = base_table(ast);
    if (!table) {
        const std::string detail = "view does not sit over a single base table";
        switch (op) {
        case Privilege::Update: throw NotUpdatable(detail);
        case Privilege::Insert: throw NotInsertable(detail);
        default: throw NotDeletable(detail);
        }
    }
    return *table;
}

ViewPtr where_impl(const ViewPtr& v, const ExprPtr& pred, std::string text) {
    Flattened flat = flatten(v);
    NameSet used = mentions(pred);
    for (const auto& layer : flat.layers) {
        const PrivilegeGrant* grant = check_layer(layer, Privilege::Where);
        if (!grant) continue;
        for (const auto& column : grant->prohibited) {
            if (used.count(column)) {
                throw ContractViolation(layer->blame, Privilege::Where,
                                        "WHERE clause mentions prohibited column: " + column);
            }
        }
    }
    QueryPtr ast = Query::where(flat.core->ast(), pred, std::move(text));
    return rewrap(flat, detail_mint_raw_view(std::move(ast), flat.core->connection()));
}

struct JoinModifiers {
    std::vector<std::pair<LayerPtr, const PrivilegeGrant*>> grants; // layers with +join details
};

/// Gather group memberships of a view, deduplicated, in layer order.
std::vector<JoinGroupPtr> memberships(const Flattened& flat) {
    std::vector<JoinGroupPtr> out;
    for (const auto& layer : flat.layers) {
        for (const auto& g : layer->groups) {
            if (std::find(out.begin(), out.end(), g) == out.end()) {
                out.push_back(g);
            }
        }
    }
    return out;
}

ViewPtr join_impl(const ViewPtr& left, const ViewPtr& right, const ExprPtr& pred,
                  std::string pred_text) {
    Flattened flat_left = flatten(left);
    Flattened flat_right = flatten(right);

    std::vector<std::pair<LayerPtr, const PrivilegeGrant*>> join_grants;
    for (const auto& layer : flat_left.layers) {
        join_grants.emplace_back(layer, check_layer(layer, Privilege::Join));
    }
    for (const auto& layer : flat_right.layers) {
        join_grants.emplace_back(layer, check_layer(layer, Privilege::Join));
    }

    if (pred) {
        ViewSchema combined;
        combined.columns = left->schema().columns;
        combined.columns.insert(combined.columns.end(), right->schema().columns.begin(),
                                right->schema().columns.end());
        if (expression_validation_enabled()) {
            validate(pred, combined);
        }
    }

    // Layer-level #:pre predicates.
    for (const auto& [layer, grant] : join_grants) {
        if (grant && grant->pre && !(*grant->pre)(left, right, pred)) {
            throw ContractViolation(layer->blame, Privilege::Join,
                                    "join precondition rejected the operands");
        }
    }

    auto groups_left = memberships(flat_left);
    auto groups_right = memberships(flat_right);

    QueryPtr joined = Query::join(flat_left.core->ast(), flat_right.core->ast(), pred);
    ViewPtr result = detail_mint_raw_view(joined, flat_left.core->connection());

    if (!groups_left.empty() || !groups_right.empty()) {
        // Join-group discipline: members may only join views sharing a group.
        std::vector<JoinGroupPtr> shared;
        for (const auto& g : groups_left) {
            if (std::find(groups_right.begin(), groups_right.end(), g) != groups_right.end()) {
                shared.push_back(g);
            }
        }
        if (shared.empty()) {
            const auto& blamed =
                !groups_left.empty() ? flat_left : flat_right;
            Blame blame;
            for (const auto& layer : blamed.layers) {
                if (!layer->groups.empty()) {
                    blame = layer->blame;
                    break;
                }
            }
            throw ContractViolation(blame, Privilege::Join,
                                    "views are not members of a shared join group");
        }
        std::sort(shared.begin(), shared.end(),
                  [](const JoinGroupPtr& a, const JoinGroupPtr& b) {
                      return a->ordinal < b->ordinal;
                  });
        for (const auto& g : shared) {
            if (g->pre && !(*g->pre)(left, right, pred)) {
                throw ContractViolation(Blame{g->name, g->name, 0}, Privilege::Join,
                                        "join group precondition rejected the operands");
            }
        }
        for (const auto& g : shared) {
            if (g->post) {
                result = (*g->post)(result);
            }
        }
        const ViewContract* with = nullptr;
        std::string with_group;
        for (const auto& g : shared) {
            if (g->with) {
                if (with) {
                    throw MalformedContract(
                        "more than one shared join group supplies a #:with contract");
                }
                with = &*g->with;
                with_group = g->name;
            }
        }
        if (with) {
            // #:with replaces inheritance: the joined result derives exactly
            // the contract the group names.
            return guard(result, *with, Blame{with_group, with_group, 0});
        }
    }

    // The result of a join inherits the contracts of both joined views.
    auto wrap_side = [&](const Flattened& flat, ViewPtr acc) {
        for (auto it = flat.layers.rbegin(); it != flat.layers.rend(); ++it) {
            const PrivilegeGrant* grant = (*it)->contract.grant(Privilege::Join);
            if (grant && grant->post) {
                acc = (*grant->post)(acc);
            }
            if (grant && grant->with_contract) {
                acc = guard(acc, *grant->with_contract, (*it)->blame);
            } else {
                acc = std::make_shared<GuardedView>(*it, std::move(acc));
            }
        }
        return acc;
    };
    result = wrap_side(flat_right, std::move(result));
    result = wrap_side(flat_left, std::move(result));
    return result;
}

void collect_agg_funcs(const ExprPtr& expr, std::set<AggFunc>& out) {
    if (!expr) return;
    if (const auto* g = std::get_if<AggExpr>(&expr->node)) {
        out.insert(g->func);
        collect_agg_funcs(g->argument, out);
    } else if (const auto* u = std::get_if<Unary>(&expr->node)) {
        collect_agg_funcs(u->operand, out);
    } else if (const auto* b = std::get_if<Binary>(&expr->node)) {
        collect_agg_funcs(b->lhs, out);
        collect_agg_funcs(b->rhs, out);
    }
}

} // namespace

ViewPtr where(const ViewPtr& v, const std::string& clause) {
    return where_impl(v, parse_predicate(clause), trim(clause));
}

ViewPtr where(const ViewPtr& v, const ExprPtr& clause) {
    return where_impl(v, clause, render(clause));
}

ViewPtr select(const ViewPtr& v, const std::string& items) {
    return select(v, parse_select_list(items));
}

ViewPtr select(const ViewPtr& v, std::vector<SelectItem> items) {
    Flattened flat = flatten(v);
    for (const auto& layer : flat.layers) {
        check_layer(layer, Privilege::Select);
    }
    QueryPtr ast = Query::project(flat.core->ast(), std::move(items));
    return rewrap(flat, detail_mint_raw_view(std::move(ast), flat.core->connection()));
}

ViewPtr join(const ViewPtr& left, const ViewPtr& right) {
    return join_impl(left, right, nullptr, "");
}

ViewPtr join(const ViewPtr& left, const ViewPtr& right, const std::string& clause) {
    return join_impl(left, right, parse_predicate(clause), trim(clause));
}

ViewPtr join(const ViewPtr& left, const ViewPtr& right, const ExprPtr& clause) {
    return join_impl(left, right, clause, clause ? render(clause) : "");
}

ViewPtr aggregate(const ViewPtr& v, const std::string& items,
                  const std::vector<std::string>& group_by,
                  const std::optional<std::string>& having) {
    ExprPtr having_expr = having ? parse_having(*having) : nullptr;
    return aggregate(v, parse_agg_list(items), group_by, std::move(having_expr));
}

ViewPtr aggregate(const ViewPtr& v, std::vector<AggItem> items,
                  std::vector<std::string> group_by, ExprPtr having) {
    Flattened flat = flatten(v);

    std::set<AggFunc> used;
    for (const auto& item : items) {
        if (const auto* agg = std::get_if<AggExpr>(&item.item)) {
            used.insert(agg->func);
        }
    }
    collect_agg_funcs(having, used);

    ExprPtr effective_having = std::move(having);
    for (const auto& layer : flat.layers) {
        const PrivilegeGrant* grant = check_layer(layer, Privilege::Aggregate);
        if (!grant) continue;
        if (grant->allowed_aggrs) {
            for (AggFunc f : used) {
                if (std::find(grant->allowed_aggrs->begin(), grant->allowed_aggrs->end(), f) ==
                    grant->allowed_aggrs->end()) {
                    throw ContractViolation(layer->blame, Privilege::Aggregate,
                                            std::string("aggregation function ") + to_string(f) +
                                                " is not allowed by this contract");
                }
            }
        }
        if (grant->having_clause) {
            // Contract-supplied clauses are validated when the aggregation
            // is applied, not when the contract is written.
            effective_having =
                conjoin(std::move(effective_having), parse_having(*grant->having_clause));
        }
    }

    QueryPtr ast = Query::aggregate(flat.core->ast(), std::move(items), std::move(group_by),
                                    effective_having);
    ViewPtr result = detail_mint_raw_view(std::move(ast), flat.core->connection());

    // Unwind the stack innermost-first. A layer with #:with hands the
    // aggregation result that contract instead of itself.
    for (auto it = flat.layers.rbegin(); it != flat.layers.rend(); ++it) {
        const PrivilegeGrant* grant = (*it)->contract.grant(Privilege::Aggregate);
        if (grant && grant->with_contract) {
            result = guard(result, *grant->with_contract, (*it)->blame);
        } else {
            result = std::make_shared<GuardedView>(*it, std::move(result));
        }
    }
    return result;
}

RowSet fetch(const ViewPtr& v) {
    Flattened flat = flatten(v);
    std::vector<ViewTransform> restricts = collect_restricts(flat, Privilege::Fetch);

    QueryPtr eff = flat.core->ast();
    for (const auto& transform : restricts) {
        eff = core_ast(transform(detail_mint_raw_view(eff, flat.core->connection())));
    }

    ConcreteQuery cq = concretize(eff);
    RowSet rows = flat.core->connection()->query(cq.sql, cq.params);
    rows.columns = eff->schema().column_names();
    return rows;
}

std::int64_t update(const ViewPtr& v, const std::string& set_list,
                    const std::optional<std::string>& where_clause) {
    std::vector<Assignment> assignments = parse_assignments(set_list);
    Flattened flat = flatten(v);
    std::vector<ViewTransform> restricts = collect_restricts(flat, Privilege::Update);

    QueryPtr eff = flat.core->ast();
    for (const auto& transform : restricts) {
        eff = apply_narrowing(transform, eff, flat.core->connection(), Privilege::Update);
    }

    const ViewSchema& visible = v->schema();
    for (const auto& a : assignments) {
        validate(a.value, visible);
    }
    ExprPtr user_where;
    if (where_clause) {
        user_where = parse_predicate(*where_clause);
        validate(user_where, visible);
    }

    const Updatability upd = eff->updatability();
    for (const auto& a : assignments) {
        if (!upd.updatable_columns.count(a.column)) {
            throw NotUpdatable("column '" + a.column + "' is not updatable through this view");
        }
    }
    std::string table = resolve_base_table(eff, Privilege::Update);
    revalidate_chain_predicates(eff, visible);

    auto scope_clause = check_clause(eff);
    ExprPtr scope = conjoin(scope_clause ? scope_clause->expr : nullptr, user_where);

    // Only the view definition acts as the check option; the per-operation
    // WHERE narrows scope without becoming a constraint.
    auto check = check_clause(flat.core->ast());
    return flat.core->connection()
        ->guarded_update(table, assignments, scope, check)
        .affected_rows;
}

std::int64_t erase(const ViewPtr& v, const std::optional<std::string>& where_clause) {
    Flattened flat = flatten(v);
    std::vector<ViewTransform> restricts = collect_restricts(flat, Privilege::Delete);

    QueryPtr eff = flat.core->ast();
    for (const auto& transform : restricts) {
        eff = apply_narrowing(transform, eff, flat.core->connection(), Privilege::Delete);
    }

    if (!eff->updatability().deletable) {
        throw NotDeletable("joined or aggregated views cannot be deleted from");
    }
    const ViewSchema& visible = v->schema();
    ExprPtr user_where;
    if (where_clause) {
        user_where = parse_predicate(*where_clause);
        validate(user_where, visible);
    }
    std::string table = resolve_base_table(eff, Privilege::Delete);
    revalidate_chain_predicates(eff, visible);

    auto scope_clause = check_clause(eff);
    ExprPtr scope = conjoin(scope_clause ? scope_clause->expr : nullptr, user_where);
    return flat.core->connection()->delete_rows(table, scope).affected_rows;
}

std::int64_t insert(const ViewPtr& v, const std::vector<std::string>& columns,
                    const std::vector<Row>& rows) {
    Flattened flat = flatten(v);
    std::vector<ViewTransform> restricts = collect_restricts(flat, Privilege::Insert);

    QueryPtr eff = flat.core->ast();
    for (const auto& transform : restricts) {
        eff = apply_narrowing(transform, eff, flat.core->connection(), Privilege::Insert);
    }

    if (!eff->updatability().insertable) {
        throw NotInsertable("view does not admit inserts");
    }
    std::string table = resolve_base_table(eff, Privilege::Insert);

    const ViewSchema& visible = v->schema();
    std::vector<std::string> base_columns;
    base_columns.reserve(columns.size());
    for (const auto& column : columns) {
        auto matches = visible.find(column);
        if (matches.size() != 1) {
            throw NotInsertable("column '" + column + "' is not part of this view");
        }
        const ColumnInfo& info = visible.columns[matches.front()];
        if (!info.origin) {
            throw NotInsertable("column '" + column + "' is not a simple base-table column");
        }
        base_columns.push_back(info.origin->column);
    }

    // Restrict layers tighten the check: their predicates are part of the
    // effective definition the new rows must satisfy.
    auto check = check_clause(eff);
    return flat.core->connection()
        ->guarded_insert(table, base_columns, rows, check)
        .affected_rows;
}

} // namespace capql
