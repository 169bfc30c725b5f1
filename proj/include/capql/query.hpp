#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "capql/schema.hpp"

namespace capql {

/// Which modifications a view admits. Joins and aggregations admit none.
struct Updatability {
    bool insertable = false;
    bool deletable = false;
    NameSet updatable_columns;
};

class Query;
using QueryPtr = std::shared_ptr<const Query>;

struct BaseNode {
    std::string table;
    ViewSchema schema;
};

struct WhereNode {
    QueryPtr child;
    ValidatedExpr pred;
    std::string pred_text; // source text, used verbatim in constraint messages
};

struct ProjectNode {
    QueryPtr child;
    std::vector<SelectItem> items;
};

struct JoinNode {
    QueryPtr left;
    QueryPtr right;
    std::optional<ValidatedExpr> pred;
};

struct AggregateNode {
    QueryPtr child;
    std::vector<AggItem> items;
    std::vector<std::string> group_by;
    std::optional<ValidatedExpr> having;
};

/// Immutable relational tree denoting a view: base table, selection,
/// projection, inner join, or aggregation. Construction validates every
/// embedded expression against the child schema and never touches the
/// engine; SQL is produced only by concretize.
class Query {
public:
    using Node = std::variant<BaseNode, WhereNode, ProjectNode, JoinNode, AggregateNode>;

    static QueryPtr base(std::string table, ViewSchema schema);
    static QueryPtr where(QueryPtr child, const ExprPtr& pred, std::string pred_text);
    static QueryPtr project(QueryPtr child, std::vector<SelectItem> items);
    static QueryPtr join(QueryPtr left, QueryPtr right, const ExprPtr& pred);
    static QueryPtr aggregate(QueryPtr child, std::vector<AggItem> items,
                              std::vector<std::string> group_by, const ExprPtr& having);

    const Node& node() const { return node_; }
    const ViewSchema& schema() const { return schema_; }
    const Updatability& updatability() const { return updatability_; }

private:
    Query(Node node, ViewSchema schema, Updatability updatability);

    Node node_;
    ViewSchema schema_;
    Updatability updatability_;
};

/// Schema of the view the tree denotes (pure; cached on each node).
ViewSchema derive_schema(const QueryPtr& ast);

/// Conservative modification rules: base tables are fully modifiable,
/// selections inherit, projections keep simple columns and require omitted
/// base columns to be nullable for inserts, joins and aggregations are
/// read-only.
Updatability derive_updatability(const QueryPtr& ast);

/// Conjunction of the WHERE predicates between a node and its base table.
struct CheckClause {
    ExprPtr expr;
    std::string text; // human-readable clause for constraint messages
};
std::optional<CheckClause> check_clause(const QueryPtr& ast);

/// Table name at the bottom of a Base/Where/Project chain, if the tree is
/// such a chain.
std::optional<std::string> base_table(const QueryPtr& ast);

struct ConcreteQuery {
    std::string sql;
    std::vector<SqlValue> params;
};

/// Render the tree to one engine SELECT. Literals become bound parameters in
/// tree order; output is deterministic for a given tree.
ConcreteQuery concretize(const QueryPtr& ast);

/// Process-wide toggle for expression validation in view derivations.
/// Disabling skips name resolution (parse errors still apply); exists to
/// make the validation cost observable in benchmarks. Enforcement paths are
/// unaffected.
void set_expression_validation(bool enabled);
bool expression_validation_enabled();

} // namespace capql
