#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "capql/backend.hpp"
#include "capql/query.hpp"

namespace capql {

class View;
using ViewPtr = std::shared_ptr<const View>;

/// A view value: either a raw view capability or a contract-guarded proxy
/// around one. All operations accept either; guarded views consult their
/// contract layers before any effect reaches the raw capability.
class View {
public:
    virtual ~View() = default;

    /// Output columns of the view this value denotes.
    virtual const ViewSchema& schema() const = 0;
    virtual const Updatability& updatability() const = 0;
};

/// An unforgeable handle denoting a derived relational view. Possession is
/// the sole grant of access: raw views are minted only through a root
/// authority (see authority.hpp) or derived from existing views, and there
/// is deliberately no way to serialize one or rebuild one from bytes.
class RawView final : public View {
public:
    const ViewSchema& schema() const override { return ast_->schema(); }
    const Updatability& updatability() const override { return ast_->updatability(); }

    const QueryPtr& ast() const { return ast_; }
    const std::shared_ptr<Connection>& connection() const { return conn_; }

private:
    RawView(QueryPtr ast, std::shared_ptr<Connection> conn)
        : ast_(std::move(ast)), conn_(std::move(conn)) {}

    QueryPtr ast_;
    std::shared_ptr<Connection> conn_;

    friend ViewPtr detail_mint_raw_view(QueryPtr, std::shared_ptr<Connection>);
};

/// Library-internal minting entry point. Application code obtains views
/// from make_view (root authority required) or by derivation.
ViewPtr detail_mint_raw_view(QueryPtr ast, std::shared_ptr<Connection> conn);

// Derivation operations. These build a new view value and never touch the
// engine.

ViewPtr where(const ViewPtr& v, const std::string& clause);
ViewPtr where(const ViewPtr& v, const ExprPtr& clause);

ViewPtr select(const ViewPtr& v, const std::string& items);
ViewPtr select(const ViewPtr& v, std::vector<SelectItem> items);

ViewPtr join(const ViewPtr& left, const ViewPtr& right);
ViewPtr join(const ViewPtr& left, const ViewPtr& right, const std::string& clause);
ViewPtr join(const ViewPtr& left, const ViewPtr& right, const ExprPtr& clause);

ViewPtr aggregate(const ViewPtr& v, const std::string& items,
                  const std::vector<std::string>& group_by = {},
                  const std::optional<std::string>& having = std::nullopt);
ViewPtr aggregate(const ViewPtr& v, std::vector<AggItem> items,
                  std::vector<std::string> group_by, ExprPtr having);

// Data operations. These concretize the view's query and interact with the
// engine.

/// Execute the view's query and materialize the rows.
RowSet fetch(const ViewPtr& v);

/// Update rows reachable through the view. The optional WHERE argument
/// narrows the scope but is not treated as part of the view definition:
/// only the definition predicates act as the check option.
std::int64_t update(const ViewPtr& v, const std::string& set_list,
                    const std::optional<std::string>& where_clause = std::nullopt);

/// Delete rows reachable through the view; installs no triggers.
std::int64_t erase(const ViewPtr& v,
                   const std::optional<std::string>& where_clause = std::nullopt);

/// Insert rows through the view. New rows must satisfy the view's defining
/// predicates (and any contract-imposed restrictions).
std::int64_t insert(const ViewPtr& v, const std::vector<std::string>& columns,
                    const std::vector<Row>& rows);

} // namespace capql
