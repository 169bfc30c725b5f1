#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "capql/error.hpp"
#include "capql/view.hpp"

namespace capql {

/// One entry per view operation. A privilege is the right to invoke the
/// corresponding operation on a guarded view.
enum class Privilege { Fetch, Update, Delete, Insert, Where, Select, Aggregate, Join };

const char* to_string(Privilege p);

/// A view-to-view function used by #:restrict and #:post modifiers.
using ViewTransform = std::function<ViewPtr(const ViewPtr&)>;

/// A #:pre predicate over the two join operands and the join condition
/// (null when the join has no condition).
using JoinPrecondition =
    std::function<bool(const ViewPtr&, const ViewPtr&, const ExprPtr&)>;

/// Identifies the contracted function and argument whose contract a
/// violation breaches.
struct Blame {
    std::string component;
    std::string function;
    int argument = 0; // 1-based; 0 means the function's result

    std::string to_string() const;
};

/// Raised when a guarded operation is denied or a boundary check fails.
/// Violations abort the enclosing operation before any engine effect.
class ContractViolation : public Error {
public:
    ContractViolation(Blame blame, std::optional<Privilege> privilege,
                      const std::string& detail);

    const Blame& blame() const { return blame_; }
    const std::optional<Privilege>& privilege() const { return privilege_; }
    const std::string& detail() const { return detail_; }

private:
    Blame blame_;
    std::optional<Privilege> privilege_;
    std::string detail_;
};

class ViewContract;
using ContractPtr = std::shared_ptr<const ViewContract>;

/// Modifiers attached to one granted privilege.
struct PrivilegeGrant {
    std::optional<ViewTransform> restrict_transform;  // +fetch/+update/+delete/+insert
    NameSet prohibited;                               // +where
    std::optional<std::vector<AggFunc>> allowed_aggrs; // +aggregate
    std::optional<std::string> having_clause;          // +aggregate; validated at use
    ContractPtr with_contract;                         // +aggregate/+join result contract
    std::optional<JoinPrecondition> pre;               // +join
    std::optional<ViewTransform> post;                 // +join
};

/// Builder for one privilege clause of a view contract. Attaching a
/// modifier to a privilege that does not admit it raises MalformedContract.
class PrivilegeSpec {
public:
    explicit PrivilegeSpec(Privilege p) : privilege_(p) {}

    PrivilegeSpec&& restrict(ViewTransform f) &&;
    PrivilegeSpec&& prohibit(const std::string& columns) &&; // comma-separated names
    PrivilegeSpec&& aggrs(const std::string& functions) &&;  // e.g. "MIN, MAX"
    PrivilegeSpec&& having(std::string clause) &&;
    PrivilegeSpec&& with(ViewContract contract) &&;
    PrivilegeSpec&& pre(JoinPrecondition p) &&;
    PrivilegeSpec&& post(ViewTransform f) &&;

    Privilege privilege() const { return privilege_; }
    const PrivilegeGrant& grant() const { return grant_; }

private:
    Privilege privilege_;
    PrivilegeGrant grant_;
};

PrivilegeSpec fetch_priv();
PrivilegeSpec update_priv();
PrivilegeSpec delete_priv();
PrivilegeSpec insert_priv();
PrivilegeSpec where_priv();
PrivilegeSpec select_priv();
PrivilegeSpec aggregate_priv();
PrivilegeSpec join_priv();

/// A view contract: the set of granted privileges with their modifiers.
/// A privilege absent from the map is denied. The empty contract is the
/// flat "is a view" check and wraps nothing.
class ViewContract {
public:
    ViewContract() = default;
    explicit ViewContract(std::vector<PrivilegeSpec> privileges);

    bool empty() const { return privileges_.empty(); }
    bool grants(Privilege p) const { return privileges_.count(p) != 0; }
    const PrivilegeGrant* grant(Privilege p) const;

private:
    std::map<Privilege, PrivilegeGrant> privileges_;
};

/// view/c surface form: view_c() is the flat check, view_c({...}) lists
/// privileges.
ViewContract view_c();
ViewContract view_c(std::vector<PrivilegeSpec> privileges);

/// Shared, mutable state of one join group instance. Views are added when a
/// contracted function is applied; any two views holding the same group may
/// be joined, subject to the group's #:pre, and the result is transformed
/// by #:post and contracted by #:with.
struct JoinGroupState {
    std::string name;
    int ordinal = 0; // definition order within the function contract
    std::optional<JoinPrecondition> pre;
    std::optional<ViewTransform> post;
    std::optional<ViewContract> with;
    std::set<std::uint64_t> members; // layer identities
};
using JoinGroupPtr = std::shared_ptr<JoinGroupState>;

/// One proxy layer of a guarded view: a contract, the blame label of the
/// boundary that installed it, and any join-group memberships. Derived
/// views share layer objects, so membership travels with derivation.
struct Layer {
    std::uint64_t id = 0;
    ViewContract contract; // empty means permit-all (group-carrier layer)
    Blame blame;
    std::vector<JoinGroupPtr> groups;

    /// Times this layer has been consulted. Instrumentation for the
    /// complete-mediation property.
    mutable std::atomic<std::int64_t> checks{0};
};
using LayerPtr = std::shared_ptr<const Layer>;

/// A contract proxy around a view. Stacks conjunctively: an operation
/// succeeds only if every layer permits it.
class GuardedView final : public View {
public:
    GuardedView(LayerPtr layer, ViewPtr inner)
        : layer_(std::move(layer)), inner_(std::move(inner)) {}

    const ViewSchema& schema() const override { return inner_->schema(); }
    const Updatability& updatability() const override { return inner_->updatability(); }

    const LayerPtr& layer() const { return layer_; }
    const ViewPtr& inner() const { return inner_; }

private:
    LayerPtr layer_;
    ViewPtr inner_;
};

/// Wrap `v` in a contract layer. The empty contract checks nothing further
/// and returns `v` unchanged.
ViewPtr guard(const ViewPtr& v, const ViewContract& contract, Blame blame);

/// As guard, but also enrolls the created layer in join groups. Used by
/// contracted-function application; a non-empty group list forces a layer
/// even under the empty contract.
ViewPtr guard_with_groups(const ViewPtr& v, const ViewContract& contract, Blame blame,
                          std::vector<JoinGroupPtr> groups);

// ---------------------------------------------------------------------------
// Contracted functions (the ->/join surface form).

/// Argument and result values crossing a contracted boundary.
using Value = std::variant<std::monostate, std::string, ViewPtr, RowSet>;

/// Definition of a join group inside a function contract. Groups are
/// instantiated fresh at every application of the function.
struct GroupDef {
    std::string name;
    std::optional<JoinPrecondition> pre_fn;
    std::optional<ViewTransform> post_fn;
    std::optional<ViewContract> with_contract;

    GroupDef&& pre(JoinPrecondition f) &&;
    GroupDef&& post(ViewTransform f) &&;
    GroupDef&& with(ViewContract c) &&;
};
GroupDef group(std::string name);

struct ArgContract {
    enum class Kind { Any, String, View };
    Kind kind = Kind::Any;
    ViewContract contract;           // Kind::View only
    std::vector<std::string> groups; // group names this argument joins
};

ArgContract any_arg();
ArgContract string_arg();
ArgContract view_arg(ViewContract contract, std::vector<std::string> groups = {});

struct ResultContract {
    enum class Kind { Any, String, View };
    Kind kind = Kind::Any;
    ViewContract contract;
};

ResultContract any_result();
ResultContract string_result();
ResultContract view_result(ViewContract contract);

struct FunctionContract {
    std::vector<GroupDef> groups;
    std::vector<ArgContract> args;
    ResultContract result;
};

/// A function guarded by a contract. Application instantiates fresh join
/// groups, checks and wraps each argument, runs the body, and applies the
/// result contract. Violations blame this function and the breached
/// argument position.
class Contracted {
public:
    Contracted() = default;
    Contracted(std::string name, FunctionContract contract,
               std::function<Value(const std::vector<Value>&)> body);

    Value operator()(std::vector<Value> args) const;
    const std::string& name() const { return name_; }

private:
    std::string name_;
    FunctionContract contract_;
    std::function<Value(const std::vector<Value>&)> body_;
};

Contracted define_contracted(std::string name, FunctionContract contract,
                             std::function<Value(const std::vector<Value>&)> body);

} // namespace capql
