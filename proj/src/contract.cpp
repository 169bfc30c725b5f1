#include "capql/contract.hpp"

#include <atomic>

#include "capql/parser.hpp"

namespace capql {

const char* to_string(Privilege p) {
    switch (p) {
    case Privilege::Fetch: return "+fetch";
    case Privilege::Update: return "+update";
    case Privilege::Delete: return "+delete";
    case Privilege::Insert: return "+insert";
    case Privilege::Where: return "+where";
    case Privilege::Select: return "+select";
    case Privilege::Aggregate: return "+aggregate";
    case Privilege::Join: return "+join";
    }
    return "?";
}

std::string Blame::to_string() const {
    std::string out = function.empty() ? std::string("<unattributed>") : function;
    if (argument > 0) {
        out += ", argument " + std::to_string(argument);
    } else if (argument == 0 && !function.empty()) {
        out += ", result";
    }
    return out;
}

ContractViolation::ContractViolation(Blame blame, std::optional<Privilege> privilege,
                                     const std::string& detail)
    : Error("contract violation" +
            (privilege ? std::string(" on ") + capql::to_string(*privilege) : std::string()) +
            ": " + detail + " (blaming " + blame.to_string() + ")"),
      blame_(std::move(blame)),
      privilege_(privilege),
      detail_(detail) {}

namespace {

void require_privilege(Privilege actual, std::initializer_list<Privilege> allowed,
                       const char* modifier) {
    for (Privilege p : allowed) {
        if (p == actual) return;
    }
    throw MalformedContract(std::string("modifier ") + modifier +
                            " cannot be attached to " + to_string(actual));
}

} // namespace

PrivilegeSpec&& PrivilegeSpec::restrict(ViewTransform f) && {
    require_privilege(privilege_,
                      {Privilege::Fetch, Privilege::Update, Privilege::Delete,
                       Privilege::Insert},
                      "#:restrict");
    grant_.restrict_transform = std::move(f);
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::prohibit(const std::string& columns) && {
    require_privilege(privilege_, {Privilege::Where}, "#:prohibit");
    // Comma-separated column names.
    std::string current;
    auto flush = [&] {
        std::size_t begin = current.find_first_not_of(" \t");
        std::size_t end = current.find_last_not_of(" \t");
        if (begin != std::string::npos) {
            grant_.prohibited.insert(current.substr(begin, end - begin + 1));
        }
        current.clear();
    };
    for (char c : columns) {
        if (c == ',') {
            flush();
        } else {
            current += c;
        }
    }
    flush();
    if (grant_.prohibited.empty()) {
        throw MalformedContract("#:prohibit requires at least one column name");
    }
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::aggrs(const std::string& functions) && {
    require_privilege(privilege_, {Privilege::Aggregate}, "#:aggrs");
    grant_.allowed_aggrs = parse_agg_func_list(functions);
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::having(std::string clause) && {
    require_privilege(privilege_, {Privilege::Aggregate}, "#:having");
    grant_.having_clause = std::move(clause);
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::with(ViewContract contract) && {
    require_privilege(privilege_, {Privilege::Aggregate, Privilege::Join}, "#:with");
    grant_.with_contract = std::make_shared<const ViewContract>(std::move(contract));
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::pre(JoinPrecondition p) && {
    require_privilege(privilege_, {Privilege::Join}, "#:pre");
    grant_.pre = std::move(p);
    return std::move(*this);
}

PrivilegeSpec&& PrivilegeSpec::post(ViewTransform f) && {
    require_privilege(privilege_, {Privilege::Join}, "#:post");
    grant_.post = std::move(f);
    return std::move(*this);
}

PrivilegeSpec fetch_priv() { return PrivilegeSpec(Privilege::Fetch); }
PrivilegeSpec update_priv() { return PrivilegeSpec(Privilege::Update); }
PrivilegeSpec delete_priv() { return PrivilegeSpec(Privilege::Delete); }
PrivilegeSpec insert_priv() { return PrivilegeSpec(Privilege::Insert); }
PrivilegeSpec where_priv() { return PrivilegeSpec(Privilege::Where); }
PrivilegeSpec select_priv() { return PrivilegeSpec(Privilege::Select); }
PrivilegeSpec aggregate_priv() { return PrivilegeSpec(Privilege::Aggregate); }
PrivilegeSpec join_priv() { return PrivilegeSpec(Privilege::Join); }

ViewContract::ViewContract(std::vector<PrivilegeSpec> privileges) {
    for (auto& spec : privileges) {
        auto [it, inserted] = privileges_.emplace(spec.privilege(), spec.grant());
        if (!inserted) {
            throw MalformedContract(std::string("privilege listed twice: ") +
                                    to_string(spec.privilege()));
        }
    }
}

const PrivilegeGrant* ViewContract::grant(Privilege p) const {
    auto it = privileges_.find(p);
    return it == privileges_.end() ? nullptr : &it->second;
}

ViewContract view_c() { return ViewContract(); }

ViewContract view_c(std::vector<PrivilegeSpec> privileges) {
    return ViewContract(std::move(privileges));
}

namespace {

std::uint64_t next_layer_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

} // namespace

ViewPtr guard(const ViewPtr& v, const ViewContract& contract, Blame blame) {
    return guard_with_groups(v, contract, std::move(blame), {});
}

ViewPtr guard_with_groups(const ViewPtr& v, const ViewContract& contract, Blame blame,
                          std::vector<JoinGroupPtr> groups) {
    if (!v) {
        throw ContractViolation(blame, std::nullopt, "expected a view capability");
    }
    if (contract.empty() && groups.empty()) {
        // Flat check only: nothing to enforce later, so no proxy.
        return v;
    }
    auto layer = std::make_shared<Layer>();
    layer->id = next_layer_id();
    layer->contract = contract;
    layer->blame = std::move(blame);
    layer->groups = std::move(groups);
    for (const auto& g : layer->groups) {
        g->members.insert(layer->id);
    }
    return std::make_shared<GuardedView>(std::move(layer), v);
}

GroupDef&& GroupDef::pre(JoinPrecondition f) && {
    pre_fn = std::move(f);
    return std::move(*this);
}

GroupDef&& GroupDef::post(ViewTransform f) && {
    post_fn = std::move(f);
    return std::move(*this);
}

GroupDef&& GroupDef::with(ViewContract c) && {
    with_contract = std::move(c);
    return std::move(*this);
}

GroupDef group(std::string name) {
    GroupDef def;
    def.name = std::move(name);
    return def;
}

ArgContract any_arg() { return ArgContract{ArgContract::Kind::Any, {}, {}}; }

ArgContract string_arg() { return ArgContract{ArgContract::Kind::String, {}, {}}; }

ArgContract view_arg(ViewContract contract, std::vector<std::string> groups) {
    return ArgContract{ArgContract::Kind::View, std::move(contract), std::move(groups)};
}

ResultContract any_result() { return ResultContract{ResultContract::Kind::Any, {}}; }

ResultContract string_result() { return ResultContract{ResultContract::Kind::String, {}}; }

ResultContract view_result(ViewContract contract) {
    return ResultContract{ResultContract::Kind::View, std::move(contract)};
}

Contracted::Contracted(std::string name, FunctionContract contract,
                       std::function<Value(const std::vector<Value>&)> body)
    : name_(std::move(name)), contract_(std::move(contract)), body_(std::move(body)) {
    std::set<std::string> group_names;
    for (const auto& def : contract_.groups) {
        if (!group_names.insert(def.name).second) {
            throw MalformedContract("duplicate join group name: " + def.name);
        }
    }
    for (const auto& arg : contract_.args) {
        for (const auto& g : arg.groups) {
            if (!group_names.count(g)) {
                throw MalformedContract("argument references undefined join group: " + g);
            }
            if (arg.kind != ArgContract::Kind::View) {
                throw MalformedContract("only view arguments can join group: " + g);
            }
        }
    }
}

Value Contracted::operator()(std::vector<Value> args) const {
    if (args.size() != contract_.args.size()) {
        throw ArityMismatch(name_ + ": expected " + std::to_string(contract_.args.size()) +
                            " argument(s), got " + std::to_string(args.size()));
    }

    // Join groups are instantiated fresh at every application, so views
    // guarded by different calls can never join each other.
    std::map<std::string, JoinGroupPtr> groups;
    int ordinal = 0;
    for (const auto& def : contract_.groups) {
        auto state = std::make_shared<JoinGroupState>();
        state->name = def.name;
        state->ordinal = ordinal++;
        state->pre = def.pre_fn;
        state->post = def.post_fn;
        state->with = def.with_contract;
        groups.emplace(def.name, state);
    }

    for (std::size_t i = 0; i < args.size(); ++i) {
        const ArgContract& spec = contract_.args[i];
        Blame blame{name_, name_, static_cast<int>(i + 1)};
        switch (spec.kind) {
        case ArgContract::Kind::Any:
            break;
        case ArgContract::Kind::String:
            if (!std::holds_alternative<std::string>(args[i])) {
                throw ContractViolation(blame, std::nullopt, "expected a string");
            }
            break;
        case ArgContract::Kind::View: {
            const auto* view = std::get_if<ViewPtr>(&args[i]);
            if (!view || !*view) {
                throw ContractViolation(blame, std::nullopt, "expected a view capability");
            }
            std::vector<JoinGroupPtr> arg_groups;
            for (const auto& g : spec.groups) {
                arg_groups.push_back(groups.at(g));
            }
            args[i] = guard_with_groups(*view, spec.contract, blame, std::move(arg_groups));
            break;
        }
        }
    }

    Value result = body_(args);

    Blame result_blame{name_, name_, 0};
    switch (contract_.result.kind) {
    case ResultContract::Kind::Any:
        return result;
    case ResultContract::Kind::String:
        if (!std::holds_alternative<std::string>(result)) {
            throw ContractViolation(result_blame, std::nullopt,
                                    "result does not satisfy the string contract");
        }
        return result;
    case ResultContract::Kind::View: {
        const auto* view = std::get_if<ViewPtr>(&result);
        if (!view || !*view) {
            throw ContractViolation(result_blame, std::nullopt, "expected a view result");
        }
        return Value{guard(*view, contract_.result.contract, result_blame)};
    }
    }
    return result;
}

Contracted define_contracted(std::string name, FunctionContract contract,
                             std::function<Value(const std::vector<Value>&)> body) {
    return Contracted(std::move(name), std::move(contract), std::move(body));
}

} // namespace capql
