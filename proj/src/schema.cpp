#include "capql/schema.hpp"

#include "capql/error.hpp"

namespace capql {

std::vector<std::size_t> ViewSchema::find(const std::string& name) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (ci_equal(columns[i].name, name)) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::string> ViewSchema::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) {
        out.push_back(c.name);
    }
    return out;
}

ValidatedExpr validate(const ExprPtr& expr, const ViewSchema& schema) {
    ValidatedExpr result;
    result.expr = expr;
    for (const auto& name : mentions(expr)) {
        auto matches = schema.find(name);
        if (matches.empty()) {
            throw UnknownColumn(name);
        }
        if (matches.size() > 1) {
            throw AmbiguousColumn(name);
        }
        result.bindings.emplace(name, matches.front());
    }
    return result;
}

} // namespace capql
