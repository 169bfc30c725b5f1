#include "capql/error.hpp"

namespace capql {

namespace {

std::string with_offset(const std::string& message, std::size_t offset) {
    return message + " (at offset " + std::to_string(offset) + ")";
}

} // namespace

ParseError::ParseError(const std::string& message, std::size_t offset,
                       std::vector<std::string> expected)
    : Error(with_offset(message, offset)), offset_(offset), expected_(std::move(expected)) {}

AliasNotSupported::AliasNotSupported(const std::string& alias)
    : Error("column aliases are not supported: " + alias) {}

DuplicateAssignment::DuplicateAssignment(const std::string& column)
    : Error("column assigned more than once: " + column), column_(column) {}

UnknownColumn::UnknownColumn(const std::string& name)
    : Error("unknown column: " + name), name_(name) {}

AmbiguousColumn::AmbiguousColumn(const std::string& name)
    : Error("ambiguous column: " + name), name_(name) {}

UnknownTable::UnknownTable(const std::string& table)
    : Error("unknown table: " + table) {}

EngineError::EngineError(const std::string& message, const std::string& statement)
    : Error(message + " [statement: " + statement + "]"), statement_(statement) {}

ViewConstraintViolation::ViewConstraintViolation(const std::string& operation,
                                                 const std::string& clause)
    : Error(operation + ": violated view constraint: " + clause),
      operation_(operation),
      clause_(clause) {}

NotUpdatable::NotUpdatable(const std::string& detail)
    : Error("view is not updatable: " + detail) {}

NotInsertable::NotInsertable(const std::string& detail)
    : Error("view is not insertable: " + detail) {}

NotDeletable::NotDeletable(const std::string& detail)
    : Error("view is not deletable: " + detail) {}

NoUserContext::NoUserContext()
    : Error("current_user() called outside any with_user scope") {}

} // namespace capql
