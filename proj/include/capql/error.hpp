#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace capql {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed syntax in a SQL expression, select list, or assignment list.
/// Carries the byte offset of the failure and the set of tokens that would
/// have been accepted there.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset,
               std::vector<std::string> expected = {});

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// `AS` aliases (and implicit aliases) are rejected: renaming columns would
/// make access-control reasoning unreliable.
class AliasNotSupported : public Error {
public:
    explicit AliasNotSupported(const std::string& alias);
};

/// The same column is assigned twice in one update.
class DuplicateAssignment : public Error {
public:
    explicit DuplicateAssignment(const std::string& column);
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

/// Placeholder/argument count mismatch in sqlformat.
class ArityMismatch : public Error {
public:
    using Error::Error;
};

/// A column reference did not resolve against the view schema.
class UnknownColumn : public Error {
public:
    explicit UnknownColumn(const std::string& name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// A column reference matched more than one schema column (possible after
/// joins that expose the same name twice).
class AmbiguousColumn : public Error {
public:
    explicit AmbiguousColumn(const std::string& name);
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NotADatabase : public Error {
public:
    using Error::Error;
};

class UnknownTable : public Error {
public:
    explicit UnknownTable(const std::string& table);
};

/// Engine-level failure, surfaced verbatim together with the statement that
/// caused it.
class EngineError : public Error {
public:
    EngineError(const std::string& message, const std::string& statement);
    const std::string& statement() const { return statement_; }

private:
    std::string statement_;
};

/// A row written through a view failed the view's defining predicate.
/// Message format: `<op>: violated view constraint: <clause>`.
class ViewConstraintViolation : public Error {
public:
    ViewConstraintViolation(const std::string& operation, const std::string& clause);
    const std::string& operation() const { return operation_; }
    const std::string& clause() const { return clause_; }

private:
    std::string operation_;
    std::string clause_;
};

class NotUpdatable : public Error {
public:
    explicit NotUpdatable(const std::string& detail);
};

class NotInsertable : public Error {
public:
    explicit NotInsertable(const std::string& detail);
};

class NotDeletable : public Error {
public:
    explicit NotDeletable(const std::string& detail);
};

/// current_user() was called outside any with_user scope.
class NoUserContext : public Error {
public:
    NoUserContext();
};

/// A contract combined a modifier with a privilege that does not admit it,
/// or is otherwise self-contradictory.
class MalformedContract : public Error {
public:
    using Error::Error;
};

} // namespace capql
