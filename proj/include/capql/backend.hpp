#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capql/query.hpp"
#include "capql/schema.hpp"
#include "capql/value.hpp"

struct sqlite3;

namespace capql {

struct DmlOutcome {
    std::int64_t affected_rows = 0;
};

/// One connection to an embedded-engine database file. Confined to one
/// logical thread at a time; distinct connections to the same file may run
/// concurrently under engine locking.
///
/// Check-option constraints are enforced with temporary triggers scoped to
/// this connection. Every trigger installed by a guarded operation is
/// removed before the operation returns, on success and on error alike.
class Connection {
public:
    /// Open an existing database file (or `:memory:`); foreign keys on.
    static std::shared_ptr<Connection> open(const std::string& path);
    /// Open, creating the file when missing. For fixture construction.
    static std::shared_ptr<Connection> create(const std::string& path);

    ~Connection();
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;

    /// Execute a SELECT with bound parameters and materialize the result.
    RowSet query(const std::string& sql, std::span<const SqlValue> params = {});

    /// Execute a non-SELECT statement; returns the engine change count.
    std::int64_t execute(const std::string& sql, std::span<const SqlValue> params = {});

    /// Multi-row insert guarded by an optional check predicate over the new
    /// rows. One violating row aborts the whole statement.
    DmlOutcome guarded_insert(const std::string& table,
                              const std::vector<std::string>& columns,
                              const std::vector<Row>& rows,
                              const std::optional<CheckClause>& check);

    /// Update guarded by an optional check predicate over the post-update
    /// rows; statement-level abort semantics.
    DmlOutcome guarded_update(const std::string& table,
                              const std::vector<Assignment>& assignments,
                              const ExprPtr& where,
                              const std::optional<CheckClause>& check);

    /// Deletes install no triggers.
    DmlOutcome delete_rows(const std::string& table, const ExprPtr& where);

    /// Output columns of a table per the engine catalog; empty if the table
    /// does not exist.
    ViewSchema table_schema(const std::string& table);
    bool table_exists(const std::string& table);

    /// Number of statements this connection has executed. Test
    /// instrumentation for laziness properties.
    std::int64_t statement_count() const { return statement_count_; }

    /// Temporary triggers currently installed on this connection.
    std::int64_t temp_trigger_count();

    /// When disabled, guarded DML skips trigger installation entirely.
    /// Exists for the benchmark's no-trigger variants.
    void set_check_enforcement(bool enabled) { enforce_checks_ = enabled; }
    bool check_enforcement() const { return enforce_checks_; }

    /// Test seam: invoked between trigger installation and the guarded
    /// statement, while the trigger is live.
    void set_guard_hook(std::function<void()> hook) { guard_hook_ = std::move(hook); }

private:
    explicit Connection(sqlite3* db);

    std::int64_t run_dml(const std::string& op, const std::string& sql,
                         std::span<const SqlValue> params,
                         const std::optional<CheckClause>& check);

    sqlite3* db_ = nullptr;
    std::int64_t statement_count_ = 0;
    bool enforce_checks_ = true;
    std::function<void()> guard_hook_;

    friend class TriggerGuard;
};

} // namespace capql
