#pragma once

#include <random>
#include <string>
#include <vector>

#include <capql/backend.hpp>
#include <capql/query.hpp>

#include "support/evaluator.hpp"

namespace testsupport {

/// Column types for generated tables, parallel to Table::columns.
struct TypedTable {
    Table data;
    std::vector<std::string> types; // "INTEGER" or "TEXT"
};

using TypedDatabase = std::map<std::string, TypedTable, capql::CiLess>;

/// Two small tables with integer and text columns, values drawn small with
/// occasional NULLs.
TypedDatabase random_database(std::mt19937_64& rng, int rows_per_table);

Database plain_database(const TypedDatabase& db);

/// Create and populate the generated tables on a connection.
void install_database(capql::Connection& conn, const TypedDatabase& db);

/// Base query node over a generated table.
capql::QueryPtr base_query(const TypedDatabase& db, const std::string& table);

/// Random query tree of bounded depth over the generated tables. Only
/// engine-deterministic constructs are produced (predicates reference
/// unambiguous columns, aggregates group explicitly).
capql::QueryPtr random_ast(std::mt19937_64& rng, const TypedDatabase& db, int max_depth);

/// Random predicate over the unambiguous columns of a schema; falls back to
/// a literal tautology when no column is usable.
capql::ExprPtr random_predicate_over(std::mt19937_64& rng, const capql::ViewSchema& schema,
                                     int depth = 2);

} // namespace testsupport
