#include "capql/backend.hpp"

#include <sqlite3.h>

#include <random>

#include "capql/error.hpp"
#include "sql_writer.hpp"

namespace capql {

namespace {

constexpr const char* kCheckMarker = "capql_check";

std::string random_suffix() {
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    static const char* hex = "0123456789abcdef";
    std::uint64_t bits = rng();
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
        out[static_cast<std::size_t>(i)] = hex[(bits >> (i * 4)) & 0xf];
    }
    return out;
}

class Statement {
public:
    Statement(sqlite3* db, const std::string& sql) : sql_(sql) {
        if (sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr) != SQLITE_OK) {
            std::string msg = sqlite3_errmsg(db);
            throw EngineError(msg, sql);
        }
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    void bind(std::span<const SqlValue> params) {
        int index = 1;
        for (const auto& value : params) {
            switch (value.index()) {
            case 0: sqlite3_bind_null(stmt_, index); break;
            case 1: sqlite3_bind_int64(stmt_, index, std::get<std::int64_t>(value)); break;
            case 2: sqlite3_bind_double(stmt_, index, std::get<double>(value)); break;
            default: {
                const auto& text = std::get<std::string>(value);
                sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()),
                                  SQLITE_TRANSIENT);
                break;
            }
            }
            ++index;
        }
    }

    sqlite3_stmt* get() { return stmt_; }
    const std::string& sql() const { return sql_; }

private:
    std::string sql_;
    sqlite3_stmt* stmt_ = nullptr;
};

SqlValue column_value(sqlite3_stmt* stmt, int col) {
    switch (sqlite3_column_type(stmt, col)) {
    case SQLITE_NULL: return sql_null();
    case SQLITE_INTEGER: return SqlValue{sqlite3_column_int64(stmt, col)};
    case SQLITE_FLOAT: return SqlValue{sqlite3_column_double(stmt, col)};
    default: {
        const unsigned char* text = sqlite3_column_text(stmt, col);
        int len = sqlite3_column_bytes(stmt, col);
        return SqlValue{std::string(reinterpret_cast<const char*>(text),
                                    static_cast<std::size_t>(len))};
    }
    }
}

} // namespace

/// Installs a check trigger plus its parameter table; removes both on scope
/// exit no matter how the guarded statement ends.
class TriggerGuard {
public:
    TriggerGuard(Connection& conn, const std::string& table, const std::string& timing,
                 const CheckClause& check, const ViewSchema& table_schema)
        : conn_(conn) {
        std::string suffix = random_suffix();
        trigger_name_ = std::string(kCheckMarker) + "_" + suffix;
        param_table_ = trigger_name_ + "_p";

        auto rendered = detail::render_trigger_check(check.expr, param_table_, table_schema);

        // The vn/vt columns carry numeric and text affinity so stored
        // literals undergo the same lossless coercion a comparison against
        // the corresponding table column would apply.
        conn_.execute("CREATE TEMP TABLE " + detail::quote_ident(param_table_) +
                      " (k INTEGER PRIMARY KEY, v, vn NUMERIC, vt TEXT)");
        installed_table_ = true;
        for (std::size_t i = 0; i < rendered.params.size(); ++i) {
            const char* column = "v";
            switch (rendered.affinities[i]) {
            case detail::ParamAffinity::Numeric: column = "vn"; break;
            case detail::ParamAffinity::Text: column = "vt"; break;
            default: break;
            }
            const SqlValue row[] = {SqlValue{static_cast<std::int64_t>(i + 1)},
                                    rendered.params[i]};
            conn_.execute("INSERT INTO temp." + detail::quote_ident(param_table_) + " (k, " +
                              column + ") VALUES (?, ?)",
                          row);
        }
        conn_.execute("CREATE TEMP TRIGGER " + detail::quote_ident(trigger_name_) + " " +
                      timing + " ON " + detail::quote_ident(table) +
                      " FOR EACH ROW WHEN NOT (" + rendered.when_clause +
                      ") BEGIN SELECT RAISE(ABORT, '" + std::string(kCheckMarker) +
                      "'); END");
        installed_trigger_ = true;
    }

    ~TriggerGuard() {
        try {
            if (installed_trigger_) {
                conn_.execute("DROP TRIGGER IF EXISTS temp." +
                              detail::quote_ident(trigger_name_));
            }
            if (installed_table_) {
                conn_.execute("DROP TABLE IF EXISTS temp." + detail::quote_ident(param_table_));
            }
        } catch (...) {
            // Dropping temp objects cannot reasonably fail; never throw from
            // a destructor.
        }
    }

    TriggerGuard(const TriggerGuard&) = delete;
    TriggerGuard& operator=(const TriggerGuard&) = delete;

private:
    Connection& conn_;
    std::string trigger_name_;
    std::string param_table_;
    bool installed_table_ = false;
    bool installed_trigger_ = false;
};

Connection::Connection(sqlite3* db) : db_(db) {
    // Double-quoted strings are a misfeature: with them enabled, a quoted
    // identifier that fails to resolve silently becomes a text literal.
    sqlite3_db_config(db_, SQLITE_DBCONFIG_DQS_DML, 0, nullptr);
    sqlite3_db_config(db_, SQLITE_DBCONFIG_DQS_DDL, 0, nullptr);
}

std::shared_ptr<Connection> Connection::open(const std::string& path) {
    int flags = SQLITE_OPEN_READWRITE;
    if (path == ":memory:") {
        flags |= SQLITE_OPEN_CREATE;
    }
    sqlite3* db = nullptr;
    if (sqlite3_open_v2(path.c_str(), &db, flags, nullptr) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "cannot open database";
        sqlite3_close(db);
        throw IoError("cannot open database '" + path + "': " + msg);
    }
    auto conn = std::shared_ptr<Connection>(new Connection(db));
    try {
        // Force a header read so a non-database file fails here, not later.
        conn->query("PRAGMA schema_version");
    } catch (const EngineError& e) {
        throw NotADatabase("'" + path + "' is not a database file: " + e.what());
    }
    conn->execute("PRAGMA foreign_keys = ON");
    return conn;
}

std::shared_ptr<Connection> Connection::create(const std::string& path) {
    sqlite3* db = nullptr;
    if (sqlite3_open_v2(path.c_str(), &db, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE,
                        nullptr) != SQLITE_OK) {
        std::string msg = db ? sqlite3_errmsg(db) : "cannot open database";
        sqlite3_close(db);
        throw IoError("cannot create database '" + path + "': " + msg);
    }
    auto conn = std::shared_ptr<Connection>(new Connection(db));
    conn->execute("PRAGMA foreign_keys = ON");
    return conn;
}

Connection::~Connection() {
    sqlite3_close(db_);
}

RowSet Connection::query(const std::string& sql, std::span<const SqlValue> params) {
    Statement stmt(db_, sql);
    stmt.bind(params);
    ++statement_count_;

    RowSet result;
    int column_count = sqlite3_column_count(stmt.get());
    for (int i = 0; i < column_count; ++i) {
        const char* name = sqlite3_column_name(stmt.get(), i);
        result.columns.push_back(name ? name : "");
    }
    while (true) {
        int rc = sqlite3_step(stmt.get());
        if (rc == SQLITE_ROW) {
            Row row;
            row.reserve(static_cast<std::size_t>(column_count));
            for (int i = 0; i < column_count; ++i) {
                row.push_back(column_value(stmt.get(), i));
            }
            result.rows.push_back(std::move(row));
        } else if (rc == SQLITE_DONE) {
            break;
        } else {
            throw EngineError(sqlite3_errmsg(db_), sql);
        }
    }
    return result;
}

std::int64_t Connection::execute(const std::string& sql, std::span<const SqlValue> params) {
    Statement stmt(db_, sql);
    stmt.bind(params);
    ++statement_count_;
    int rc = sqlite3_step(stmt.get());
    if (rc != SQLITE_DONE && rc != SQLITE_ROW) {
        throw EngineError(sqlite3_errmsg(db_), sql);
    }
    return sqlite3_changes64(db_);
}

std::int64_t Connection::run_dml(const std::string& op, const std::string& sql,
                                 std::span<const SqlValue> params,
                                 const std::optional<CheckClause>& check) {
    try {
        if (guard_hook_ && check) {
            guard_hook_();
        }
        return execute(sql, params);
    } catch (const EngineError& e) {
        if (check && std::string(e.what()).find(kCheckMarker) != std::string::npos) {
            throw ViewConstraintViolation(op, check->text);
        }
        throw;
    }
}

DmlOutcome Connection::guarded_insert(const std::string& table,
                                      const std::vector<std::string>& columns,
                                      const std::vector<Row>& rows,
                                      const std::optional<CheckClause>& check) {
    if (rows.empty()) {
        return DmlOutcome{0};
    }
    for (const auto& row : rows) {
        if (row.size() != columns.size()) {
            throw Error("insert row arity does not match the column list");
        }
    }

    detail::SqlWriter w;
    w.write("INSERT INTO ");
    w.write_ident(table);
    w.write(" (");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) w.write(", ");
        w.write_ident(columns[i]);
    }
    w.write(") VALUES ");
    std::vector<SqlValue> params;
    params.reserve(rows.size() * columns.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) w.write(", ");
        w.write("(");
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) w.write(", ");
            w.write("?");
            params.push_back(rows[r][c]);
        }
        w.write(")");
    }
    std::string sql = w.take_sql();

    if (check && enforce_checks_) {
        TriggerGuard guard(*this, table, "BEFORE INSERT", *check, table_schema(table));
        return DmlOutcome{run_dml("insert", sql, params, check)};
    }
    return DmlOutcome{run_dml("insert", sql, params, std::nullopt)};
}

DmlOutcome Connection::guarded_update(const std::string& table,
                                      const std::vector<Assignment>& assignments,
                                      const ExprPtr& where,
                                      const std::optional<CheckClause>& check) {
    if (assignments.empty()) {
        return DmlOutcome{0};
    }
    detail::SqlWriter w;
    w.write("UPDATE ");
    w.write_ident(table);
    w.write(" SET ");
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (i) w.write(", ");
        w.write_ident(assignments[i].column);
        w.write(" = ");
        w.write_expr(assignments[i].value);
    }
    if (where) {
        w.write(" WHERE ");
        w.write_expr(where);
    }
    std::string sql = w.take_sql();
    std::vector<SqlValue> params = w.take_params();

    // The check reads NEW after the row is updated, so engine-computed
    // values are visible; RAISE(ABORT) then rolls back the whole statement.
    if (check && enforce_checks_) {
        TriggerGuard guard(*this, table, "AFTER UPDATE", *check, table_schema(table));
        return DmlOutcome{run_dml("update", sql, params, check)};
    }
    return DmlOutcome{run_dml("update", sql, params, std::nullopt)};
}

DmlOutcome Connection::delete_rows(const std::string& table, const ExprPtr& where) {
    detail::SqlWriter w;
    w.write("DELETE FROM ");
    w.write_ident(table);
    if (where) {
        w.write(" WHERE ");
        w.write_expr(where);
    }
    std::string sql = w.take_sql();
    std::vector<SqlValue> params = w.take_params();
    return DmlOutcome{execute(sql, params)};
}

ViewSchema Connection::table_schema(const std::string& table) {
    RowSet info = query("PRAGMA table_info(" + detail::quote_ident(table) + ")");
    // PRAGMA table_info columns: cid, name, type, notnull, dflt_value, pk
    ViewSchema schema;
    for (const auto& row : info.rows) {
        ColumnInfo col;
        col.name = std::get<std::string>(row[1]);
        col.declared_type =
            std::holds_alternative<std::string>(row[2]) ? std::get<std::string>(row[2]) : "";
        col.nullable = std::get<std::int64_t>(row[3]) == 0;
        col.is_simple = true;
        col.origin = ColumnOrigin{table, col.name};
        schema.columns.push_back(std::move(col));
    }
    return schema;
}

bool Connection::table_exists(const std::string& table) {
    return !table_schema(table).columns.empty();
}

std::int64_t Connection::temp_trigger_count() {
    RowSet rs = query("SELECT count(*) FROM sqlite_temp_master WHERE type = 'trigger'");
    return rs.rows.empty() ? 0 : std::get<std::int64_t>(rs.rows[0][0]);
}

} // namespace capql
