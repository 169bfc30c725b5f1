#include "capql/bench/micro.hpp"

#include <chrono>
#include <filesystem>

#include "capql/authority.hpp"
#include "capql/capql.hpp"

namespace capql::bench {

const char* to_string(MicroBench m) {
    switch (m) {
    case MicroBench::Where: return "where";
    case MicroBench::Delete: return "delete";
    case MicroBench::Update: return "update";
    case MicroBench::UpdateNoTrigger: return "update-nt";
    case MicroBench::Insert: return "insert";
    case MicroBench::InsertNoTrigger: return "insert-nt";
    }
    return "?";
}

std::optional<MicroBench> parse_micro(const std::string& s) {
    if (s == "where") return MicroBench::Where;
    if (s == "delete") return MicroBench::Delete;
    if (s == "update") return MicroBench::Update;
    if (s == "update-nt") return MicroBench::UpdateNoTrigger;
    if (s == "insert") return MicroBench::Insert;
    if (s == "insert-nt") return MicroBench::InsertNoTrigger;
    return std::nullopt;
}

namespace {

void build_template(const std::string& path, std::int64_t rows) {
    std::filesystem::remove(path);
    auto conn = Connection::create(path);
    conn->execute("CREATE TABLE bench (a INTEGER, b INTEGER)");
    conn->execute("BEGIN");
    std::string insert_sql = "INSERT INTO bench (a, b) VALUES ";
    const std::int64_t batch = 400;
    for (std::int64_t start = 0; start < rows; start += batch) {
        std::string sql = insert_sql;
        std::vector<SqlValue> params;
        std::int64_t end = std::min(rows, start + batch);
        for (std::int64_t i = start; i < end; ++i) {
            if (i != start) sql += ",";
            sql += "(?,?)";
            params.push_back(SqlValue{i});
            params.push_back(SqlValue{i * 2});
        }
        conn->execute(sql, params);
    }
    conn->execute("COMMIT");
}

std::vector<Row> ten_rows() {
    std::vector<Row> rows;
    for (std::int64_t i = 1; i <= 10; ++i) {
        rows.push_back(Row{SqlValue{i}, SqlValue{i}});
    }
    return rows;
}

/// One timed execution of the benchmark body against a fresh copy.
double run_once(MicroBench bench, bool capability_path, const std::string& db_path,
                std::int64_t threshold) {
    auto conn = Connection::open(db_path);
    if (bench == MicroBench::UpdateNoTrigger || bench == MicroBench::InsertNoTrigger) {
        conn->set_check_enforcement(false);
    }
    auto started = std::chrono::steady_clock::now();
    if (capability_path) {
        RootAuthority auth = RootAuthority::adopt("bench", conn);
        ViewPtr table = make_view(auth, "bench", "bench");
        switch (bench) {
        case MicroBench::Where:
            fetch(where(table, sqlformat("a < $1", {SqlValue{threshold}})));
            break;
        case MicroBench::Delete:
            erase(where(table, sqlformat("a < $1", {SqlValue{threshold}})));
            break;
        case MicroBench::Update:
        case MicroBench::UpdateNoTrigger:
            update(where(table, sqlformat("a < $1", {SqlValue{threshold}})), "b = b + 1");
            break;
        case MicroBench::Insert:
        case MicroBench::InsertNoTrigger:
            insert(where(table, "a >= 0"), {"a", "b"}, ten_rows());
            break;
        }
    } else {
        switch (bench) {
        case MicroBench::Where:
            conn->query("SELECT a, b FROM bench WHERE a < ?",
                        std::vector<SqlValue>{SqlValue{threshold}});
            break;
        case MicroBench::Delete:
            conn->execute("DELETE FROM bench WHERE a < ?",
                          std::vector<SqlValue>{SqlValue{threshold}});
            break;
        case MicroBench::Update:
        case MicroBench::UpdateNoTrigger:
            conn->execute("UPDATE bench SET b = b + 1 WHERE a < ?",
                          std::vector<SqlValue>{SqlValue{threshold}});
            break;
        case MicroBench::Insert:
        case MicroBench::InsertNoTrigger:
            conn->execute("INSERT INTO bench (a, b) VALUES"
                          " (1,1),(2,2),(3,3),(4,4),(5,5),(6,6),(7,7),(8,8),(9,9),(10,10)");
            break;
        }
    }
    auto finished = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(finished - started).count();
}

} // namespace

std::vector<BenchResult> run_micro(MicroBench bench, double selectivity_pct,
                                   std::int64_t rows, int reps,
                                   const std::string& scratch_dir) {
    std::filesystem::create_directories(scratch_dir);
    auto dir = std::filesystem::path(scratch_dir);
    std::string template_path = (dir / "micro_template.db").string();
    std::string working_path = (dir / "micro_working.db").string();
    build_template(template_path, rows);

    std::int64_t threshold =
        static_cast<std::int64_t>(static_cast<double>(rows) * selectivity_pct / 100.0);

    bool has_selectivity = bench == MicroBench::Where || bench == MicroBench::Delete ||
                           bench == MicroBench::Update || bench == MicroBench::UpdateNoTrigger;

    std::vector<BenchResult> out;
    for (bool capability_path : {false, true}) {
        std::vector<double> samples;
        samples.reserve(static_cast<std::size_t>(reps));
        for (int rep = 0; rep < reps; ++rep) {
            std::filesystem::copy_file(template_path, working_path,
                                       std::filesystem::copy_options::overwrite_existing);
            samples.push_back(run_once(bench, capability_path, working_path, threshold));
        }
        Stats stats = summarize(samples);
        out.push_back(BenchResult{
            capability_path ? (bench == MicroBench::UpdateNoTrigger ||
                                       bench == MicroBench::InsertNoTrigger
                                   ? "capql-nt"
                                   : "capql")
                            : "baseline",
            to_string(bench),
            has_selectivity ? std::optional<double>(selectivity_pct) : std::nullopt,
            stats.reps, stats.mean_ms, stats.ci95_ms});
    }
    std::filesystem::remove(template_path);
    std::filesystem::remove(working_path);
    return out;
}

} // namespace capql::bench
