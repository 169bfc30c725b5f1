#include "capql/bench/workload.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <random>
#include <sstream>

#include "capql/authority.hpp"
#include "capql/capql.hpp"
#include "capql/service/baseline.hpp"
#include "capql/service/endpoints.hpp"
#include "capql/service/fixture.hpp"

namespace capql::bench {

const char* to_string(Variant v) {
    switch (v) {
    case Variant::BaselineDirectSql: return "baseline";
    case Variant::CapqlNoTriggers: return "capql-nt";
    case Variant::CapqlWithTriggers: return "capql";
    case Variant::FullContracts: return "contracts";
    }
    return "?";
}

const char* to_string(WorkloadKind k) {
    switch (k) {
    case WorkloadKind::ReadWrite: return "rw";
    case WorkloadKind::ReadOnly: return "ro";
    case WorkloadKind::InsertOnly: return "ins";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& s) {
    if (s == "baseline") return Variant::BaselineDirectSql;
    if (s == "capql-nt") return Variant::CapqlNoTriggers;
    if (s == "capql") return Variant::CapqlWithTriggers;
    if (s == "contracts") return Variant::FullContracts;
    return std::nullopt;
}

std::optional<WorkloadKind> parse_workload_kind(const std::string& s) {
    if (s == "rw") return WorkloadKind::ReadWrite;
    if (s == "ro") return WorkloadKind::ReadOnly;
    if (s == "ins") return WorkloadKind::InsertOnly;
    return std::nullopt;
}

std::vector<Request> generate_requests(const WorkloadSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<Request> out;
    out.reserve(static_cast<std::size_t>(spec.request_count));
    int reserves_emitted = 0;

    auto lookup = [&](Request& r) {
        switch (rng() % 3) {
        case 0:
            r.kind = Request::Kind::MyReservations;
            break;
        case 1:
            r.kind = Request::Kind::Search;
            if (rng() % 4 == 0) {
                r.a = "Unknown";
                r.b = "Author";
            } else if (rng() % 2 == 0) {
                r.a = "Trevor";
                r.b = "Noah";
            } else {
                r.a = "Tina";
                r.b = "Fey";
            }
            break;
        default:
            r.kind = Request::Kind::NumReservations;
            r.a = rng() % 2 ? "1" : "2";
            break;
        }
    };

    for (int i = 0; i < spec.request_count; ++i) {
        Request r;
        r.card = static_cast<std::int64_t>(1 + rng() % 2);
        switch (spec.kind) {
        case WorkloadKind::ReadOnly:
            lookup(r);
            break;
        case WorkloadKind::InsertOnly:
            r.kind = Request::Kind::Reserve;
            r.a = rng() % 2 ? "1" : "2";
            ++reserves_emitted;
            break;
        case WorkloadKind::ReadWrite: {
            std::uint64_t dice = rng() % 10;
            if (dice < 4) {
                lookup(r);
            } else if (dice < 7) {
                r.kind = Request::Kind::Reserve;
                r.a = rng() % 2 ? "1" : "2";
                ++reserves_emitted;
            } else {
                r.kind = Request::Kind::Remove;
                r.a = std::to_string(1 + rng() % (2 + reserves_emitted));
            }
            break;
        }
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

/// The capability-pipeline endpoint bodies without contracts: the user
/// filter that contracts would impose is written out explicitly so all
/// variants stay observationally identical.
struct CapqlEndpoints {
    static void execute(const Request& r, const std::shared_ptr<Connection>& conn) {
        RootAuthority auth = RootAuthority::adopt("library", conn);
        std::string card = std::to_string(r.card);
        switch (r.kind) {
        case Request::Kind::Reserve: {
            ViewPtr mine = where(make_view(auth, "library", "reservations"),
                                 sqlformat("cardholder_id = $1", {SqlValue{card}}));
            insert(mine, {"book", "cardholder_id"}, {{SqlValue{r.a}, SqlValue{card}}});
            break;
        }
        case Request::Kind::MyReservations: {
            ViewPtr mine = where(make_view(auth, "library", "reservations"),
                                 sqlformat("cardholder_id = $1", {SqlValue{card}}));
            ViewPtr details =
                select(join(join(mine, make_view(auth, "library", "books"), "book = book_id"),
                            make_view(auth, "library", "authors"), "author = author_id"),
                       "r_id, title, firstname, lastname");
            fetch(details);
            break;
        }
        case Request::Kind::Remove: {
            ViewPtr mine = where(make_view(auth, "library", "reservations"),
                                 sqlformat("cardholder_id = $1", {SqlValue{card}}));
            erase(where(mine, sqlformat("r_id = $1", {SqlValue{r.a}})));
            break;
        }
        case Request::Kind::Search: {
            ViewPtr matched =
                where(make_view(auth, "library", "authors"),
                      sqlformat("firstname = $1 AND lastname = $2",
                                {SqlValue{r.a}, SqlValue{r.b}}));
            fetch(select(join(matched, make_view(auth, "library", "books"),
                              "author_id = author"),
                         "title"));
            break;
        }
        case Request::Kind::NumReservations: {
            fetch(aggregate(where(make_view(auth, "library", "reservations"),
                                  sqlformat("book = $1", {SqlValue{r.a}})),
                            "COUNT(*)"));
            break;
        }
        }
    }
};

void execute_contracted(const Request& r, const std::shared_ptr<Connection>& conn) {
    RootAuthority auth = RootAuthority::adopt("library", conn);
    const auto& e = library::endpoints();
    with_user(std::to_string(r.card), [&] {
        switch (r.kind) {
        case Request::Kind::Reserve:
            e.reserve({Value{r.a}, Value{make_view(auth, "library", "reservations")}});
            break;
        case Request::Kind::MyReservations:
            e.my_reservations({Value{make_view(auth, "library", "reservations")},
                               Value{make_view(auth, "library", "books")},
                               Value{make_view(auth, "library", "authors")}});
            break;
        case Request::Kind::Remove:
            e.remove_reservation({Value{r.a},
                                  Value{make_view(auth, "library", "reservations")}});
            break;
        case Request::Kind::Search:
            e.search_author({Value{r.a}, Value{r.b},
                             Value{make_view(auth, "library", "authors")},
                             Value{make_view(auth, "library", "books")}});
            break;
        case Request::Kind::NumReservations:
            e.num_reservations({Value{r.a},
                                Value{make_view(auth, "library", "reservations")}});
            break;
        }
    });
}

void execute_baseline(const Request& r, Connection& conn) {
    switch (r.kind) {
    case Request::Kind::Reserve:
        library::BaselineEndpoints::reserve(conn, r.card, r.a);
        break;
    case Request::Kind::MyReservations:
        library::BaselineEndpoints::my_reservations(conn, r.card);
        break;
    case Request::Kind::Remove:
        library::BaselineEndpoints::remove_reservation(conn, r.card, r.a);
        break;
    case Request::Kind::Search:
        library::BaselineEndpoints::search_author(conn, r.a, r.b);
        break;
    case Request::Kind::NumReservations:
        library::BaselineEndpoints::num_reservations(conn, r.a);
        break;
    }
}

void run_requests(const std::vector<Request>& requests, Variant variant,
                  const std::string& db_path) {
    // One connection per request, mirroring the service's isolation model;
    // every variant pays the same connection cost.
    for (const auto& r : requests) {
        auto conn = Connection::open(db_path);
        switch (variant) {
        case Variant::BaselineDirectSql:
            execute_baseline(r, *conn);
            break;
        case Variant::CapqlNoTriggers:
            conn->set_check_enforcement(false);
            CapqlEndpoints::execute(r, conn);
            break;
        case Variant::CapqlWithTriggers:
            CapqlEndpoints::execute(r, conn);
            break;
        case Variant::FullContracts:
            execute_contracted(r, conn);
            break;
        }
    }
}

std::string fresh_db_path(const std::string& scratch_dir, const std::string& tag) {
    std::filesystem::create_directories(scratch_dir);
    static std::atomic<std::uint64_t> counter{0};
    return (std::filesystem::path(scratch_dir) /
            ("bench_" + tag + "_" + std::to_string(counter.fetch_add(1)) + ".db"))
        .string();
}

} // namespace

BenchResult run_workload(const WorkloadSpec& spec, Variant variant, int reps,
                         const std::string& scratch_dir) {
    std::vector<Request> requests = generate_requests(spec);
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(reps));
    for (int rep = 0; rep < reps; ++rep) {
        std::string db_path = fresh_db_path(scratch_dir, to_string(variant));
        library::create_fixture_db(db_path);
        auto t0 = std::chrono::steady_clock::now();
        run_requests(requests, variant, db_path);
        auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        std::filesystem::remove(db_path);
    }
    Stats stats = summarize(samples);
    return BenchResult{to_string(variant), std::string("workload-") + to_string(spec.kind),
                       std::nullopt, stats.reps, stats.mean_ms, stats.ci95_ms};
}

std::vector<Row> final_reservations(const WorkloadSpec& spec, Variant variant,
                                    const std::string& scratch_dir) {
    std::vector<Request> requests = generate_requests(spec);
    std::string db_path = fresh_db_path(scratch_dir, "state");
    library::create_fixture_db(db_path);
    run_requests(requests, variant, db_path);
    auto conn = Connection::open(db_path);
    RowSet rows =
        conn->query("SELECT r_id, book, cardholder_id FROM reservations ORDER BY r_id");
    std::filesystem::remove(db_path);
    return rows.rows;
}

std::string report(std::vector<BenchResult> results) {
    std::sort(results.begin(), results.end(), [](const BenchResult& a, const BenchResult& b) {
        if (a.variant != b.variant) return a.variant < b.variant;
        if (a.bench != b.bench) return a.bench < b.bench;
        return a.selectivity.value_or(-1) < b.selectivity.value_or(-1);
    });
    std::ostringstream out;
    out << "variant,bench,selectivity,reps,mean_ms,ci95_ms\n";
    for (const auto& r : results) {
        out << r.variant << ',' << r.bench << ',';
        if (r.selectivity) out << *r.selectivity;
        out << ',' << r.reps << ',' << r.mean_ms << ',' << r.ci95_ms << '\n';
    }
    return out.str();
}

} // namespace capql::bench
