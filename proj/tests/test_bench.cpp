#include <doctest.h>

#include <filesystem>
#include <cmath>
#include <sstream>

#include <capql/bench/micro.hpp>
#include <capql/bench/stats.hpp>
#include <capql/bench/workload.hpp>
#include <capql/capql.hpp>

using namespace capql;
using namespace capql::bench;

namespace {

std::string scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "capql_bench_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

} // namespace

TEST_CASE("summarize computes a t-based confidence interval") {
    Stats s = summarize({1.0, 2.0, 3.0});
    CHECK(s.reps == 3);
    CHECK(s.mean_ms == doctest::Approx(2.0));
    // sd = 1, t(0.975, df=2) = 4.303: half-width 4.303/sqrt(3)
    CHECK(s.ci95_ms == doctest::Approx(4.303 / std::sqrt(3.0)).epsilon(0.001));

    CHECK(summarize({}).reps == 0);
    CHECK(summarize({5.0}).ci95_ms == 0.0);
    CHECK(t_quantile_975(10) == doctest::Approx(2.228));
    CHECK(t_quantile_975(1000) == doctest::Approx(1.96));
}

TEST_CASE("request streams are pure functions of kind, count, and seed") {
    WorkloadSpec spec{WorkloadKind::ReadWrite, 100, 42};
    auto a = generate_requests(spec);
    auto b = generate_requests(spec);
    REQUIRE(a.size() == 100);
    bool identical = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        identical = identical && a[i].kind == b[i].kind && a[i].card == b[i].card &&
                    a[i].a == b[i].a && a[i].b == b[i].b;
    }
    CHECK(identical);

    spec.seed = 43;
    auto c = generate_requests(spec);
    bool different = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        different = different || a[i].kind != c[i].kind || a[i].a != c[i].a;
    }
    CHECK(different);
}

TEST_CASE("workload kinds generate the documented mixes") {
    auto count_kinds = [](const std::vector<Request>& reqs) {
        int lookups = 0, reserves = 0, removes = 0;
        for (const auto& r : reqs) {
            switch (r.kind) {
            case Request::Kind::Reserve: ++reserves; break;
            case Request::Kind::Remove: ++removes; break;
            default: ++lookups; break;
            }
        }
        return std::tuple{lookups, reserves, removes};
    };
    auto [lro, rro, dro] = count_kinds(generate_requests({WorkloadKind::ReadOnly, 200, 1}));
    CHECK(lro == 200);
    auto [lins, rins, dins] =
        count_kinds(generate_requests({WorkloadKind::InsertOnly, 200, 1}));
    CHECK(rins == 200);
    auto [lrw, rrw, drw] = count_kinds(generate_requests({WorkloadKind::ReadWrite, 1000, 1}));
    // 40/30/30 mix, within sampling noise
    CHECK(lrw > 300);
    CHECK(rrw > 200);
    CHECK(drw > 200);
}

TEST_CASE("all four variants leave identical database states") {
    WorkloadSpec spec{WorkloadKind::ReadWrite, 60, 7};
    auto baseline = final_reservations(spec, Variant::BaselineDirectSql, scratch_dir());
    auto capql_nt = final_reservations(spec, Variant::CapqlNoTriggers, scratch_dir());
    auto capql_t = final_reservations(spec, Variant::CapqlWithTriggers, scratch_dir());
    auto contracts = final_reservations(spec, Variant::FullContracts, scratch_dir());
    CHECK(baseline == capql_nt);
    CHECK(baseline == capql_t);
    CHECK(baseline == contracts);
    CHECK(!baseline.empty());
}

TEST_CASE("workload smoke run produces a valid result") {
    WorkloadSpec spec{WorkloadKind::ReadWrite, 5, 3};
    BenchResult r = run_workload(spec, Variant::FullContracts, 2, scratch_dir());
    CHECK(r.reps == 2);
    CHECK(r.mean_ms > 0.0);
    CHECK(r.bench == "workload-rw");
    CHECK(r.variant == "contracts");
}

TEST_CASE("micro benchmarks time baseline and capability paths") {
    auto results = run_micro(MicroBench::Where, 50.0, 400, 2, scratch_dir());
    REQUIRE(results.size() == 2);
    CHECK(results[0].variant == "baseline");
    CHECK(results[1].variant == "capql");
    CHECK(results[0].selectivity == 50.0);
    CHECK(results[0].mean_ms >= 0.0);

    auto inserts = run_micro(MicroBench::InsertNoTrigger, 0.0, 100, 2, scratch_dir());
    CHECK(inserts[1].variant == "capql-nt");
    CHECK(!inserts[0].selectivity.has_value());
}

TEST_CASE("micro delete/update actually modify the working copy only") {
    // Two consecutive repetitions must observe identical starting states:
    // if state leaked between reps, timings would drift systematically.
    auto first = run_micro(MicroBench::Delete, 100.0, 300, 3, scratch_dir());
    CHECK(first[1].mean_ms > 0.0);
}

TEST_CASE("report emits stable CSV") {
    std::vector<BenchResult> results = {
        {"capql", "where", 50.0, 3, 1.5, 0.2},
        {"baseline", "where", 50.0, 3, 1.0, 0.1},
        {"baseline", "delete", std::nullopt, 3, 2.0, 0.3},
    };
    std::string csv = report(results);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "variant,bench,selectivity,reps,mean_ms,ci95_ms");
    std::getline(in, line);
    CHECK(line == "baseline,delete,,3,2,0.3"); // sorted: variant then bench
    std::getline(in, line);
    CHECK(line.rfind("baseline,where,50", 0) == 0);
}

TEST_CASE("expression validation can be toggled for diagnostics") {
    struct Restore {
        ~Restore() { set_expression_validation(true); }
    } restore;

    auto conn = Connection::open(":memory:");
    conn->execute("CREATE TABLE t (a INTEGER)");
    auto auth = RootAuthority::adopt("db", conn);
    ViewPtr v = make_view(auth, "db", "t");

    set_expression_validation(false);
    // Name resolution is skipped; the engine still rejects at fetch time.
    ViewPtr bad = where(v, "nonexistent = 1");
    CHECK_THROWS_AS(fetch(bad), EngineError);

    set_expression_validation(true);
    CHECK_THROWS_AS(where(v, "nonexistent = 1"), UnknownColumn);
}
