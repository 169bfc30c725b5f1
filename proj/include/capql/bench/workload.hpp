#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capql/bench/stats.hpp"
#include "capql/value.hpp"

namespace capql::bench {

/// The four endpoint implementations under comparison: raw SQL with the
/// policy hard-coded, the capability pipeline without and with check
/// triggers, and the contract-enforced service.
enum class Variant { BaselineDirectSql, CapqlNoTriggers, CapqlWithTriggers, FullContracts };

enum class WorkloadKind { ReadWrite, ReadOnly, InsertOnly };

const char* to_string(Variant v);
const char* to_string(WorkloadKind k);
std::optional<Variant> parse_variant(const std::string& s);
std::optional<WorkloadKind> parse_workload_kind(const std::string& s);

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::ReadWrite;
    int request_count = 300;
    std::uint64_t seed = 1;
};

struct Request {
    enum class Kind { Reserve, MyReservations, Remove, Search, NumReservations };
    Kind kind = Kind::MyReservations;
    std::int64_t card = 1; // acting user
    std::string a;         // book id / reservation id / author first name
    std::string b;         // author last name
};

/// The request stream is a pure function of (kind, count, seed). The
/// read & write mix is 40% lookups, 30% reservations, 30% removals.
std::vector<Request> generate_requests(const WorkloadSpec& spec);

struct BenchResult {
    std::string variant;
    std::string bench;
    std::optional<double> selectivity; // percent, micro sweeps only
    int reps = 0;
    double mean_ms = 0.0;
    double ci95_ms = 0.0;
};

/// Time the request stream against one implementation variant. Every
/// repetition runs on a freshly seeded database file under scratch_dir;
/// fixture setup is excluded from timing.
BenchResult run_workload(const WorkloadSpec& spec, Variant variant, int reps,
                         const std::string& scratch_dir);

/// Execute one repetition and return the final reservations table. Used to
/// check that all variants leave identical end states.
std::vector<Row> final_reservations(const WorkloadSpec& spec, Variant variant,
                                    const std::string& scratch_dir);

/// CSV with header `variant,bench,selectivity,reps,mean_ms,ci95_ms`,
/// ordered by (variant, bench, selectivity).
std::string report(std::vector<BenchResult> results);

} // namespace capql::bench
