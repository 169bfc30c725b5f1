#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capql/bench/workload.hpp"

namespace capql::bench {

/// Single-operation benchmarks over one two-integer-column table: selection
/// and fetch, subset delete, arithmetic update on a restricted view (with
/// and without check triggers), and a ten-row insert through a restricted
/// view (with and without triggers).
enum class MicroBench { Where, Delete, Update, UpdateNoTrigger, Insert, InsertNoTrigger };

const char* to_string(MicroBench m);
std::optional<MicroBench> parse_micro(const std::string& s);

/// Run one microbenchmark at the given selectivity (ignored by the insert
/// benchmarks) and row count; returns one result for the direct-SQL
/// baseline and one for the capability implementation. Table setup is
/// excluded from timing; every repetition starts from a fresh copy.
std::vector<BenchResult> run_micro(MicroBench bench, double selectivity_pct,
                                   std::int64_t rows, int reps,
                                   const std::string& scratch_dir);

} // namespace capql::bench
