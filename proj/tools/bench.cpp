#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "capql/bench/micro.hpp"
#include "capql/bench/workload.hpp"
#include "capql/query.hpp"

using namespace capql::bench;

namespace {

void write_output(const std::string& csv, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(out_path);
    out << csv;
    std::cout << "wrote " << out_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for the capability database layer"};
    app.require_subcommand(1);

    std::string scratch =
        (std::filesystem::temp_directory_path() / "capql_bench").string();
    bool no_validate = false;
    app.add_option("--scratch", scratch, "directory for scratch database files");
    app.add_flag("--no-validate", no_validate,
                 "skip expression validation in view derivations (diagnostic)");

    // workload subcommand
    auto* workload = app.add_subcommand("workload", "time the reservation request streams");
    std::string kind_str = "rw";
    std::string variant_str;
    int count = 300;
    int reps = 10;
    std::uint64_t seed = 1;
    std::string out_path;
    workload->add_option("--kind", kind_str, "rw | ro | ins")->capture_default_str();
    workload->add_option("--variant", variant_str,
                         "baseline | capql-nt | capql | contracts (default: all)");
    workload->add_option("--count", count, "requests per repetition")->capture_default_str();
    workload->add_option("--reps", reps, "repetitions")->capture_default_str();
    workload->add_option("--seed", seed, "request stream seed")->capture_default_str();
    workload->add_option("--out", out_path, "CSV output file (default: stdout)");

    // micro subcommand
    auto* micro = app.add_subcommand("micro", "time individual view operations");
    std::string bench_str = "where";
    std::int64_t rows = 50000;
    std::vector<double> selectivities;
    int micro_reps = 10;
    std::string micro_out;
    micro->add_option("--bench", bench_str,
                      "where | delete | update | update-nt | insert | insert-nt")
        ->capture_default_str();
    micro->add_option("--rows", rows, "table size")->capture_default_str();
    micro->add_option("--selectivity", selectivities,
                      "selectivity percentages (repeatable; default 0 25 50 75 100)");
    micro->add_option("--reps", micro_reps, "repetitions")->capture_default_str();
    micro->add_option("--out", micro_out, "CSV output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    capql::set_expression_validation(!no_validate);

    if (*workload) {
        auto kind = parse_workload_kind(kind_str);
        if (!kind) {
            std::cerr << "unknown workload kind: " << kind_str << "\n";
            return 2;
        }
        std::vector<Variant> variants;
        if (variant_str.empty()) {
            variants = {Variant::BaselineDirectSql, Variant::CapqlNoTriggers,
                        Variant::CapqlWithTriggers, Variant::FullContracts};
        } else if (auto v = parse_variant(variant_str)) {
            variants = {*v};
        } else {
            std::cerr << "unknown variant: " << variant_str << "\n";
            return 2;
        }
        WorkloadSpec spec{*kind, count, seed};
        std::vector<BenchResult> results;
        for (Variant v : variants) {
            results.push_back(run_workload(spec, v, reps, scratch));
            std::cerr << to_string(v) << ": " << results.back().mean_ms << " ms (+/- "
                      << results.back().ci95_ms << ")\n";
        }
        write_output(report(std::move(results)), out_path);
        return 0;
    }

    auto bench = parse_micro(bench_str);
    if (!bench) {
        std::cerr << "unknown micro benchmark: " << bench_str << "\n";
        return 2;
    }
    if (selectivities.empty()) {
        selectivities = {0, 25, 50, 75, 100};
    }
    if (*bench == MicroBench::Insert || *bench == MicroBench::InsertNoTrigger) {
        selectivities = {0}; // inserts have no notion of selectivity
    }
    std::vector<BenchResult> results;
    for (double s : selectivities) {
        auto pair = run_micro(*bench, s, rows, micro_reps, scratch);
        for (auto& r : pair) {
            std::cerr << r.variant << "/" << r.bench;
            if (r.selectivity) std::cerr << "@" << *r.selectivity << "%";
            std::cerr << ": " << r.mean_ms << " ms (+/- " << r.ci95_ms << ")\n";
            results.push_back(std::move(r));
        }
    }
    write_output(report(std::move(results)), micro_out);
    return 0;
}
