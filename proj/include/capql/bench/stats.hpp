#pragma once

#include <vector>

namespace capql::bench {

struct Stats {
    int reps = 0;
    double mean_ms = 0.0;
    double ci95_ms = 0.0; // half-width of the 95% confidence interval
};

/// Mean and t-distribution confidence interval over per-repetition wall
/// times.
Stats summarize(const std::vector<double>& samples_ms);

/// Two-sided 97.5% quantile of Student's t for the given degrees of
/// freedom.
double t_quantile_975(int df);

} // namespace capql::bench
