#include "capql/bench/stats.hpp"

#include <cmath>

namespace capql::bench {

double t_quantile_975(int df) {
    static const double table[] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    };
    if (df <= 0) return 0.0;
    if (df <= 30) return table[df - 1];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

Stats summarize(const std::vector<double>& samples_ms) {
    Stats s;
    s.reps = static_cast<int>(samples_ms.size());
    if (samples_ms.empty()) return s;
    double sum = 0.0;
    for (double x : samples_ms) sum += x;
    s.mean_ms = sum / static_cast<double>(s.reps);
    if (s.reps < 2) return s;
    double ss = 0.0;
    for (double x : samples_ms) {
        double d = x - s.mean_ms;
        ss += d * d;
    }
    double stddev = std::sqrt(ss / static_cast<double>(s.reps - 1));
    s.ci95_ms = t_quantile_975(s.reps - 1) * stddev / std::sqrt(static_cast<double>(s.reps));
    return s;
}

} // namespace capql::bench
