#include "vdo/sru.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vdo {

LagSpec sru_lag_spec() { return LagSpec{kSruSignals, kSruLags}; }

Table generate_sru_like_series(const SruSeriesSpec& spec) {
    std::mt19937_64 gen(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    const std::size_t n = spec.n_rows;
    Table t;
    t.columns = kSruColumns;
    t.values.assign(7, std::vector<double>(n));

    // mean-reverting walks per signal: level, reversion, step noise
    const double base[5] = {0.62, 0.77, 0.25, 0.40, 0.51};
    const double sigma[5] = {0.006, 0.006, 0.020, 0.010, 0.005};
    const double theta = 0.02;
    double v[5];
    for (int s = 0; s < 5; ++s) v[s] = base[s];

    auto clamp01 = [](double x) { return std::min(std::max(x, 0.0), 1.0); };

    for (std::size_t k = 0; k < n; ++k) {
        for (int s = 0; s < 5; ++s) {
            v[s] += theta * (base[s] - v[s]) + sigma[s] * noise(gen);
            v[s] = clamp01(v[s]);
            t.values[static_cast<std::size_t>(s)][k] = v[s];
        }
        const double x1 = t.values[0][k], x2 = t.values[1][k], x3 = t.values[2][k];
        const double x4 = t.values[3][k], x5 = t.values[4][k];
        const double x3_l5 = t.values[2][k >= 5 ? k - 5 : 0];
        const double x3_l7 = t.values[2][k >= 7 ? k - 7 : 0];

        const double y1 = 0.40 - 0.50 * x3 + 0.25 * x1 - 0.08 * x4 +
                          0.05 * std::tanh(4.0 * (x2 - 0.77)) + 0.03 * (x3_l5 - 0.2) +
                          0.003 * noise(gen);
        const double y2 = 0.05 + 0.50 * x3 + 0.06 * x5 - 0.03 * x2 +
                          0.02 * (x3_l7 - 0.2) + 0.003 * noise(gen);
        t.values[5][k] = clamp01(y1);
        t.values[6][k] = clamp01(y2);
    }
    return t;
}

}  // namespace vdo
