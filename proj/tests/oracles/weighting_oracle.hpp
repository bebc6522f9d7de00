#pragma once

// Direct, loop-by-loop transcription of the weighting rules, written without
// touching the engine so the two can be compared.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

struct WeightingParams {
    double lambda_init = 0.5;
    double delta = 0.1;
    double lambda_min = 0.3;
    double lambda_max = 0.9;
    bool inverse_size = false;
};

struct EpochRecord {
    std::vector<double> lambda, alpha, beta, w;
};

/// acc[i][t]: accuracy of model i after epoch t+1; sizes[i]: parameter count.
inline std::vector<EpochRecord> run(const std::vector<std::vector<double>>& acc,
                                    const std::vector<double>& sizes, const WeightingParams& p) {
    const std::size_t n = acc.size();
    const std::size_t epochs = acc[0].size();

    std::vector<double> beta(n);
    double size_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) size_total += p.inverse_size ? 1.0 / sizes[i] : sizes[i];
    for (std::size_t i = 0; i < n; ++i) beta[i] = (p.inverse_size ? 1.0 / sizes[i] : sizes[i]) / size_total;

    std::vector<double> lambda(n, p.lambda_init);
    std::vector<EpochRecord> out;
    for (std::size_t t = 0; t < epochs; ++t) {
        if (t > 0) {
            std::vector<double> gain(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                gain[i] = std::max(acc[i][t] - acc[i][t - 1], 0.0);
                total += gain[i];
            }
            if (total > 1e-12) {
                for (std::size_t i = 0; i < n; ++i) {
                    lambda[i] = std::clamp(lambda[i] + p.delta * gain[i] / total, p.lambda_min, p.lambda_max);
                }
            }
        }
        double acc_total = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc_total += acc[i][t];
        EpochRecord rec{lambda, std::vector<double>(n), beta, std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            rec.alpha[i] = acc[i][t] / acc_total;
            rec.w[i] = lambda[i] * rec.alpha[i] + (1.0 - lambda[i]) * beta[i];
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace oracle
