#include "umig/assignment.hpp"

#include <algorithm>
#include <limits>

namespace umig {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    std::size_t cols = 0;
    for (const auto& r : weights) cols = std::max(cols, r.size());
    std::vector<int> result(rows, -1);
    if (rows == 0 || cols == 0) return result;

    // Square cost matrix, minimised; padding cells cost nothing.
    const std::size_t n = std::max(rows, cols);
    double top = 0;
    for (const auto& r : weights)
        for (double w : r) top = std::max(top, w);
    auto cost = [&](std::size_t i, std::size_t j) {
        if (i < rows && j < weights[i].size()) return top - std::max(0.0, weights[i][j]);
        return top;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = p[j] - 1;
        if (i < rows && j - 1 < weights[i].size() && weights[i][j - 1] > 0) result[i] = static_cast<int>(j - 1);
    }
    return result;
}

}  // namespace umig
