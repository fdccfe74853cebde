#pragma once

// Test-only vertex oracle, kept independent of icregion::vertices: solves
// candidate active sets by cofactor-expansion Cramer's rule instead of
// elimination, with its own feasibility filter and dedup.

#include <cmath>
#include <vector>

#include "icregion/region.hpp"

namespace oracle {

using Constraint = std::pair<std::vector<double>, double>;  // a . x <= b

inline double det(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        if (m[0][c] == 0.0) continue;
        std::vector<std::vector<double>> minor(n - 1, std::vector<double>(n - 1));
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t col = 0; col < n; ++col) {
                if (col == c) continue;
                minor[r - 1][cc++] = m[r][col];
            }
        }
        acc += (c % 2 == 0 ? 1.0 : -1.0) * m[0][c] * det(minor);
    }
    return acc;
}

inline std::vector<Constraint> constraints_of(const icregion::RatePolytope& p) {
    std::vector<Constraint> cons;
    for (const auto& h : p.halfspaces) {
        std::vector<double> a(p.dim, 0.0);
        for (int u : h.users) a[u] = 1.0;
        cons.emplace_back(std::move(a), h.bound);
    }
    for (int i = 0; i < p.dim; ++i) {
        std::vector<double> a(p.dim, 0.0);
        a[i] = -1.0;
        cons.emplace_back(std::move(a), 0.0);
    }
    return cons;
}

inline std::vector<std::vector<double>> oracle_vertices(int dim,
                                                        const std::vector<Constraint>& cons) {
    std::vector<std::vector<double>> found;
    std::vector<int> pick(dim);
    for (int i = 0; i < dim; ++i) pick[i] = i;
    const int n = static_cast<int>(cons.size());
    if (n < dim) return found;
    while (true) {
        std::vector<std::vector<double>> a(dim);
        std::vector<double> b(dim);
        for (int i = 0; i < dim; ++i) {
            a[i] = cons[pick[i]].first;
            b[i] = cons[pick[i]].second;
        }
        const double d = det(a);
        if (std::abs(d) > 1e-9) {
            std::vector<double> x(dim);
            for (int col = 0; col < dim; ++col) {
                auto ac = a;
                for (int r = 0; r < dim; ++r) ac[r][col] = b[r];
                x[col] = det(ac) / d;
            }
            bool feasible = true;
            for (const auto& [coef, bound] : cons) {
                double lhs = 0.0;
                for (int i = 0; i < dim; ++i) lhs += coef[i] * x[i];
                if (lhs > bound + 1e-9) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                bool dup = false;
                for (const auto& v : found) {
                    double dmax = 0.0;
                    for (int i = 0; i < dim; ++i) dmax = std::max(dmax, std::abs(v[i] - x[i]));
                    if (dmax < 1e-9) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) found.push_back(std::move(x));
            }
        }
        int i = dim - 1;
        while (i >= 0 && pick[i] == n - dim + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < dim; ++j) pick[j] = pick[j - 1] + 1;
    }
    std::sort(found.begin(), found.end());
    return found;
}

inline std::vector<std::vector<double>> oracle_vertices(const icregion::RatePolytope& p) {
    return oracle_vertices(p.dim, constraints_of(p));
}

}  // namespace oracle
