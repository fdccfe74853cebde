#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "icregion/channel.hpp"
#include "icregion/conditions.hpp"
#include "icregion/errors.hpp"
#include "icregion/info_metrics.hpp"

namespace icregion {

constexpr double kGeomTol = 1e-9;

// --------------------------------------------------------------------------
// Half-space representation of a rate region. Every theorem inequality is a
// single-rate or pair bound; inequalities sharing a coefficient pattern are
// merged keeping the smallest bound, with the originating inequalities kept
// as sources (Theorem 2's min structure stays visible that way).
// --------------------------------------------------------------------------

struct HalfspaceSource {
    std::string label;
    double bound = 0.0;
};

struct Halfspace {
    std::vector<int> users;  // sorted, 1 or 2 entries
    double bound = 0.0;
    std::vector<HalfspaceSource> sources;
};

struct RatePolytope {
    int dim = 0;
    std::string kind = "capacity";  // "capacity", "inner", or "scheme"
    std::vector<Halfspace> halfspaces;

    void add(std::vector<int> users, double bound, const std::string& label) {
        if (users.empty() || users.size() > 2)
            throw ValidationError("halfspace must bound one rate or a pair");
        std::sort(users.begin(), users.end());
        if (users.size() == 2 && users[0] == users[1])
            throw ValidationError("pair halfspace must involve two distinct users");
        for (int u : users)
            if (u < 0 || u >= dim) throw DimensionError("halfspace user index out of range");
        if (!std::isfinite(bound)) throw ValidationError("halfspace bound must be finite");
        bound = std::max(bound, 0.0);
        for (auto& h : halfspaces) {
            if (h.users == users) {
                h.sources.push_back({label, bound});
                h.bound = std::min(h.bound, bound);
                return;
            }
        }
        Halfspace h;
        h.users = std::move(users);
        h.bound = bound;
        h.sources.push_back({label, h.bound});
        halfspaces.push_back(std::move(h));
    }
};

// Canonical (users, bound) list for set comparisons, sorted by pattern.
inline std::vector<std::pair<std::vector<int>, double>> canonical_hrep(const RatePolytope& p) {
    std::vector<std::pair<std::vector<int>, double>> out;
    out.reserve(p.halfspaces.size());
    for (const auto& h : p.halfspaces) out.emplace_back(h.users, h.bound);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool same_hrep(const RatePolytope& a, const RatePolytope& b, double tol) {
    if (a.dim != b.dim) return false;
    const auto ca = canonical_hrep(a), cb = canonical_hrep(b);
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i].first != cb[i].first) return false;
        if (std::abs(ca[i].second - cb[i].second) > tol) return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// Capacity polytope: R_i <= I[X_i; Y_i | X_others, Q] for every user and
// R_j + R_{l_j} <= I[X_j, X_{l_j}; Y_j | X_verystrong(j), Q] per receiver.
// --------------------------------------------------------------------------

namespace detail {

template <typename MiFn>
RatePolytope build_capacity(int k, const InterferencePattern& pat, MiFn&& mi) {
    RatePolytope p;
    p.dim = k;
    for (int i = 0; i < k; ++i) {
        std::vector<int> given;
        for (int m = 0; m < k; ++m)
            if (m != i) given.push_back(m);
        p.add({i}, mi(MiQuery{{i}, i, given}), "single:rx" + std::to_string(i + 1));
    }
    for (int j = 0; j < k; ++j) {
        const int l = pat.strong[j];
        p.add({j, l}, mi(MiQuery{{j, l}, j, pat.very_strong[j]}),
              "pair:rx" + std::to_string(j + 1));
    }
    return p;
}

}  // namespace detail

inline RatePolytope capacity_polytope(const GaussianIC& ic, const InterferencePattern& pat,
                                      bool force = false) {
    ensure_valid(ic);
    ensure_valid(pat);
    if (pat.k() != ic.k) throw DimensionError("capacity_polytope: pattern size mismatch");
    const bool pass = check_conditions(ic, pat).pass;
    if (!pass && !force)
        throw ConditionError(
            "capacity_polytope: instance does not satisfy the strong / very-strong conditions "
            "for this pattern (pass force=true to build the inner region anyway)");
    auto p = detail::build_capacity(ic.k, pat,
                                    [&](const MiQuery& q) { return gaussian_mi(ic, q); });
    p.kind = pass ? "capacity" : "inner";
    return p;
}

// DMIC regions are per-distribution inner regions; the capacity region is
// the union over distributions, which we only ever approximate by sampling.
inline RatePolytope capacity_polytope(const Dmic& ch, const ProductDistribution& dist,
                                      const InterferencePattern& pat) {
    ensure_valid(pat);
    if (pat.k() != ch.k) throw DimensionError("capacity_polytope: pattern size mismatch");
    auto p = detail::build_capacity(ch.k, pat,
                                    [&](const MiQuery& q) { return dmic_mi(ch, dist, q); });
    p.kind = "inner";
    return p;
}

// --------------------------------------------------------------------------
// Vertex enumeration by combinatorial basis search. The merged system has at
// most 2k half-spaces plus k nonnegativity constraints, so enumerating all
// dim-subsets stays cheap for dim <= 8.
// --------------------------------------------------------------------------

namespace detail {

inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                        std::vector<double>& x) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-10) return false;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return true;
}

}  // namespace detail

inline bool contains(const RatePolytope& p, const RatePoint& r, double tol = kGeomTol) {
    if (static_cast<int>(r.rates.size()) != p.dim)
        throw DimensionError("contains: rate point dimension mismatch");
    for (double v : r.rates)
        if (v < -tol) return false;
    for (const auto& h : p.halfspaces) {
        double lhs = 0.0;
        for (int u : h.users) lhs += r.rates[u];
        if (lhs > h.bound + tol) return false;
    }
    return true;
}

inline std::vector<RatePoint> vertices(const RatePolytope& p) {
    if (p.dim > 8) throw ScaleError("vertices: dimension above 8 is not supported");
    if (p.dim < 1) throw ValidationError("vertices: empty polytope");

    std::vector<bool> bounded(p.dim, false);
    for (const auto& h : p.halfspaces)
        for (int u : h.users) bounded[u] = true;
    for (int i = 0; i < p.dim; ++i)
        if (!bounded[i])
            throw ValidationError("vertices: rate " + std::to_string(i + 1) +
                                  " is unbounded (no half-space involves it)");

    // Constraint rows: half-spaces first, then R_i >= 0 as R_i = 0 candidates.
    const int n_hs = static_cast<int>(p.halfspaces.size());
    const int n_all = n_hs + p.dim;
    auto row_of = [&](int idx, std::vector<double>& coeff, double& rhs) {
        coeff.assign(p.dim, 0.0);
        if (idx < n_hs) {
            for (int u : p.halfspaces[idx].users) coeff[u] = 1.0;
            rhs = p.halfspaces[idx].bound;
        } else {
            coeff[idx - n_hs] = 1.0;
            rhs = 0.0;
        }
    };

    std::vector<RatePoint> found;
    std::vector<int> pick(p.dim);
    for (int i = 0; i < p.dim; ++i) pick[i] = i;
    std::vector<std::vector<double>> a(p.dim);
    std::vector<double> b(p.dim), x;
    while (true) {
        for (int i = 0; i < p.dim; ++i) row_of(pick[i], a[i], b[i]);
        if (detail::solve_dense(a, b, x)) {
            RatePoint cand{std::move(x)};
            if (contains(p, cand, kGeomTol)) {
                bool dup = false;
                for (const auto& v : found) {
                    double d = 0.0;
                    for (int i = 0; i < p.dim; ++i)
                        d = std::max(d, std::abs(v.rates[i] - cand.rates[i]));
                    if (d < kGeomTol) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) found.push_back(std::move(cand));
            }
            x.clear();
        }
        // next combination
        int i = p.dim - 1;
        while (i >= 0 && pick[i] == n_all - p.dim + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < p.dim; ++j) pick[j] = pick[j - 1] + 1;
    }

    std::sort(found.begin(), found.end(),
              [](const RatePoint& u, const RatePoint& v) { return u.rates < v.rates; });
    return found;
}

// One-to-one matching of two vertex sets within tol. Coordinates can carry
// solver noise well below tol, which is enough to flip lexicographic sort
// order between independent enumerations, so each vertex is paired with its
// closest unused counterpart instead of by list position.
inline bool vertex_sets_equal(const std::vector<RatePoint>& a, const std::vector<RatePoint>& b,
                              double tol, double* max_diff = nullptr) {
    if (max_diff) *max_diff = 0.0;
    if (a.size() != b.size()) {
        if (max_diff) *max_diff = std::numeric_limits<double>::infinity();
        return false;
    }
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (const auto& va : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = 0.0;
            for (std::size_t c = 0; c < va.rates.size(); ++c)
                d = std::max(d, std::abs(va.rates[c] - b[j].rates[c]));
            if (d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best_j == b.size()) return false;
        used[best_j] = true;
        worst = std::max(worst, best);
    }
    if (max_diff) *max_diff = worst;
    return worst <= tol;
}

struct WeightedOptimum {
    double value = 0.0;
    RatePoint argmax;
};

inline WeightedOptimum max_weighted_sum(const RatePolytope& p, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != p.dim)
        throw DimensionError("max_weighted_sum: weight dimension mismatch");
    bool any = false;
    for (double wi : w) {
        if (wi < 0.0) throw ValidationError("max_weighted_sum: weights must be nonnegative");
        any = any || wi > 0.0;
    }
    if (!any) throw ValidationError("max_weighted_sum: weights must not all be zero");

    WeightedOptimum best;
    bool first = true;
    for (const auto& v : vertices(p)) {
        double val = 0.0;
        for (int i = 0; i < p.dim; ++i) val += w[i] * v.rates[i];
        if (first || val > best.value) {
            best.value = val;
            best.argmax = v;
            first = false;
        }
    }
    return best;
}

// --------------------------------------------------------------------------
// 2D slice at fixed rates for all users other than (ui, uj).
// --------------------------------------------------------------------------

struct Slice2D {
    int user_i = 0, user_j = 0;
    double max_i = 0.0, max_j = 0.0;
    std::vector<std::pair<double, double>> boundary;  // exact upper-right frontier
    std::vector<std::pair<double, double>> grid;      // dense sampling for CSV
};

inline Slice2D slice2d(const RatePolytope& p, int ui, int uj, const std::vector<double>& fixed,
                       int grid_points) {
    if (ui == uj || ui < 0 || uj < 0 || ui >= p.dim || uj >= p.dim)
        throw DimensionError("slice2d: invalid user pair");
    if (static_cast<int>(fixed.size()) != p.dim)
        throw DimensionError("slice2d: fixed rates must list all users (entries for the sliced "
                             "pair are ignored)");
    if (grid_points < 2) throw ValidationError("slice2d: need at least 2 grid points");
    for (int u = 0; u < p.dim; ++u)
        if (u != ui && u != uj && (fixed[u] < 0.0 || !std::isfinite(fixed[u])))
            throw EmptySliceError("slice2d: fixed rate for user " + std::to_string(u + 1) +
                                  " must be finite and nonnegative");

    const double inf = std::numeric_limits<double>::infinity();
    double cap_i = inf, cap_j = inf, cap_pair = inf;
    for (const auto& h : p.halfspaces) {
        double fixed_part = 0.0;
        bool has_i = false, has_j = false;
        for (int u : h.users) {
            if (u == ui) has_i = true;
            else if (u == uj) has_j = true;
            else fixed_part += fixed[u];
        }
        const double eff = h.bound - fixed_part;
        if (has_i && has_j) cap_pair = std::min(cap_pair, eff);
        else if (has_i) cap_i = std::min(cap_i, eff);
        else if (has_j) cap_j = std::min(cap_j, eff);
        else if (fixed_part > h.bound + kGeomTol)
            throw EmptySliceError("slice2d: fixed rates violate " + h.sources.front().label);
    }
    if (cap_i < -kGeomTol || cap_j < -kGeomTol || cap_pair < -kGeomTol)
        throw EmptySliceError("slice2d: fixed rates leave no feasible (R_i, R_j)");
    cap_i = std::max(cap_i, 0.0);
    cap_j = std::max(cap_j, 0.0);
    if ((cap_i == inf && cap_pair == inf) || (cap_j == inf && cap_pair == inf))
        throw ValidationError("slice2d: slice is unbounded");

    Slice2D s;
    s.user_i = ui;
    s.user_j = uj;
    s.max_i = std::min(cap_i, cap_pair);
    s.max_j = std::min(cap_j, cap_pair);

    auto y_of = [&](double x) {
        return std::max(0.0, std::min(cap_j, cap_pair == inf ? cap_j : cap_pair - x));
    };

    std::vector<double> xs = {0.0};
    if (cap_pair != inf && cap_pair - cap_j > 0.0 && cap_pair - cap_j < s.max_i)
        xs.push_back(cap_pair - cap_j);
    xs.push_back(s.max_i);
    for (double x : xs) s.boundary.emplace_back(x, y_of(x));
    if (s.boundary.back().second > 0.0) s.boundary.emplace_back(s.max_i, 0.0);

    for (int t = 0; t < grid_points; ++t) {
        const double x = s.max_i * t / (grid_points - 1);
        s.grid.emplace_back(x, y_of(x));
    }
    return s;
}

// --------------------------------------------------------------------------
// Sampled union of per-distribution DMIC regions (an inner approximation of
// the capacity region; never reported as the capacity itself).
// --------------------------------------------------------------------------

struct HullSummary {
    std::vector<RatePoint> points;  // dedup union of all per-distribution vertices
    std::vector<RatePoint> pareto;  // coordinatewise-maximal subset
    // Support values max w.x over the union, for every 0/1 direction w != 0
    // (deterministic grid; monotone in the number of sampled distributions).
    std::vector<std::pair<std::vector<double>, double>> support;
};

struct SampledHull {
    std::vector<RatePolytope> polytopes;
    std::vector<ProductDistribution> distributions;
    HullSummary hull;
};

inline SampledHull dmic_sampled_hull(const Dmic& ch, const InterferencePattern& pat,
                                     int n_dists, int q_support, std::uint64_t seed) {
    ensure_valid(ch);
    if (q_support < 1 || q_support > 2 * ch.k + 1)
        throw ValidationError("dmic_sampled_hull: q_support must be in [1, 2K+1]");

    SampledHull out;
    for (int t = 0; t < n_dists; ++t) {
        ProductDistribution dist;
        if (t == 0) {
            dist = detail::single_q(detail::uniform_pmfs(ch.input_sizes));
        } else {
            std::mt19937_64 gen(derive_seed(seed, 0xD157, static_cast<std::uint64_t>(t)));
            dist.q_weights = sample_simplex(gen, q_support);
            for (int q = 0; q < q_support; ++q) {
                std::vector<std::vector<double>> pmfs;
                for (int i = 0; i < ch.k; ++i)
                    pmfs.push_back(sample_simplex(gen, ch.input_sizes[i]));
                dist.pmfs.push_back(std::move(pmfs));
            }
        }
        out.polytopes.push_back(capacity_polytope(ch, dist, pat));
        out.distributions.push_back(std::move(dist));
    }

    for (const auto& poly : out.polytopes)
        for (auto& v : vertices(poly)) {
            bool dup = false;
            for (const auto& u : out.hull.points) {
                double d = 0.0;
                for (int i = 0; i < ch.k; ++i) d = std::max(d, std::abs(u.rates[i] - v.rates[i]));
                if (d < kGeomTol) {
                    dup = true;
                    break;
                }
            }
            if (!dup) out.hull.points.push_back(v);
        }
    std::sort(out.hull.points.begin(), out.hull.points.end(),
              [](const RatePoint& u, const RatePoint& v) { return u.rates < v.rates; });

    for (const auto& v : out.hull.points) {
        bool dominated = false;
        for (const auto& u : out.hull.points) {
            if (&u == &v) continue;
            bool all_ge = true, strict = false;
            for (int i = 0; i < ch.k; ++i) {
                if (u.rates[i] < v.rates[i] - kGeomTol) all_ge = false;
                if (u.rates[i] > v.rates[i] + kGeomTol) strict = true;
            }
            if (all_ge && strict) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.hull.pareto.push_back(v);
    }

    if (!out.hull.points.empty()) {
        for (unsigned mask = 1; mask < (1u << ch.k); ++mask) {
            std::vector<double> w(ch.k, 0.0);
            for (int i = 0; i < ch.k; ++i)
                if (mask & (1u << i)) w[i] = 1.0;
            double best = 0.0;
            for (const auto& v : out.hull.points) {
                double val = 0.0;
                for (int i = 0; i < ch.k; ++i) val += w[i] * v.rates[i];
                best = std::max(best, val);
            }
            out.hull.support.emplace_back(std::move(w), best);
        }
    }
    return out;
}

}  // namespace icregion
