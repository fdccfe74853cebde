#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "icregion/channel.hpp"
#include "icregion/conditions.hpp"
#include "icregion/errors.hpp"
#include "icregion/info_metrics.hpp"
#include "icregion/region.hpp"

namespace icregion {

// Per receiver j, a permutation of very_strong[j] giving the order in which
// its very strong interferers are decoded and cancelled.
using DecodingOrders = std::vector<std::vector<int>>;

inline void check_orderings(const InterferencePattern& pat, const DecodingOrders& orders) {
    if (orders.size() != pat.very_strong.size())
        throw DimensionError("orderings must name one decode order per receiver");
    for (std::size_t j = 0; j < orders.size(); ++j) {
        auto sorted = orders[j];
        std::sort(sorted.begin(), sorted.end());
        if (sorted != pat.very_strong[j])
            throw ValidationError("ordering at receiver " + std::to_string(j + 1) +
                                  " is not a permutation of its very strong interferers");
    }
}

// The ordering every receiver's very strong set is listed in (ascending).
inline DecodingOrders default_orders(const InterferencePattern& pat) {
    return pat.very_strong;
}

// Every combination of per-receiver decode orders.
inline std::vector<DecodingOrders> all_orderings(const InterferencePattern& pat) {
    const int k = pat.k();
    std::vector<std::vector<std::vector<int>>> per_rx(k);
    for (int j = 0; j < k; ++j) {
        auto perm = pat.very_strong[j];
        std::sort(perm.begin(), perm.end());
        do {
            per_rx[j].push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::size_t total = 1;
    for (const auto& v : per_rx) {
        total *= v.size();
        if (total > 100000) throw ScaleError("all_orderings: too many ordering combinations");
    }
    std::vector<DecodingOrders> out;
    out.reserve(total);
    std::vector<std::size_t> choice(k, 0);
    while (true) {
        DecodingOrders combo(k);
        for (int j = 0; j < k; ++j) combo[j] = per_rx[j][choice[j]];
        out.push_back(std::move(combo));
        int j = k - 1;
        while (j >= 0 && ++choice[j] == per_rx[j].size()) choice[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

// --------------------------------------------------------------------------
// Achievability region of the successive-decoding scheme: at receiver j,
// decode the very strong interferers in the given order (each treating the
// not-yet-decoded users as noise), then jointly MAC-decode user j and its
// strong interferer. Every decoding constraint is emitted, including the
// ones that are redundant under the conditions; redundancy is verified by
// redundancy_check, never assumed.
// --------------------------------------------------------------------------

namespace detail {

template <typename MiFn>
RatePolytope build_scheme(int k, const InterferencePattern& pat, const DecodingOrders& orders,
                          MiFn&& mi) {
    RatePolytope p;
    p.dim = k;
    p.kind = "scheme";
    for (int j = 0; j < k; ++j) {
        std::vector<int> decoded;
        for (std::size_t step = 0; step < orders[j].size(); ++step) {
            const int m = orders[j][step];
            p.add({m}, mi(MiQuery{{m}, j, decoded}),
                  "sic:rx" + std::to_string(j + 1) + ":step" + std::to_string(step + 1));
            decoded.push_back(m);
        }
        std::vector<int> others_j, others_l;
        const int l = pat.strong[j];
        for (int i = 0; i < k; ++i) {
            if (i != j) others_j.push_back(i);
            if (i != l) others_l.push_back(i);
        }
        p.add({j}, mi(MiQuery{{j}, j, others_j}), "mac-own:rx" + std::to_string(j + 1));
        p.add({l}, mi(MiQuery{{l}, j, others_l}), "mac-partner:rx" + std::to_string(j + 1));
        p.add({j, l}, mi(MiQuery{{j, l}, j, pat.very_strong[j]}),
              "mac-pair:rx" + std::to_string(j + 1));
    }
    return p;
}

}  // namespace detail

inline RatePolytope scheme_region(const GaussianIC& ic, const InterferencePattern& pat,
                                  const DecodingOrders& orders) {
    ensure_valid(ic);
    ensure_valid(pat);
    if (pat.k() != ic.k) throw DimensionError("scheme_region: pattern size mismatch");
    check_orderings(pat, orders);
    return detail::build_scheme(ic.k, pat, orders,
                                [&](const MiQuery& q) { return gaussian_mi(ic, q); });
}

inline RatePolytope scheme_region(const Dmic& ch, const ProductDistribution& dist,
                                  const InterferencePattern& pat, const DecodingOrders& orders) {
    ensure_valid(pat);
    if (pat.k() != ch.k) throw DimensionError("scheme_region: pattern size mismatch");
    check_orderings(pat, orders);
    return detail::build_scheme(ch.k, pat, orders,
                                [&](const MiQuery& q) { return dmic_mi(ch, dist, q); });
}

// --------------------------------------------------------------------------
// Redundancy verification. The scheme's extra constraints (the successive
// decoding bounds and the MAC bound on the strong interferer's rate) are all
// single-rate bounds, so their worst violation over the capacity polytope is
// a vertex scan.
// --------------------------------------------------------------------------

struct RedundancyItem {
    std::string label;
    int user = 0;
    double bound = 0.0;
    double max_violation = 0.0;  // max over capacity vertices of R_user - bound
};

struct RedundancyReport {
    bool pass = false;
    double max_violation = 0.0;
    std::vector<RedundancyItem> items;
    bool vertex_sets_equal = false;
    double vertex_max_diff = 0.0;
};

inline bool is_redundant_class(const std::string& label) {
    return label.rfind("sic:", 0) == 0 || label.rfind("mac-partner:", 0) == 0;
}

inline RedundancyReport redundancy_check_polytopes(const RatePolytope& capacity,
                                                   const RatePolytope& scheme) {
    const auto cap_vertices = vertices(capacity);
    RedundancyReport rep;
    rep.pass = true;
    for (const auto& h : scheme.halfspaces) {
        for (const auto& src : h.sources) {
            if (!is_redundant_class(src.label)) continue;
            RedundancyItem item;
            item.label = src.label;
            item.user = h.users.front();
            item.bound = src.bound;
            double worst = -std::numeric_limits<double>::infinity();
            for (const auto& v : cap_vertices) {
                double lhs = 0.0;
                for (int u : h.users) lhs += v.rates[u];
                worst = std::max(worst, lhs - src.bound);
            }
            item.max_violation = worst;
            rep.max_violation = std::max(rep.max_violation, worst);
            if (worst > kGeomTol) rep.pass = false;
            rep.items.push_back(std::move(item));
        }
    }
    rep.vertex_sets_equal =
        vertex_sets_equal(cap_vertices, vertices(scheme), kGeomTol, &rep.vertex_max_diff);
    rep.pass = rep.pass && rep.vertex_sets_equal;
    return rep;
}

inline RedundancyReport redundancy_check(const GaussianIC& ic, const InterferencePattern& pat,
                                         const DecodingOrders& orders, bool force = false) {
    if (!check_conditions(ic, pat).pass && !force)
        throw PreconditionError(
            "redundancy_check: redundancy is only claimed under the strong / very-strong "
            "conditions (pass force=true to probe a non-conforming instance)");
    const auto capacity = capacity_polytope(ic, pat, force);
    const auto scheme = scheme_region(ic, pat, orders);
    return redundancy_check_polytopes(capacity, scheme);
}

inline RedundancyReport redundancy_check(const Dmic& ch, const ProductDistribution& dist,
                                         const InterferencePattern& pat,
                                         const DecodingOrders& orders) {
    const auto capacity = capacity_polytope(ch, dist, pat);
    const auto scheme = scheme_region(ch, dist, pat, orders);
    return redundancy_check_polytopes(capacity, scheme);
}

}  // namespace icregion
