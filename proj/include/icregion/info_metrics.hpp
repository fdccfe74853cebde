#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "icregion/channel.hpp"
#include "icregion/errors.hpp"
#include "icregion/rng.hpp"

namespace icregion {

// A conditional mutual-information query I[X_S; Y_j | X_T] (plus time
// sharing, when the input distribution carries a Q variable).
struct MiQuery {
    std::vector<int> senders;  // S, nonempty
    int receiver = 0;          // j
    std::vector<int> given;    // T, disjoint from S
};

inline void check_query(int k, const MiQuery& q) {
    if (q.receiver < 0 || q.receiver >= k)
        throw DimensionError("MiQuery: receiver index out of range");
    if (q.senders.empty()) throw ValidationError("MiQuery: sender set must be nonempty");
    std::vector<bool> in_s(k, false);
    for (int i : q.senders) {
        if (i < 0 || i >= k) throw DimensionError("MiQuery: sender index out of range");
        if (in_s[i]) throw ValidationError("MiQuery: duplicate sender index");
        in_s[i] = true;
    }
    for (int i : q.given) {
        if (i < 0 || i >= k) throw DimensionError("MiQuery: conditioned index out of range");
        if (in_s[i]) throw ValidationError("MiQuery: sender and conditioned sets must be disjoint");
    }
}

// --------------------------------------------------------------------------
// Gaussian closed form. For independent Gaussian inputs on the canonical
// channel,
//   I[X_S; Y_j | X_T] = log2( (1 + sum_{i not in T} |h_ij|^2 P_i)
//                           / (1 + sum_{i not in T or S} |h_ij|^2 P_i) ).
// --------------------------------------------------------------------------

inline double gaussian_mi(const GaussianIC& ic, const MiQuery& q) {
    check_query(ic.k, q);
    std::vector<int> role(ic.k, 0);  // 0 = unknown interference, 1 = sender, 2 = conditioned
    for (int i : q.senders) role[i] = 1;
    for (int i : q.given) role[i] = 2;
    double num = 1.0, den = 1.0;
    for (int i = 0; i < ic.k; ++i) {
        const double a = ic.cross_power(i, q.receiver);
        if (role[i] != 2) num += a;
        if (role[i] == 0) den += a;
    }
    return std::log2(num / den);
}

// --------------------------------------------------------------------------
// Exact DMIC evaluation by enumeration over (q, x_1..x_k, y_j).
// --------------------------------------------------------------------------

namespace detail {

inline double xlog2_ratio(double p, double num, double den) {
    // 0 log 0 := 0; probabilities below 1e-300 are treated as exact zeros.
    if (p < 1e-300 || num < 1e-300 || den < 1e-300) return 0.0;
    return p * std::log2(num / den);
}

// Single time-share component: per-user pmfs, no Q.
inline double dmic_mi_component(const Dmic& ch, const std::vector<std::vector<double>>& pmfs,
                                const MiQuery& q) {
    const int k = ch.k;
    const int ny = ch.output_sizes[q.receiver];
    std::vector<int> role(k, 0);
    for (int i : q.senders) role[i] = 1;
    for (int i : q.given) role[i] = 2;

    // Combined indices over the sender block and the conditioned block, in
    // user order.
    long long ns = 1, nt = 1;
    for (int i = 0; i < k; ++i) {
        if (role[i] == 1) ns *= ch.input_sizes[i];
        if (role[i] == 2) nt *= ch.input_sizes[i];
    }

    std::vector<double> joint(static_cast<std::size_t>(ns * nt * ny), 0.0);  // p(s, t, y)
    std::vector<double> p_s(static_cast<std::size_t>(ns), 0.0);
    std::vector<double> p_t(static_cast<std::size_t>(nt), 0.0);

    const long long rows = ch.joint_inputs();
    std::vector<int> x(k, 0);
    const auto& table = ch.transitions[q.receiver];
    for (long long row = 0; row < rows; ++row) {
        double w = 1.0;
        long long is = 0, it = 0;
        for (int i = 0; i < k; ++i) {
            w *= pmfs[i][x[i]];
            if (role[i] == 1) is = is * ch.input_sizes[i] + x[i];
            if (role[i] == 2) it = it * ch.input_sizes[i] + x[i];
        }
        if (w > 0.0) {
            const auto& py = table[row];
            double* cell = &joint[static_cast<std::size_t>((is * nt + it) * ny)];
            for (int y = 0; y < ny; ++y) cell[y] += w * py[y];
        }
        // odometer increment, x_k fastest
        for (int i = k - 1; i >= 0; --i) {
            if (++x[i] < ch.input_sizes[i]) break;
            x[i] = 0;
        }
    }

    // Marginals p(s) and p(t,y).
    std::vector<double> pty(static_cast<std::size_t>(nt * ny), 0.0);
    for (long long is = 0; is < ns; ++is)
        for (long long it = 0; it < nt; ++it) {
            const double* cell = &joint[static_cast<std::size_t>((is * nt + it) * ny)];
            for (int y = 0; y < ny; ++y) pty[static_cast<std::size_t>(it * ny + y)] += cell[y];
        }
    for (long long is = 0; is < ns; ++is) {
        double total = 0.0;
        for (long long it = 0; it < nt; ++it) {
            const double* cell = &joint[static_cast<std::size_t>((is * nt + it) * ny)];
            for (int y = 0; y < ny; ++y) total += cell[y];
        }
        p_s[static_cast<std::size_t>(is)] = total;
    }
    (void)p_t;

    // I = sum p(s,t,y) log2( p(s,t,y) / (p(s) p(t,y)) ), using independence
    // of X_S and X_T.
    double mi = 0.0;
    for (long long is = 0; is < ns; ++is)
        for (long long it = 0; it < nt; ++it) {
            const double* cell = &joint[static_cast<std::size_t>((is * nt + it) * ny)];
            for (int y = 0; y < ny; ++y)
                mi += xlog2_ratio(cell[y], cell[y],
                                  p_s[static_cast<std::size_t>(is)] *
                                      pty[static_cast<std::size_t>(it * ny + y)]);
        }
    return mi;
}

}  // namespace detail

// I[X_S; Y_j | X_T, Q] for a product distribution with time sharing: the
// weighted average of the per-component values.
inline double dmic_mi(const Dmic& ch, const ProductDistribution& dist, const MiQuery& q) {
    check_query(ch.k, q);
    for (int c = 0; c < dist.num_q(); ++c) {
        if (static_cast<int>(dist.pmfs[c].size()) != ch.k)
            throw DimensionError("dmic_mi: distribution has wrong user count");
        for (int i = 0; i < ch.k; ++i)
            if (static_cast<int>(dist.pmfs[c][i].size()) != ch.input_sizes[i])
                throw DimensionError("dmic_mi: pmf length does not match input alphabet");
    }
    double mi = 0.0;
    for (int c = 0; c < dist.num_q(); ++c) {
        if (dist.q_weights[c] == 0.0) continue;
        mi += dist.q_weights[c] * detail::dmic_mi_component(ch, dist.pmfs[c], q);
    }
    return mi;
}

// --------------------------------------------------------------------------
// Monte Carlo oracle for the Gaussian closed form. Samples all user inputs
// and the receiver noise from the channel equation and averages exact
// log-likelihood ratios of the conditional Gaussian densities; no binning,
// so the estimator is unbiased up to sampling noise.
// --------------------------------------------------------------------------

struct McEstimate {
    double estimate = 0.0;  // bits
    double stderr_ = 0.0;   // sample standard error, bits
};

inline McEstimate mc_gaussian_mi(const GaussianIC& ic, const MiQuery& q, long long samples,
                                 std::uint64_t seed) {
    check_query(ic.k, q);
    if (samples < 1000) throw PreconditionError("mc_gaussian_mi requires samples >= 1000");

    std::vector<int> role(ic.k, 0);
    for (int i : q.senders) role[i] = 1;
    for (int i : q.given) role[i] = 2;

    const int j = q.receiver;
    double var_rest = 0.0, var_s = 0.0;
    for (int i = 0; i < ic.k; ++i) {
        if (role[i] == 0) var_rest += ic.cross_power(i, j);
        if (role[i] == 1) var_s += ic.cross_power(i, j);
    }
    const double v_cond = 1.0 + var_rest;          // var of Y_j given X_S, X_T
    const double v_marg = 1.0 + var_rest + var_s;  // var of Y_j given X_T only
    const double log_ratio = std::log(v_marg / v_cond);
    const double inv_ln2 = 1.0 / std::log(2.0);

    std::mt19937_64 gen(derive_seed(seed, 0x6D63, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> n01(0.0, 1.0);

    std::vector<double> amp(ic.k);
    for (int i = 0; i < ic.k; ++i) amp[i] = std::sqrt(ic.powers[i] / 2.0);

    double sum = 0.0, sum_sq = 0.0;
    for (long long s = 0; s < samples; ++s) {
        cplx y(n01(gen) * M_SQRT1_2, n01(gen) * M_SQRT1_2);  // unit-variance noise
        cplx u_s(0.0, 0.0), u_t(0.0, 0.0);
        for (int i = 0; i < ic.k; ++i) {
            const cplx xi(n01(gen) * amp[i], n01(gen) * amp[i]);
            const cplx contrib = ic.gains[i][j] * xi;
            y += contrib;
            if (role[i] == 1) u_s += contrib;
            if (role[i] == 2) u_t += contrib;
        }
        const double r_marg = std::norm(y - u_t);
        const double r_cond = std::norm(y - u_t - u_s);
        const double llr = (log_ratio + r_marg / v_marg - r_cond / v_cond) * inv_ln2;
        sum += llr;
        sum_sq += llr * llr;
    }

    McEstimate out;
    const double n = static_cast<double>(samples);
    out.estimate = sum / n;
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    out.stderr_ = std::sqrt(var / n);
    return out;
}

}  // namespace icregion
