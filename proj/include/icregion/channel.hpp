#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "icregion/errors.hpp"
#include "icregion/rng.hpp"

namespace icregion {

using cplx = std::complex<double>;

constexpr double kRowSumTol = 1e-12;
constexpr double kPmfSumTol = 1e-12;
// Desk-scale enumeration bound on (joint input alphabet) x (largest output alphabet).
constexpr double kDmicSizeBound = 1e7;

// --------------------------------------------------------------------------
// Domain types. All user/receiver indices are 0-based in code and in JSON
// files; human-readable reports print them 1-based.
// --------------------------------------------------------------------------

// K-user complex-gain Gaussian interference channel in canonical form:
// unit direct gains, unit noise. gains[i][j] is the gain from user i to
// receiver j; powers[i] is user i's average power in noise-normalized units.
struct GaussianIC {
    int k = 0;
    std::vector<std::vector<cplx>> gains;
    std::vector<double> powers;

    double cross_power(int i, int j) const { return std::norm(gains[i][j]) * powers[i]; }
};

// Tag attached by make_degraded_pair: output rx_a is a per-letter stochastic
// degradation of output rx_b given the inputs of all users except `sender`.
struct DegradedTag {
    int sender = 0;
    int rx_a = 0;
    int rx_b = 0;
};

// Finite-alphabet memoryless interference channel, stored as per-receiver
// conditional pmf tables p(y_j | x_1..x_k). Rows are indexed by the joint
// input index with x_1 most significant.
struct Dmic {
    int k = 0;
    std::vector<int> input_sizes;
    std::vector<int> output_sizes;
    // transitions[j] has joint_inputs() rows, each of length output_sizes[j].
    std::vector<std::vector<std::vector<double>>> transitions;
    std::optional<DegradedTag> degraded;

    long long joint_inputs() const {
        long long n = 1;
        for (int s : input_sizes) n *= s;
        return n;
    }

    // Joint row index of an input tuple, x_1 most significant.
    long long row_index(const std::vector<int>& x) const {
        long long idx = 0;
        for (int i = 0; i < k; ++i) idx = idx * input_sizes[i] + x[i];
        return idx;
    }

    std::vector<int> decode_row(long long idx) const {
        std::vector<int> x(k);
        for (int i = k - 1; i >= 0; --i) {
            x[i] = static_cast<int>(idx % input_sizes[i]);
            idx /= input_sizes[i];
        }
        return x;
    }
};

// Per-user input pmfs, optionally mixed by a time-sharing variable Q.
// pmfs[q][i] is the pmf of user i's input under time-share component q.
struct ProductDistribution {
    std::vector<double> q_weights;
    std::vector<std::vector<std::vector<double>>> pmfs;

    int num_q() const { return static_cast<int>(q_weights.size()); }
};

// Per-receiver assignment of one strong interferer and k-2 very strong ones.
struct InterferencePattern {
    std::vector<int> strong;                   // strong[j] = l_j
    std::vector<std::vector<int>> very_strong; // very_strong[j], sorted

    int k() const { return static_cast<int>(strong.size()); }
};

struct RatePoint {
    std::vector<double> rates;
};

// --------------------------------------------------------------------------
// Validation. Each validate() returns the full list of violations, one
// message per violated invariant, with the offending indices.
// --------------------------------------------------------------------------

inline std::vector<std::string> validate(const GaussianIC& ic) {
    std::vector<std::string> errs;
    if (ic.k < 2) errs.push_back("k must be >= 2, got " + std::to_string(ic.k));
    if (static_cast<int>(ic.gains.size()) != ic.k) {
        errs.push_back("gains must have k rows");
        return errs;
    }
    for (int i = 0; i < ic.k; ++i) {
        if (static_cast<int>(ic.gains[i].size()) != ic.k) {
            errs.push_back("gains row " + std::to_string(i) + " must have k entries");
            return errs;
        }
    }
    for (int j = 0; j < ic.k; ++j) {
        if (ic.gains[j][j] != cplx(1.0, 0.0))
            errs.push_back("direct gain gains[" + std::to_string(j) + "][" + std::to_string(j) +
                           "] must be exactly 1 (canonical form)");
    }
    if (static_cast<int>(ic.powers.size()) != ic.k) {
        errs.push_back("powers must have k entries");
        return errs;
    }
    for (int i = 0; i < ic.k; ++i) {
        if (!(ic.powers[i] >= 0.0) || !std::isfinite(ic.powers[i]))
            errs.push_back("powers[" + std::to_string(i) + "] must be finite and >= 0");
    }
    return errs;
}

inline std::vector<std::string> validate(const Dmic& ch) {
    std::vector<std::string> errs;
    if (ch.k < 2) errs.push_back("k must be >= 2, got " + std::to_string(ch.k));
    if (static_cast<int>(ch.input_sizes.size()) != ch.k ||
        static_cast<int>(ch.output_sizes.size()) != ch.k) {
        errs.push_back("input_sizes and output_sizes must each have k entries");
        return errs;
    }
    for (int i = 0; i < ch.k; ++i) {
        if (ch.input_sizes[i] < 2)
            errs.push_back("input_sizes[" + std::to_string(i) + "] must be >= 2");
        if (ch.output_sizes[i] < 2)
            errs.push_back("output_sizes[" + std::to_string(i) + "] must be >= 2");
    }
    if (!errs.empty()) return errs;

    double joint = 1.0;
    for (int s : ch.input_sizes) joint *= s;
    int max_out = *std::max_element(ch.output_sizes.begin(), ch.output_sizes.end());
    if (joint * max_out > kDmicSizeBound) {
        std::ostringstream os;
        os << "alphabet volume " << joint * max_out << " exceeds enumeration bound " << kDmicSizeBound;
        errs.push_back(os.str());
        return errs;
    }

    const long long rows = ch.joint_inputs();
    if (static_cast<int>(ch.transitions.size()) != ch.k) {
        errs.push_back("transitions must have one table per receiver");
        return errs;
    }
    for (int j = 0; j < ch.k; ++j) {
        if (static_cast<long long>(ch.transitions[j].size()) != rows) {
            errs.push_back("transitions[" + std::to_string(j) + "] must have " +
                           std::to_string(rows) + " rows");
            continue;
        }
        for (long long r = 0; r < rows; ++r) {
            const auto& row = ch.transitions[j][r];
            if (static_cast<int>(row.size()) != ch.output_sizes[j]) {
                errs.push_back("transitions[" + std::to_string(j) + "] row " + std::to_string(r) +
                               " must have |Y_" + std::to_string(j + 1) + "| entries");
                continue;
            }
            double sum = 0.0;
            bool in_range = true;
            for (double p : row) {
                sum += p;
                if (!(p >= 0.0 && p <= 1.0)) in_range = false;
            }
            if (!in_range)
                errs.push_back("transitions[" + std::to_string(j) + "] row " + std::to_string(r) +
                               " has entries outside [0,1]");
            if (std::abs(sum - 1.0) > kRowSumTol) {
                std::ostringstream os;
                os << "transitions[" << j << "] row " << r << " sums to " << sum
                   << " (receiver " << j + 1 << ", row index " << r << ")";
                errs.push_back(os.str());
            }
        }
    }
    return errs;
}

// The |Q| bound depends on the user count, so validating a distribution
// needs k. For k=3 the theorem bound 7 coincides with 2K+1.
inline std::vector<std::string> validate(const ProductDistribution& dist, int k) {
    std::vector<std::string> errs;
    const int max_q = 2 * k + 1;
    if (dist.num_q() > max_q)
        errs.push_back("|Q| exceeds 2K+1 = " + std::to_string(max_q) + " (got " +
                       std::to_string(dist.num_q()) + ")");
    if (dist.num_q() == 0) errs.push_back("q_weights must be nonempty");
    double qsum = 0.0;
    for (std::size_t q = 0; q < dist.q_weights.size(); ++q) {
        if (!(dist.q_weights[q] >= 0.0))
            errs.push_back("q_weights[" + std::to_string(q) + "] must be >= 0");
        qsum += dist.q_weights[q];
    }
    if (!dist.q_weights.empty() && std::abs(qsum - 1.0) > kPmfSumTol)
        errs.push_back("q_weights must sum to 1");
    if (static_cast<int>(dist.pmfs.size()) != dist.num_q()) {
        errs.push_back("pmfs must have one block per q component");
        return errs;
    }
    for (int q = 0; q < dist.num_q(); ++q) {
        if (static_cast<int>(dist.pmfs[q].size()) != k) {
            errs.push_back("pmfs[" + std::to_string(q) + "] must have k per-user pmfs");
            continue;
        }
        for (int i = 0; i < k; ++i) {
            double sum = 0.0;
            bool nonneg = true;
            for (double p : dist.pmfs[q][i]) {
                sum += p;
                if (p < 0.0) nonneg = false;
            }
            if (!nonneg)
                errs.push_back("pmfs[" + std::to_string(q) + "][" + std::to_string(i) +
                               "] has negative entries");
            if (std::abs(sum - 1.0) > kPmfSumTol)
                errs.push_back("pmfs[" + std::to_string(q) + "][" + std::to_string(i) +
                               "] sums to " + std::to_string(sum));
        }
    }
    return errs;
}

inline std::vector<std::string> validate(const ProductDistribution& dist, const Dmic& ch) {
    auto errs = validate(dist, ch.k);
    for (int q = 0; q < dist.num_q() && static_cast<int>(dist.pmfs.size()) == dist.num_q(); ++q) {
        if (static_cast<int>(dist.pmfs[q].size()) != ch.k) continue;
        for (int i = 0; i < ch.k; ++i) {
            if (static_cast<int>(dist.pmfs[q][i].size()) != ch.input_sizes[i])
                errs.push_back("pmfs[" + std::to_string(q) + "][" + std::to_string(i) +
                               "] length does not match |X_" + std::to_string(i + 1) + "| = " +
                               std::to_string(ch.input_sizes[i]));
        }
    }
    return errs;
}

inline std::vector<std::string> validate(const InterferencePattern& pat) {
    std::vector<std::string> errs;
    const int k = pat.k();
    if (k < 2) errs.push_back("pattern must cover k >= 2 receivers");
    if (static_cast<int>(pat.very_strong.size()) != k) {
        errs.push_back("very_strong must have one set per receiver");
        return errs;
    }
    for (int j = 0; j < k; ++j) {
        std::vector<bool> seen(k, false);
        seen[j] = true;
        const int l = pat.strong[j];
        if (l < 0 || l >= k || l == j) {
            errs.push_back("strong[" + std::to_string(j) + "] must be a user index != " +
                           std::to_string(j));
            continue;
        }
        seen[l] = true;
        if (static_cast<int>(pat.very_strong[j].size()) != k - 2)
            errs.push_back("very_strong[" + std::to_string(j) + "] must have k-2 entries");
        for (int m : pat.very_strong[j]) {
            if (m < 0 || m >= k || seen[m]) {
                errs.push_back("very_strong[" + std::to_string(j) +
                               "] must consist of distinct users != receiver and != strong");
                break;
            }
            seen[m] = true;
        }
        if (std::count(seen.begin(), seen.end(), true) != k)
            errs.push_back("receiver " + std::to_string(j + 1) +
                           ": {j} + {l_j} + very_strong must cover all users");
    }
    return errs;
}

template <typename T, typename... Extra>
void ensure_valid(const T& instance, const Extra&... extra) {
    auto errs = validate(instance, extra...);
    if (!errs.empty()) {
        std::string msg = "validation failed:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ValidationError(msg);
    }
}

// --------------------------------------------------------------------------
// Canonicalization
// --------------------------------------------------------------------------

// Brings an arbitrary Gaussian instance (raw gains, per-receiver noise
// variances, per-user powers) to the canonical form with unit direct gains
// and unit noise. The received-power terms |h_ij|^2 P_i / N_j, and hence all
// closed-form mutual informations, are preserved exactly:
//   P'_i = |raw[i][i]|^2 P_i / N_i,
//   h'[i][j] = raw[i][j] / raw[i][i] * sqrt(N_i / N_j).
inline GaussianIC normalize_gaussian(const std::vector<std::vector<cplx>>& raw_gains,
                                     const std::vector<double>& noise_vars,
                                     const std::vector<double>& powers) {
    const int k = static_cast<int>(raw_gains.size());
    if (k < 2) throw ValidationError("normalize_gaussian: need k >= 2 users");
    if (static_cast<int>(noise_vars.size()) != k || static_cast<int>(powers.size()) != k)
        throw DimensionError("normalize_gaussian: noise_vars and powers must have k entries");
    for (int i = 0; i < k; ++i)
        if (static_cast<int>(raw_gains[i].size()) != k)
            throw DimensionError("normalize_gaussian: gains must be k x k");
    for (int j = 0; j < k; ++j) {
        if (!(noise_vars[j] > 0.0) || !std::isfinite(noise_vars[j]))
            throw ValidationError("normalize_gaussian: noise variance at receiver " +
                                  std::to_string(j + 1) + " must be positive");
        if (raw_gains[j][j] == cplx(0.0, 0.0))
            throw CanonicalizationError("normalize_gaussian: zero direct gain at user " +
                                        std::to_string(j + 1));
    }
    for (int i = 0; i < k; ++i) {
        if (!(powers[i] >= 0.0) || !std::isfinite(powers[i]))
            throw ValidationError("normalize_gaussian: powers[" + std::to_string(i) +
                                  "] must be finite and >= 0");
    }

    GaussianIC ic;
    ic.k = k;
    ic.gains.assign(k, std::vector<cplx>(k));
    ic.powers.resize(k);
    for (int i = 0; i < k; ++i)
        ic.powers[i] = std::norm(raw_gains[i][i]) * powers[i] / noise_vars[i];
    for (int i = 0; i < k; ++i) {
        const double scale_i = std::sqrt(noise_vars[i]);
        for (int j = 0; j < k; ++j)
            ic.gains[i][j] = raw_gains[i][j] / raw_gains[i][i] * (scale_i / std::sqrt(noise_vars[j]));
        ic.gains[i][i] = cplx(1.0, 0.0);
    }
    return ic;
}

// --------------------------------------------------------------------------
// Pattern helpers
// --------------------------------------------------------------------------

// The cyclic pattern l_j = (j+1) mod k used by the random generator.
inline InterferencePattern cyclic_pattern(int k) {
    InterferencePattern pat;
    pat.strong.resize(k);
    pat.very_strong.resize(k);
    for (int j = 0; j < k; ++j) {
        pat.strong[j] = (j + 1) % k;
        for (int m = 0; m < k; ++m)
            if (m != j && m != pat.strong[j]) pat.very_strong[j].push_back(m);
    }
    return pat;
}

// --------------------------------------------------------------------------
// Seeded random conforming instances
// --------------------------------------------------------------------------

struct GeneratedInstance {
    GaussianIC ic;
    InterferencePattern pattern;
    // For k >= 4 the very-strong inequalities at one receiver couple the
    // corresponding gains; the coupled system is only solvable when the
    // interferer power products are small enough. When the requested powers
    // make it infeasible, they are scaled down and that is recorded here.
    bool powers_rescaled = false;
    double power_scale = 1.0;
};

// Builds a Gaussian instance satisfying the strong / very-strong conditions
// for the given pattern, with multiplicative slack 1.05 on the very-strong
// inequalities. Deterministic for a fixed seed.
inline GeneratedInstance random_instance_for_pattern(const InterferencePattern& pattern,
                                                     std::uint64_t seed,
                                                     const std::vector<double>& powers_hint = {}) {
    ensure_valid(pattern);
    const int k = pattern.k();
    constexpr double kSlack = 1.05;

    std::mt19937_64 gen(derive_seed(seed, 0xC0DE));
    std::uniform_real_distribution<double> upow(0.2, 1.0);
    std::uniform_real_distribution<double> ustrong(1.0, 1.6);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);

    std::vector<double> base_powers(k);
    if (!powers_hint.empty()) {
        if (static_cast<int>(powers_hint.size()) != k)
            throw DimensionError("powers_hint must have k entries");
        base_powers = powers_hint;
        for (double p : base_powers)
            if (!(p > 0.0) || !std::isfinite(p))
                throw ValidationError("powers_hint entries must be positive and finite");
    } else {
        for (auto& p : base_powers) p = upow(gen);
    }

    // Draw all randomness up front so the rescale loop below stays
    // deterministic in the seed.
    std::vector<std::vector<double>> strong_mag(k, std::vector<double>(k, 0.0));
    std::vector<std::vector<double>> phase(k, std::vector<double>(k, 0.0));
    for (int j = 0; j < k; ++j) {
        strong_mag[pattern.strong[j]][j] = ustrong(gen);
        for (int i = 0; i < k; ++i)
            if (i != j) phase[i][j] = uphase(gen);
    }

    GeneratedInstance out;
    out.pattern = pattern;

    std::vector<double> powers = base_powers;
    std::vector<std::vector<double>> vs_g2(k, std::vector<double>(k, 0.0));
    for (int attempt = 0; attempt < 200; ++attempt) {
        bool feasible = true;
        for (int j = 0; j < k && feasible; ++j) {
            const int l = pattern.strong[j];
            const auto& vs = pattern.very_strong[j];
            const double fixed_part =
                1.0 + powers[j] + strong_mag[l][j] * strong_mag[l][j] * powers[l];
            std::vector<double> g2(vs.size());
            for (std::size_t m = 0; m < vs.size(); ++m) g2[m] = kSlack * fixed_part;
            for (int iter = 0; iter < 4000; ++iter) {
                double max_rel = 0.0;
                for (std::size_t m = 0; m < vs.size(); ++m) {
                    double rhs = fixed_part;
                    for (std::size_t m2 = 0; m2 < vs.size(); ++m2)
                        if (m2 != m) rhs += g2[m2] * powers[vs[m2]];
                    const double next = kSlack * rhs;
                    max_rel = std::max(max_rel, std::abs(next - g2[m]) / next);
                    g2[m] = next;
                }
                if (g2.size() <= 1 || max_rel < 1e-14) break;
                if (*std::max_element(g2.begin(), g2.end()) > 1e9) {
                    feasible = false;
                    break;
                }
            }
            if (feasible)
                for (std::size_t m = 0; m < vs.size(); ++m) vs_g2[vs[m]][j] = g2[m];
        }
        if (feasible) break;
        powers = base_powers;
        out.power_scale *= 0.5;
        out.powers_rescaled = true;
        for (auto& p : powers) p *= out.power_scale;
    }

    GaussianIC ic;
    ic.k = k;
    ic.powers = powers;
    ic.gains.assign(k, std::vector<cplx>(k, cplx(0.0, 0.0)));
    for (int j = 0; j < k; ++j) {
        ic.gains[j][j] = cplx(1.0, 0.0);
        const int l = pattern.strong[j];
        ic.gains[l][j] = std::polar(strong_mag[l][j], phase[l][j]);
        for (int m : pattern.very_strong[j])
            ic.gains[m][j] = std::polar(std::sqrt(vs_g2[m][j]), phase[m][j]);
    }
    out.ic = std::move(ic);
    return out;
}

inline GeneratedInstance random_conforming_instance(int k, std::uint64_t seed,
                                                    const std::vector<double>& powers_hint = {}) {
    if (k < 3) throw PreconditionError("random_conforming_instance requires k >= 3");
    return random_instance_for_pattern(cyclic_pattern(k), seed, powers_hint);
}

}  // namespace icregion
