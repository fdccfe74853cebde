#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "icregion/channel.hpp"
#include "icregion/conditions.hpp"
#include "icregion/rng.hpp"
#include "icregion/verify.hpp"
#include "test_helpers.hpp"

using namespace icregion;

namespace {

DegradedPairSpec binary_degraded_spec(std::mt19937_64* gen, double flip) {
    DegradedPairSpec spec;
    spec.input_sizes = {2, 2, 2};
    spec.sender = 0;
    spec.rx_a = 0;
    spec.rx_b = 1;
    spec.ny_a = 2;
    for (int row = 0; row < 8; ++row) {
        if (gen) {
            spec.base.push_back(sample_simplex(*gen, 2));
        } else {
            // noisy XOR of the three inputs
            const int parity = (row ^ (row >> 1) ^ (row >> 2)) & 1;
            spec.base.push_back(parity ? std::vector<double>{0.2, 0.8}
                                       : std::vector<double>{0.8, 0.2});
        }
    }
    for (int ctx = 0; ctx < 4; ++ctx) {
        if (gen) {
            spec.degrade.push_back({sample_simplex(*gen, 2), sample_simplex(*gen, 2)});
        } else {
            spec.degrade.push_back({{1.0 - flip, flip}, {flip, 1.0 - flip}});
        }
    }
    return spec;
}

}  // namespace

TEST_CASE("SYM3 classifies as Case 1 with the worked margins") {
    const auto cls = classify_gaussian(fixtures::sym3());
    REQUIRE(cls.ok);
    CHECK(cls.case_label == "case1");
    CHECK(cls.pattern.strong == std::vector<int>{1, 2, 0});
    CHECK(cls.pattern.very_strong == std::vector<std::vector<int>>{{2}, {0}, {1}});
    const auto rep = check_conditions(fixtures::sym3(), cls.pattern);
    REQUIRE(rep.pass);
    REQUIRE(rep.items.size() == 6);
    for (const auto& item : rep.items) {
        if (item.kind == LinkKind::Strong)
            CHECK(item.margin == Catch::Approx(0.0).margin(1e-15));
        else
            CHECK(item.margin == Catch::Approx(1.0).margin(1e-15));
    }
}

TEST_CASE("CASE2 instance classifies as Case 2") {
    const auto cls = classify_gaussian(fixtures::case2());
    REQUIRE(cls.ok);
    CHECK(cls.case_label == "case2");
    CHECK(cls.pattern.strong == std::vector<int>{1, 0, 0});
    CHECK(cls.pattern.very_strong == std::vector<std::vector<int>>{{2}, {2}, {1}});
    for (const auto& item : check_conditions(fixtures::case2(), cls.pattern).items)
        if (item.kind == LinkKind::VeryStrong)
            CHECK(item.margin == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("K4 instance has very-strong margins 0.375") {
    const auto cls = classify_gaussian(fixtures::k4());
    REQUIRE(cls.ok);
    CHECK(cls.pattern.strong == std::vector<int>{1, 2, 3, 0});
    for (const auto& item : check_conditions(fixtures::k4(), cls.pattern).items) {
        if (item.kind == LinkKind::VeryStrong)
            CHECK(item.margin == Catch::Approx(0.375).margin(1e-12));
        else
            CHECK(item.margin == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("check_conditions flags swapped roles") {
    // Swap strong and very strong at receiver 2: user 3 must then be very
    // strong there, but |h32|^2 = 1 < 1 + P2 + |h12|^2 P1 = 6.
    InterferencePattern swapped{{1, 0, 0}, {{2}, {2}, {1}}};
    const auto rep = check_conditions(fixtures::sym3(), swapped);
    CHECK_FALSE(rep.pass);
    bool found = false;
    for (const auto& item : rep.items)
        if (item.receiver == 1 && item.user == 2 && item.kind == LinkKind::VeryStrong) {
            found = true;
            CHECK(item.margin == Catch::Approx(-5.0).margin(1e-12));
        }
    CHECK(found);
}

TEST_CASE("weak interference fails at every receiver") {
    GaussianIC ic;
    ic.k = 3;
    ic.powers = {1.0, 1.0, 1.0};
    ic.gains.assign(3, std::vector<cplx>(3, cplx(0, 0)));
    for (int j = 0; j < 3; ++j) ic.gains[j][j] = cplx(1, 0);
    const auto cls = classify_gaussian(ic);
    CHECK_FALSE(cls.ok);
    CHECK(cls.uncoverable_receivers == std::vector<int>{0, 1, 2});
}

TEST_CASE("broken SYM3 cannot cover receiver 2") {
    const auto cls = classify_gaussian(fixtures::sym3_broken());
    CHECK_FALSE(cls.ok);
    CHECK(cls.uncoverable_receivers == std::vector<int>{1});
}

TEST_CASE("gain-domain margins match the MI inequality sign") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        std::mt19937_64 gen(derive_seed(seed, 0x516));
        std::uniform_real_distribution<double> u(0.2, 2.2);
        GaussianIC ic;
        ic.k = 3;
        ic.powers = {u(gen), u(gen), u(gen)};
        ic.gains.assign(3, std::vector<cplx>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) ic.gains[i][j] = i == j ? cplx(1, 0) : cplx(u(gen), u(gen));
        for (int m = 0; m < 3; ++m)
            for (int j = 0; j < 3; ++j) {
                if (m == j) continue;
                std::vector<int> others;
                for (int i = 0; i < 3; ++i)
                    if (i != m) others.push_back(i);
                const double mi_diff =
                    gaussian_mi(ic, {{m}, j, {}}) - gaussian_mi(ic, {{m}, m, others});
                const double margin = very_strong_margin(ic, m, j);
                if (std::abs(mi_diff) > 1e-12) CHECK((margin > 0) == (mi_diff > 0));
            }
    }
}

TEST_CASE("valid 3-user patterns always match one of the paper labelings") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto gi = random_conforming_instance(3, derive_seed(seed, 0xAB));
        const auto cls = classify_gaussian(gi.ic);
        REQUIRE(cls.ok);
        for (const auto& pat : all_valid_patterns(cls)) {
            bool is_case1 = false;
            std::vector<int> perm;
            CHECK(match_paper_labeling(pat, is_case1, perm));
        }
    }
}

TEST_CASE("ADDER3 condition gaps never go negative") {
    const auto rep = dmic_condition_gap(fixtures::adder3(), fixtures::cycle3(), 1000, 4);
    CHECK_FALSE(rep.any_violation);
    CHECK(rep.n_distributions == 1 + 8 + 1000);
    for (const auto& item : rep.items) {
        CHECK(item.min_gap >= -1e-12);
        CHECK(item.verdict == "sampled-pass");
    }
    SECTION("strong gaps sit at exactly zero") {
        for (const auto& item : rep.items)
            if (item.kind == LinkKind::Strong) CHECK(std::abs(item.min_gap) <= 1e-12);
    }
}

TEST_CASE("a receiver that ignores its very strong interferer is certified violated") {
    auto ch = fixtures::adder3();
    // Receiver 2 now outputs only its own adder term, ignoring X_1 entirely.
    for (int row = 0; row < 8; ++row) {
        const int x[3] = {row >> 2 & 1, row >> 1 & 1, row & 1};
        auto& t = ch.transitions[1][row];
        std::fill(t.begin(), t.end(), 0.0);
        t[x[1] + 2 * x[2]] = 1.0;
    }
    const auto rep = dmic_condition_gap(ch, fixtures::cycle3(), 50, 4);
    CHECK(rep.any_violation);
    bool found = false;
    for (const auto& item : rep.items)
        if (item.receiver == 1 && item.user == 0 && item.kind == LinkKind::VeryStrong) {
            found = true;
            CHECK(item.verdict == "violated");
            // Violated already at the uniform distribution, by a full bit.
            CHECK(item.min_gap < -0.5);
        }
    CHECK(found);
}

TEST_CASE("lemma 1 extension check") {
    SECTION("identity degradation gives exactly zero gaps") {
        auto spec = binary_degraded_spec(nullptr, 0.0);
        spec.degrade.assign(4, {{1.0, 0.0}, {0.0, 1.0}});
        const auto ch = make_degraded_pair(spec);
        const auto rep = lemma1_extension_check(ch, 0, 0, 1, 30, 9);
        CHECK(std::abs(rep.min_gap) <= 1e-12);
    }
    SECTION("BSC(0.1) post-channel keeps the n=2 inequality") {
        const auto ch = make_degraded_pair(binary_degraded_spec(nullptr, 0.1));
        const auto rep = lemma1_extension_check(ch, 0, 0, 1, 60, 10);
        CHECK(rep.min_gap >= -1e-10);
        CHECK(rep.n_distributions == 61);
    }
    SECTION("context-dependent degradation also satisfies the inequality") {
        std::mt19937_64 gen(77);
        const auto ch = make_degraded_pair(binary_degraded_spec(&gen, 0.0));
        CHECK(lemma1_extension_check(ch, 0, 0, 1, 60, 11).min_gap >= -1e-10);
    }
    SECTION("untagged channels are rejected") {
        CHECK_THROWS_AS(lemma1_extension_check(fixtures::adder3(), 0, 0, 1, 10, 1),
                        PreconditionError);
        const auto ch = make_degraded_pair(binary_degraded_spec(nullptr, 0.1));
        CHECK_THROWS_AS(lemma1_extension_check(ch, 1, 0, 1, 10, 1), PreconditionError);
    }
}

TEST_CASE("lemma 2 spot check") {
    SECTION("SYM3 shows no violation") {
        Lemma2Options opts;
        opts.mc_samples = 4000;
        const auto rep = lemma2_spot_check(fixtures::sym3(), 4, 3, 21, opts);
        CHECK(rep.violations == 0);
        CHECK(rep.n_trials == 3);
        CHECK(rep.items.size() == 6);
    }
    SECTION("h12 = 1 breaks the discrete very-strong condition at the uniform pmf") {
        auto ic = fixtures::sym3();
        ic.gains[0][1] = cplx(1, 0);
        Lemma2Options opts;
        opts.mc_samples = 4000;
        opts.skip_condition_check = true;
        const auto rep = lemma2_spot_check(ic, 4, 1, 22, opts);
        CHECK(rep.violations >= 1);
        bool found = false;
        for (const auto& item : rep.items)
            if (item.receiver == 1 && item.user == 0 && item.kind == LinkKind::VeryStrong) {
                found = true;
                CHECK(item.min_studentized < -3.0);
                CHECK(item.min_gap < -0.1);
            }
        CHECK(found);
    }
    SECTION("zero powers make every gap zero") {
        auto ic = fixtures::sym3();
        ic.powers = {0.0, 0.0, 0.0};
        Lemma2Options opts;
        opts.mc_samples = 2000;
        const auto rep = lemma2_spot_check(ic, 3, 2, 23, opts);
        CHECK(rep.violations == 0);
        CHECK(rep.min_studentized == 0.0);
    }
    SECTION("non-conforming instances are rejected without the skip flag") {
        CHECK_THROWS_AS(lemma2_spot_check(fixtures::sym3_broken(), 4, 1, 1), PreconditionError);
    }
}
