#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "seqjde/errors.hpp"
#include "seqjde/policy_dp.hpp"
#include "test_util.hpp"

namespace seqjde {
namespace {

using test::toy_spec;

TEST(LogLikelihoods, Origin) {
    const auto s = toy_spec({0.2}, 0.25, 3);
    const auto l = log_likelihoods(s, 0, 0);
    EXPECT_EQ(l.log_z0, 0.0);
    EXPECT_EQ(l.log_zk[0], 0.0);
}

TEST(LogLikelihoods, OneZero) {
    const auto s = toy_spec({0.2}, 0.25, 3);
    const auto l = log_likelihoods(s, 1, 0);
    EXPECT_NEAR(std::exp(l.log_z0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::exp(l.log_zk[0]), 16.0 / 15.0, 1e-15);
}

TEST(LogLikelihoods, OneOne) {
    const auto s = toy_spec({0.2}, 0.25, 3);
    const auto l = log_likelihoods(s, 0, 1);
    EXPECT_NEAR(std::exp(l.log_z0), 2.0, 1e-15);
    EXPECT_NEAR(std::exp(l.log_zk[0]), 0.8, 1e-15);
}

TEST(LogLikelihoods, FarStatesStayFinite) {
    const auto s = toy_spec({0.05, 0.4}, 0.25, 4000);
    const auto l = log_likelihoods(s, 0, 4000);
    EXPECT_TRUE(std::isfinite(l.log_zk[0]));
    EXPECT_LT(l.log_zk[0], -700.0);  // would underflow as a plain product
}

TEST(Aggregates, ZeroMultipliers) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    const auto a = aggregates(s, Multipliers::zeros(2), 1, 1);
    EXPECT_EQ(a.e_lambda, 0.0);
    EXPECT_EQ(a.e_mu0, 0.0);
    EXPECT_EQ(a.e_mu1, 0.0);
    EXPECT_EQ(a.e_mu2, 0.0);
}

TEST(Aggregates, HandValuesAtOrigin) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    const Multipliers m{0.0, {0.0, 0.0}, {1.0, 1.0}};
    const auto a = aggregates(s, m, 0, 0);
    EXPECT_NEAR(a.e_mu0, 2.0, 1e-14);
    EXPECT_NEAR(a.e_mu1, 7.5, 1e-14);
    EXPECT_NEAR(a.e_mu2, 31.25, 1e-13);
}

TEST(Decide, FollowsLikelihoodComparison) {
    const auto s = toy_spec({0.2}, 0.25, 3);
    const Multipliers m{1.0, {1.0}, {0.0}};
    EXPECT_EQ(decide(s, m, 1, 0), 1);  // 2/3 <= 16/15
    EXPECT_EQ(decide(s, m, 0, 1), 0);  // 2 > 0.8
}

TEST(Decide, FreeTypeIMeansAlwaysDetect) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 5);
    const Multipliers m{0.0, {1.0, 0.0}, {0.0, 0.0}};
    for (int m0 = 0; m0 <= 5; ++m0)
        for (int m1 = 0; m0 + m1 <= 5; ++m1) EXPECT_EQ(decide(s, m, m0, m1), 1);
}

TEST(Estimate, SinglePoint) {
    const auto s = toy_spec({0.25}, 0.25, 4);
    const Multipliers m{0.0, {0.0}, {2.0}};
    for (int m0 = 0; m0 <= 4; ++m0)
        for (int m1 = 0; m0 + m1 <= 4; ++m1) {
            EXPECT_DOUBLE_EQ(estimate(s, m, m0, m1), 4.0);
            EXPECT_DOUBLE_EQ(snr_from_estimate(estimate(s, m, m0, m1)), 2.0);
        }
}

TEST(Estimate, WeightedMeanAtOrigin) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    const Multipliers m{0.0, {0.0, 0.0}, {1.0, 1.0}};
    EXPECT_NEAR(estimate(s, m, 0, 0), 3.75, 1e-14);
    EXPECT_NEAR(snr_from_estimate(estimate(s, m, 0, 0)), 1.75, 1e-14);
}

TEST(Estimate, UndefinedWithoutEstimationWeight) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    EXPECT_THROW(estimate(s, Multipliers{1.0, {1.0, 1.0}, {0.0, 0.0}}, 0, 0), EstimatorUndefined);
}

TEST(Estimate, TablesFallBackToEqualWeights) {
    // No estimation weight: zero estimation cost, but the tables still
    // carry the equal-weight estimate at every state.
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    const Multipliers m{1.0, {1.0, 1.0}, {0.0, 0.0}};
    const auto t = build_tables(s, m);
    EXPECT_NEAR(t.policy.estimate(0, 0), 3.75, 1e-14);
    EXPECT_NEAR(t.G(0, 0), std::min(1.0, 2.0), 1e-14);
}

TEST(Estimate, StaysWithinGrid) {
    const auto s = toy_spec({0.05, 0.1, 0.2, 0.3, 0.45}, 0.2, 60);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    const Multipliers m{1.0, {1, 1, 1, 1, 1}, {u(rng), u(rng), 0.0, u(rng), u(rng)}};
    const auto t = build_tables(s, m);
    for (int m0 = 0; m0 <= 60; ++m0)
        for (int m1 = 0; m0 + m1 <= 60; ++m1) {
            const double e = t.policy.estimate(m0, m1);
            EXPECT_GE(e, 1.0 / 0.45 - 1e-12);
            EXPECT_LE(e, 1.0 / 0.05 + 1e-12);
        }
}

TEST(StopCost, SinglePointHasNoEstimationCost) {
    const auto s = toy_spec({0.2}, 0.25, 3);
    const Multipliers m{1.0, {3.0}, {5.0}};
    EXPECT_NEAR(stop_cost_G(s, m, 1, 0), std::min(2.0 / 3.0, 3.0 * 16.0 / 15.0), 1e-14);
    EXPECT_NEAR(stop_cost_G(s, m, 0, 1), std::min(2.0, 3.0 * 0.8), 1e-14);
}

TEST(StopCost, ZeroMultipliers) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    EXPECT_EQ(stop_cost_G(s, Multipliers::zeros(2), 2, 1), 0.0);
}

TEST(StopCost, HandValueAtOrigin) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 3);
    const Multipliers m{1.0, {0.0, 0.0}, {1.0, 1.0}};
    EXPECT_NEAR(stop_cost_G(s, m, 0, 0), 3.125, 1e-13);
}

TEST(StopCost, SufficientStatistic) {
    // Any bit order with the same counts lands on the same state, so the
    // quantities computed by walking a shuffled history must agree.
    const auto s = toy_spec({0.1, 0.3}, 0.25, 20);
    const Multipliers m{2.0, {1.0, 3.0}, {0.5, 0.25}};
    std::vector<int> bits{1, 1, 1, 0, 0, 0, 0, 0, 0, 0};
    std::mt19937_64 rng(5);
    const double g_ref = stop_cost_G(s, m, 7, 3);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(bits.begin(), bits.end(), rng);
        int m0 = 0, m1 = 0;
        for (int b : bits) (b ? m1 : m0) += 1;
        EXPECT_EQ(stop_cost_G(s, m, m0, m1), g_ref);
        EXPECT_EQ(decide(s, m, m0, m1), decide(s, m, 7, 3));
        EXPECT_EQ(estimate(s, m, m0, m1), estimate(s, m, 7, 3));
    }
}

TEST(BuildTables, ZeroMultipliersStopImmediately) {
    const auto s = toy_spec({0.2, 0.4}, 0.25, 10);
    const auto t = build_tables(s, Multipliers::zeros(2));
    EXPECT_EQ(t.L, 0.0);
    EXPECT_EQ(t.policy.stop(0, 0), 1);
    for (double r : t.R.data()) EXPECT_EQ(r, 0.0);
    EXPECT_EQ(L_value(s, Multipliers::zeros(2)), 0.0);
}

TEST(BuildTables, BoundaryForcesStop) {
    const auto s = toy_spec({0.1, 0.3}, 0.2, 12);
    const Multipliers m{50.0, {50.0, 50.0}, {10.0, 10.0}};
    const auto t = build_tables(s, m);
    for (int m1 = 0; m1 <= 12; ++m1) {
        EXPECT_EQ(t.policy.stop(12 - m1, m1), 1);
        EXPECT_EQ(t.R(12 - m1, m1), t.G(12 - m1, m1));
    }
}

TEST(BuildTables, SingleStepHorizon) {
    const auto s = toy_spec({0.2}, 0.25, 1);
    const Multipliers m{10.0, {10.0}, {0.0}};
    const auto t = build_tables(s, m);
    const double cont = 1.0 + 0.25 * t.G(0, 1) + 0.75 * t.G(1, 0);
    EXPECT_NEAR(t.L, std::min(t.G(0, 0), cont), 1e-14);
}

TEST(BuildTables, RecursionInvariants) {
    const auto s = toy_spec({0.05, 0.15, 0.3, 0.45}, 0.2, 80);
    const Multipliers m{40.0, {0.0, 5.0, 20.0, 1.0}, {0.5, 2.0, 0.0, 30.0}};
    const auto t = build_tables(s, m);
    for (int m = 0; m <= 80; ++m)
        for (int m1 = 0; m1 <= m; ++m1) {
            const int m0 = m - m1;
            const double G = t.G(m0, m1), R = t.R(m0, m1);
            EXPECT_GE(R, 0.0);
            EXPECT_GE(G, 0.0);
            EXPECT_LE(R, G);
            if (m == 80) continue;
            const double cont = 1.0 + 0.2 * t.R(m0, m1 + 1) + 0.8 * t.R(m0 + 1, m1);
            if (!t.policy.stop(m0, m1)) EXPECT_EQ(R, cont);
            else EXPECT_LE(G - cont, 1e-12 * (1.0 + G));
        }
    EXPECT_EQ(L_value(s, m), t.L);
}

TEST(BuildTables, ResourceLimit) {
    const auto s = toy_spec({0.2}, 0.25, 50);
    BuildOptions o;
    o.max_m_bar = 49;
    EXPECT_THROW(build_tables(s, Multipliers{1, {1}, {1}}, o), ResourceLimit);
    EXPECT_THROW(L_value(s, Multipliers{1, {1}, {1}}, o), ResourceLimit);
}

TEST(BuildTables, DimensionMismatch) {
    const auto s = toy_spec({0.2, 0.3}, 0.25, 5);
    EXPECT_THROW(build_tables(s, Multipliers{1, {1}, {1}}), ContractError);
}

Multipliers random_multipliers(std::mt19937_64& rng, std::size_t K) {
    // Mix of magnitudes, with occasional exact zeros.
    std::uniform_real_distribution<double> mag(-2.0, 2.0);
    std::bernoulli_distribution zero(0.2);
    auto draw = [&] { return zero(rng) ? 0.0 : std::pow(10.0, mag(rng)); };
    Multipliers m = Multipliers::zeros(K);
    m.lambda0 = draw();
    for (std::size_t k = 0; k < K; ++k) {
        m.lambda[k] = draw();
        m.mu[k] = draw();
    }
    return m;
}

TEST(BuildTables, MatchesBruteForceOnSmallTrellis) {
    std::mt19937_64 rng(11);
    for (int m_bar : {1, 2, 3}) {
        for (std::size_t K : {1u, 2u}) {
            const auto s = K == 1 ? toy_spec({0.2}, 0.25, m_bar) : toy_spec({0.15, 0.35}, 0.3, m_bar);
            for (int rep = 0; rep < 5; ++rep) {
                const auto m = random_multipliers(rng, K);
                const double oracle = oracle::brute_force_L(s, m);
                EXPECT_NEAR(L_value(s, m), oracle, 1e-9 * (1.0 + std::abs(oracle)))
                    << "m_bar=" << m_bar << " K=" << K;
            }
        }
    }
}

TEST(LValue, Monotone) {
    const auto s = toy_spec({0.1, 0.25, 0.4}, 0.25, 40);
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        const auto m = random_multipliers(rng, 3);
        const double base = L_value(s, m);
        auto flat = m.flatten();
        for (std::size_t i = 0; i < flat.size(); ++i) {
            auto up = flat;
            up[i] = up[i] * 1.5 + 0.1;
            EXPECT_GE(L_value(s, Multipliers::unflatten(up, 3)), base - 1e-12);
        }
    }
}

TEST(LValue, Concave) {
    const auto s = toy_spec({0.1, 0.25, 0.4}, 0.25, 30);
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = random_multipliers(rng, 3).flatten();
        const auto b = random_multipliers(rng, 3).flatten();
        const double la = L_value(s, Multipliers::unflatten(a, 3));
        const double lb = L_value(s, Multipliers::unflatten(b, 3));
        for (double t : {0.25, 0.5, 0.75}) {
            std::vector<double> mid(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) mid[i] = t * a[i] + (1 - t) * b[i];
            EXPECT_GE(L_value(s, Multipliers::unflatten(mid, 3)), t * la + (1 - t) * lb - 1e-9);
        }
    }
}

}  // namespace
}  // namespace seqjde
