#include <gtest/gtest.h>

#include <cmath>

#include "seqjde/errors.hpp"
#include "seqjde/problem.hpp"
#include "seqjde/triangle.hpp"

namespace seqjde {
namespace {

bool has_issue(const ValidationError& e, const std::string& path) {
    for (const auto& i : e.issues())
        if (i.path == path) return true;
    return false;
}

TEST(Units, DecibelRoundTrip) {
    EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
    EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
    EXPECT_NEAR(linear_to_db(db_to_linear(-3.0)), -3.0, 1e-12);
}

TEST(Units, GammaFromRelativeBound) {
    // theta = 10 at rho = 1/12: gamma = c * theta^2
    EXPECT_NEAR(gamma_from_c(0.25, 1.0 / 12.0), 25.0, 1e-12);
}

TEST(ProblemSpec, FromDbSortsByRho) {
    const std::vector<double> grid{-3, 0, 3, 10};
    const std::vector<double> beta{0.05};
    const auto s = ProblemSpec::from_db(grid, 3.0, 0.05, beta, 0.25, {}, 400);
    ASSERT_EQ(s.K(), 4u);
    EXPECT_NEAR(s.rho.front(), 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(s.rho.back(), 1.0 / (std::pow(10.0, -0.3) + 2.0), 1e-15);
    EXPECT_NEAR(s.rho.back(), 0.399810, 1e-6);
    EXPECT_DOUBLE_EQ(s.rho_max, s.rho.back());
    EXPECT_NEAR(s.rho_star, 0.25029, 1e-5);
    EXPECT_NEAR(s.gamma.front(), 25.0, 1e-12);
    for (std::size_t k = 1; k < s.K(); ++k) EXPECT_GT(s.rho[k], s.rho[k - 1]);
}

TEST(ProblemSpec, PerPointBetaFollowsGrid) {
    const std::vector<double> grid{0, 10};
    const std::vector<double> beta{0.1, 0.2};
    const auto s = ProblemSpec::from_db(grid, 3.0, 0.05, beta, 0.25, {}, 10);
    // rho order puts 10 dB first.
    EXPECT_DOUBLE_EQ(s.beta[0], 0.2);
    EXPECT_DOUBLE_EQ(s.beta[1], 0.1);
}

TEST(ProblemSpec, ExplicitGamma) {
    const std::vector<double> grid{0, 10};
    const std::vector<double> beta{0.05};
    const std::vector<double> gamma{1.0, 2.0};
    const auto s = ProblemSpec::from_db(grid, 3.0, 0.05, beta, std::nullopt, gamma, 10);
    EXPECT_DOUBLE_EQ(s.gamma[0], 2.0);
    EXPECT_DOUBLE_EQ(s.gamma[1], 1.0);
    EXPECT_FALSE(s.c.has_value());
}

TEST(ProblemSpec, ValidationNamesEveryField) {
    ProblemSpec s;
    s.alpha = 1.5;
    s.rho = {0.3, 0.2};
    s.beta = {0.05};
    s.gamma = {1.0, -1.0};
    s.rho_max = 0.25;
    s.m_bar = 0;
    try {
        s.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_TRUE(has_issue(e, "alpha"));
        EXPECT_TRUE(has_issue(e, "beta"));
        EXPECT_TRUE(has_issue(e, "gamma[1]"));
        EXPECT_TRUE(has_issue(e, "rho[0]"));
        EXPECT_TRUE(has_issue(e, "rho[1]"));
        EXPECT_TRUE(has_issue(e, "m_bar"));
    }
}

TEST(ProblemSpec, RejectsZeroRho) {
    ProblemSpec s;
    s.rho = {0.0};
    s.beta = {0.05};
    s.gamma = {1.0};
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Multipliers, FlatLayoutRoundTrip) {
    Multipliers m{1.0, {2.0, 3.0}, {4.0, 5.0}};
    const auto flat = m.flatten();
    EXPECT_EQ(flat, (std::vector<double>{1, 2, 3, 4, 5}));
    const auto back = Multipliers::unflatten(flat, 2);
    EXPECT_EQ(back.flatten(), flat);
    EXPECT_THROW(Multipliers::unflatten(flat, 3), ContractError);
}

TEST(Multipliers, ContractChecks) {
    ProblemSpec s;
    s.rho = {0.2};
    s.beta = {0.05};
    s.gamma = {1.0};
    EXPECT_NO_THROW((Multipliers{1.0, {1.0}, {0.0}}.check_against(s)));
    EXPECT_THROW((Multipliers{-1.0, {1.0}, {0.0}}.check_against(s)), ContractError);
    EXPECT_THROW((Multipliers{1.0, {1.0, 2.0}, {0.0, 0.0}}.check_against(s)), ContractError);
    EXPECT_TRUE((Multipliers{1.0, {1.0}, {0.0}}.all_mu_zero()));
}

TEST(Triangle, AntiDiagonalIndexing) {
    EXPECT_EQ(Triangle<int>::size_for(0), 1u);
    EXPECT_EQ(Triangle<int>::size_for(3), 10u);
    EXPECT_EQ(Triangle<int>::index(0, 0), 0u);
    EXPECT_EQ(Triangle<int>::index(1, 0), 1u);
    EXPECT_EQ(Triangle<int>::index(0, 1), 2u);
    EXPECT_EQ(Triangle<int>::index(2, 0), 3u);
    EXPECT_EQ(Triangle<int>::index(0, 3), 9u);
    Triangle<int> t(3, 0);
    int n = 0;
    for (int m = 0; m <= 3; ++m)
        for (int m1 = 0; m1 <= m; ++m1) t(m - m1, m1) = n++;
    for (int i = 0; i < n; ++i) EXPECT_EQ(t.data()[i], i);
}

}  // namespace
}  // namespace seqjde
