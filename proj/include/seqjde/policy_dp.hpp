#pragma once

#include <cstdint>
#include <vector>

#include "seqjde/problem.hpp"
#include "seqjde/triangle.hpp"

namespace seqjde {

// Log likelihood ratios of a state (m0 zeros, m1 ones) under rho = 0.5
// and under each grid rho[k], both relative to the nominal rho_star.
struct LogLikelihoodRatios {
    double log_z0 = 0.0;
    std::vector<double> log_zk;
};

LogLikelihoodRatios log_likelihoods(const ProblemSpec& spec, int m0, int m1);

// E_lambda = sum_k lambda_k Z_k and E_mu_i = sum_k rho_k^-i mu_k Z_k.
struct Aggregates {
    double e_lambda = 0.0;
    double e_mu0 = 0.0;
    double e_mu1 = 0.0;
    double e_mu2 = 0.0;
};

Aggregates aggregates(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1);

// 1 iff lambda0 * Z0 <= E_lambda.
int decide(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1);

// theta_tilde = E_mu1 / E_mu0, an estimate of 1/rho = theta + 2.
// Throws EstimatorUndefined when every mu_k is zero.
double estimate(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1);

// SNR estimate reported to users.
inline double snr_from_estimate(double theta_tilde) { return theta_tilde - 2.0; }

// Cost of stopping now with the optimal decision and estimate.
double stop_cost_G(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1);

// Stop/decide/estimate rules over the trellis. Every state on the
// boundary m0 + m1 = m_bar stops.
struct Policy {
    Triangle<std::uint8_t> stop;
    Triangle<std::uint8_t> decision;
    Triangle<double> estimate;  // equal grid weights when every mu_k is zero

    int m_bar() const noexcept { return stop.m_bar(); }
};

struct PolicyTables {
    Policy policy;
    Triangle<double> G;  // cost of stopping now
    Triangle<double> R;  // optimal cost-to-go
    double L = 0.0;      // R(0, 0)

    int m_bar() const noexcept { return policy.m_bar(); }
};

struct BuildOptions {
    int max_m_bar = 4000;
    // psi = stop when G - R <= stop_tie_tol * (1 + G)
    double stop_tie_tol = 1e-12;
};

// Backward recursion over the trellis. Throws ResourceLimit when
// spec.m_bar exceeds options.max_m_bar.
PolicyTables build_tables(const ProblemSpec& spec, const Multipliers& mult,
                          const BuildOptions& options = {});

// R(0, 0) without keeping the tables around.
double L_value(const ProblemSpec& spec, const Multipliers& mult, const BuildOptions& options = {});

}  // namespace seqjde
