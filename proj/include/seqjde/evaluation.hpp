#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqjde/bernoulli_transform.hpp"
#include "seqjde/policy_dp.hpp"
#include "seqjde/problem.hpp"

namespace seqjde {

// Exact performance of a fixed policy, from forward propagation of
// reach probabilities over the trellis.
struct OperatingCharacteristics {
    double type_I = 0.0;             // P_{0.5}(decide 1)
    std::vector<double> type_II;     // P_{rho_k}(decide 0)
    std::vector<double> mse;         // E_{rho_k}[(theta_tilde - 1/rho_k)^2]
    double asn_star = 0.0;           // E_{rho_star}[M]
    std::vector<double> asn;         // E_rho[M] for each requested rho
    std::vector<double> asn_rho;     // the requested rho values
    // Total stopped probability per measure: 0.5, rho_1..rho_K, rho_star, requested.
    std::vector<double> absorbed_mass;
};

// Throws ContractError when the policy horizon does not match spec.m_bar.
OperatingCharacteristics exact_oc(const ProblemSpec& spec, const Policy& policy,
                                  std::span<const double> rho_list = {});

// ASN at rho_star + lambda0 type_I + sum_k (lambda_k type_II_k + mu_k mse_k).
// Terms with a zero multiplier are skipped, so an undefined estimator is harmless
// when every mu_k is zero.
double lagrangian_cost(const OperatingCharacteristics& oc, const Multipliers& mult);

struct TrialRecord {
    double true_theta = 0.0;
    int decision = 0;
    double theta_tilde = 0.0;            // estimate of 1/rho at the stop state
    std::optional<double> theta_hat;     // theta_tilde - 2, set when decision = 1
    int M = 0;                           // Bernoulli samples used
    std::uint64_t n_obs = 0;
    std::uint64_t n_ref = 0;
    std::uint64_t seed = 0;
};

// One end-to-end run: Gaussian streams -> bits -> trellis walk until the
// first stop state.
TrialRecord run_trial(const Policy& policy, const SignalModel& model, std::uint64_t seed);

struct SweepRow {
    bool is_h0 = false;
    double theta_db = 0.0;
    double theta_linear = 0.0;
    std::uint64_t trials = 0;
    double err_prob = 0.0;  // type-I on the H0 row, type-II elsewhere
    double err_prob_stderr = 0.0;
    double rel_mse = 0.0;   // NaN on the H0 row
    double rel_mse_stderr = 0.0;
    double rel_mse_detected = 0.0;  // conditional on deciding 1; NaN if never
    double mse = 0.0;               // E[(theta_tilde - 1/rho)^2]
    double mse_stderr = 0.0;
    double mean_M = 0.0;
    double mean_M_stderr = 0.0;
    double mean_n_obs = 0.0;
    double mean_n_ref = 0.0;
    std::uint64_t seed = 0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // H0 row first, then one per requested SNR

    const SweepRow& h0() const { return rows.front(); }
};

struct SweepOptions {
    std::uint64_t trials = 10000;
    std::uint64_t base_seed = 1;
    double sigma_w_sq = 1.0;
};

// Seed of trial `trial` in row `row` (row 0 is H0).
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t row, std::uint64_t trial);

// Aggregates a set of trial records into one row.
SweepRow summarize(std::span<const TrialRecord> trials, double theta_linear, bool is_h0,
                   std::uint64_t base_seed);

SweepReport sweep(const Policy& policy, std::span<const double> theta_list_db,
                  const SweepOptions& options);

// Inclusive dB range with a fixed step, robust to accumulated rounding.
std::vector<double> db_range(double lo, double hi, double step);

void write_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace seqjde
