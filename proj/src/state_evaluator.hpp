#pragma once

#include <vector>

#include "seqjde/policy_dp.hpp"
#include "seqjde/problem.hpp"

namespace seqjde::detail {

// Per-state quantities of the Lagrangian stopping problem for one fixed
// (spec, multipliers) pair. Everything is carried in the log domain until
// the final aggregate so that m_bar in the hundreds does not overflow.
class StateEvaluator {
public:
    StateEvaluator(const ProblemSpec& spec, const Multipliers& mult);

    struct Values {
        double G;
        int decision;
        // With every mu_k zero the estimate carries no cost; equal grid
        // weights are used so the tables still hold a usable value.
        double estimate;
    };

    Values eval(int m0, int m1);
    Aggregates aggregates(int m0, int m1);

    double log_z0(int m0, int m1) const { return m0 * step0_zero_ + m1 * step1_zero_; }
    double log_zk(std::size_t k, int m0, int m1) const { return m0 * step0_[k] + m1 * step1_[k]; }

    bool estimator_defined() const noexcept { return !mu_idx_.empty(); }

private:
    void fill_log_z(int m0, int m1);
    // log sum_k exp(w_k + log_z_k) over k in idx; sets `max_out` to the shift used.
    double log_weighted_sum(const std::vector<std::size_t>& idx, const std::vector<double>& log_w,
                            double& max_out);

    std::size_t K_;
    double step0_zero_;
    double step1_zero_;
    std::vector<double> step0_;
    std::vector<double> step1_;
    std::vector<double> inv_rho_;
    double log_lambda0_;
    std::vector<double> log_lambda_;
    std::vector<double> log_mu_;
    // Grid points with a strictly positive multiplier.
    std::vector<std::size_t> lambda_idx_;
    std::vector<std::size_t> mu_idx_;
    std::vector<std::size_t> all_idx_;
    std::vector<double> zero_w_;
    std::vector<double> lz_;
    std::vector<double> scratch_;
};

}  // namespace seqjde::detail
