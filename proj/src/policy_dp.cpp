#include "seqjde/policy_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqjde/errors.hpp"
#include "seqjde/log_math.hpp"
#include "state_evaluator.hpp"

namespace seqjde {
namespace detail {

StateEvaluator::StateEvaluator(const ProblemSpec& spec, const Multipliers& mult)
    : K_(spec.K()),
      step0_zero_(std::log(0.5 / (1.0 - spec.rho_star))),
      step1_zero_(std::log(0.5 / spec.rho_star)),
      log_lambda0_(safe_log(mult.lambda0)),
      zero_w_(spec.K(), 0.0),
      lz_(spec.K()),
      scratch_(spec.K()) {
    mult.check_against(spec);
    for (std::size_t k = 0; k < K_; ++k) {
        const double r = spec.rho[k];
        step0_.push_back(std::log((1.0 - r) / (1.0 - spec.rho_star)));
        step1_.push_back(std::log(r / spec.rho_star));
        inv_rho_.push_back(1.0 / r);
        log_lambda_.push_back(safe_log(mult.lambda[k]));
        log_mu_.push_back(safe_log(mult.mu[k]));
        if (mult.lambda[k] > 0.0) lambda_idx_.push_back(k);
        if (mult.mu[k] > 0.0) mu_idx_.push_back(k);
        all_idx_.push_back(k);
    }
}

void StateEvaluator::fill_log_z(int m0, int m1) {
    for (std::size_t k = 0; k < K_; ++k) lz_[k] = log_zk(k, m0, m1);
}

double StateEvaluator::log_weighted_sum(const std::vector<std::size_t>& idx,
                                        const std::vector<double>& log_w, double& max_out) {
    max_out = kNegInf;
    if (idx.empty()) return kNegInf;
    for (std::size_t k : idx) {
        scratch_[k] = log_w[k] + lz_[k];
        max_out = std::max(max_out, scratch_[k]);
    }
    double s = 0.0;
    for (std::size_t k : idx) {
        scratch_[k] = std::exp(scratch_[k] - max_out);
        s += scratch_[k];
    }
    return max_out + std::log(s);
}

StateEvaluator::Values StateEvaluator::eval(int m0, int m1) {
    fill_log_z(m0, m1);
    Values out{};

    double shift = 0.0;
    const double log_e_lambda = log_weighted_sum(lambda_idx_, log_lambda_, shift);
    const double log_h0 = log_lambda0_ + log_z0(m0, m1);
    out.decision = (log_h0 <= log_e_lambda) ? 1 : 0;
    const double detection = std::exp(std::min(log_h0, log_e_lambda));

    const bool weighted = !mu_idx_.empty();
    const auto& idx = weighted ? mu_idx_ : all_idx_;
    log_weighted_sum(idx, weighted ? log_mu_ : zero_w_, shift);
    // scratch_ now holds the shifted weights exp(w_k - shift).
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t k : idx) {
        s0 += scratch_[k];
        s1 += scratch_[k] * inv_rho_[k];
    }
    const double est = std::clamp(s1 / s0, inv_rho_[idx.back()], inv_rho_[idx.front()]);
    out.estimate = est;
    double estimation = 0.0;
    if (weighted) {
        double spread = 0.0;
        for (std::size_t k : idx) {
            const double d = inv_rho_[k] - est;
            spread += scratch_[k] * d * d;
        }
        if (spread > 0.0) estimation = std::exp(shift + std::log(spread));
    }
    out.G = detection + estimation;
    return out;
}

Aggregates StateEvaluator::aggregates(int m0, int m1) {
    fill_log_z(m0, m1);
    Aggregates a;
    double shift = 0.0;
    a.e_lambda = std::exp(log_weighted_sum(lambda_idx_, log_lambda_, shift));
    if (!mu_idx_.empty()) {
        log_weighted_sum(mu_idx_, log_mu_, shift);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t k : mu_idx_) {
            s0 += scratch_[k];
            s1 += scratch_[k] * inv_rho_[k];
            s2 += scratch_[k] * inv_rho_[k] * inv_rho_[k];
        }
        const double scale = std::exp(shift);
        a.e_mu0 = scale * s0;
        a.e_mu1 = scale * s1;
        a.e_mu2 = scale * s2;
    }
    return a;
}

}  // namespace detail

LogLikelihoodRatios log_likelihoods(const ProblemSpec& spec, int m0, int m1) {
    if (m0 < 0 || m1 < 0) throw DomainError("log_likelihoods: counts must be >= 0");
    LogLikelihoodRatios out;
    out.log_z0 = m0 * std::log(0.5 / (1.0 - spec.rho_star)) + m1 * std::log(0.5 / spec.rho_star);
    for (double r : spec.rho)
        out.log_zk.push_back(m0 * std::log((1.0 - r) / (1.0 - spec.rho_star)) +
                             m1 * std::log(r / spec.rho_star));
    return out;
}

Aggregates aggregates(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1) {
    detail::StateEvaluator ev(spec, mult);
    return ev.aggregates(m0, m1);
}

int decide(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1) {
    detail::StateEvaluator ev(spec, mult);
    return ev.eval(m0, m1).decision;
}

double estimate(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1) {
    detail::StateEvaluator ev(spec, mult);
    if (!ev.estimator_defined())
        throw EstimatorUndefined("estimate: every estimation multiplier is zero");
    return ev.eval(m0, m1).estimate;
}

double stop_cost_G(const ProblemSpec& spec, const Multipliers& mult, int m0, int m1) {
    detail::StateEvaluator ev(spec, mult);
    return ev.eval(m0, m1).G;
}

namespace {

void check_horizon(const ProblemSpec& spec, const BuildOptions& options) {
    spec.validate();
    if (spec.m_bar > options.max_m_bar)
        throw ResourceLimit("m_bar = " + std::to_string(spec.m_bar) + " exceeds the maximum " +
                            std::to_string(options.max_m_bar));
}

bool is_stop(double G, double R, double tol) {
    if (!std::isfinite(G)) return false;
    return G - R <= tol * (1.0 + G);
}

}  // namespace

PolicyTables build_tables(const ProblemSpec& spec, const Multipliers& mult,
                          const BuildOptions& options) {
    check_horizon(spec, options);
    detail::StateEvaluator ev(spec, mult);
    const int n = spec.m_bar;
    const double p1 = spec.rho_star;
    const double p0 = 1.0 - spec.rho_star;

    PolicyTables t;
    t.policy.stop = Triangle<std::uint8_t>(n, 0);
    t.policy.decision = Triangle<std::uint8_t>(n, 0);
    t.policy.estimate = Triangle<double>(n, 0.0);
    t.G = Triangle<double>(n, 0.0);
    t.R = Triangle<double>(n, 0.0);

    for (int m = n; m >= 0; --m) {
        for (int m1 = 0; m1 <= m; ++m1) {
            const int m0 = m - m1;
            const auto v = ev.eval(m0, m1);
            t.G(m0, m1) = v.G;
            t.policy.decision(m0, m1) = static_cast<std::uint8_t>(v.decision);
            t.policy.estimate(m0, m1) = v.estimate;
            if (m == n) {
                t.R(m0, m1) = v.G;
                t.policy.stop(m0, m1) = 1;
                continue;
            }
            const double cont = 1.0 + p1 * t.R(m0, m1 + 1) + p0 * t.R(m0 + 1, m1);
            const double r = std::min(v.G, cont);
            t.R(m0, m1) = r;
            t.policy.stop(m0, m1) = is_stop(v.G, r, options.stop_tie_tol) ? 1 : 0;
        }
    }
    t.L = t.R(0, 0);
    return t;
}

double L_value(const ProblemSpec& spec, const Multipliers& mult, const BuildOptions& options) {
    check_horizon(spec, options);
    detail::StateEvaluator ev(spec, mult);
    const int n = spec.m_bar;
    const double p1 = spec.rho_star;
    const double p0 = 1.0 - spec.rho_star;

    // R on the diagonal below, indexed by m1.
    std::vector<double> next(static_cast<std::size_t>(n) + 1);
    std::vector<double> cur(static_cast<std::size_t>(n) + 1);
    for (int m1 = 0; m1 <= n; ++m1) next[m1] = ev.eval(n - m1, m1).G;
    for (int m = n - 1; m >= 0; --m) {
        for (int m1 = 0; m1 <= m; ++m1) {
            const double g = ev.eval(m - m1, m1).G;
            // (m0, m1+1) sits at index m1+1 of diagonal m+1, (m0+1, m1) at index m1.
            cur[m1] = std::min(g, 1.0 + p1 * next[m1 + 1] + p0 * next[m1]);
        }
        std::swap(cur, next);
    }
    return next[0];
}

}  // namespace seqjde
