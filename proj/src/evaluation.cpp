#include "seqjde/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "seqjde/errors.hpp"
#include "seqjde/seeding.hpp"

namespace seqjde {
namespace {

// Calls absorb(m0, m1, prob) for every stop state with the probability of
// reaching it when bits are i.i.d. Bernoulli(rho). Returns the total absorbed.
template <class Absorb>
double propagate(const Policy& policy, double rho, Absorb&& absorb) {
    const int n = policy.m_bar();
    std::vector<double> cur(static_cast<std::size_t>(n) + 2, 0.0);
    std::vector<double> nxt(static_cast<std::size_t>(n) + 2, 0.0);
    cur[0] = 1.0;
    double total = 0.0;
    for (int m = 0; m <= n; ++m) {
        std::fill(nxt.begin(), nxt.begin() + m + 2, 0.0);
        for (int m1 = 0; m1 <= m; ++m1) {
            const double p = cur[m1];
            if (p == 0.0) continue;
            const int m0 = m - m1;
            if (policy.stop(m0, m1)) {
                absorb(m0, m1, p);
                total += p;
            } else {
                nxt[m1 + 1] += p * rho;
                nxt[m1] += p * (1.0 - rho);
            }
        }
        std::swap(cur, nxt);
    }
    return total;
}

double asn_under(const Policy& policy, double rho, double& mass) {
    double asn = 0.0;
    mass = propagate(policy, rho, [&](int m0, int m1, double p) { asn += p * (m0 + m1); });
    return asn;
}

double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
}

double stderr_of_mean(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

OperatingCharacteristics exact_oc(const ProblemSpec& spec, const Policy& policy,
                                  std::span<const double> rho_list) {
    if (policy.m_bar() != spec.m_bar)
        throw ContractError("exact_oc: policy horizon does not match the problem spec");
    if (policy.decision.m_bar() != spec.m_bar || policy.estimate.m_bar() != spec.m_bar)
        throw ContractError("exact_oc: policy tables are inconsistent");

    OperatingCharacteristics oc;
    double type_I = 0.0;
    oc.absorbed_mass.push_back(propagate(policy, 0.5, [&](int m0, int m1, double p) {
        if (policy.decision(m0, m1)) type_I += p;
    }));
    oc.type_I = type_I;

    for (std::size_t k = 0; k < spec.K(); ++k) {
        const double target = 1.0 / spec.rho[k];
        double miss = 0.0, sq = 0.0;
        oc.absorbed_mass.push_back(propagate(policy, spec.rho[k], [&](int m0, int m1, double p) {
            if (!policy.decision(m0, m1)) miss += p;
            const double d = policy.estimate(m0, m1) - target;
            sq += p * d * d;
        }));
        oc.type_II.push_back(miss);
        oc.mse.push_back(sq);
    }

    double mass = 0.0;
    oc.asn_star = asn_under(policy, spec.rho_star, mass);
    oc.absorbed_mass.push_back(mass);
    for (double r : rho_list) {
        oc.asn.push_back(asn_under(policy, r, mass));
        oc.asn_rho.push_back(r);
        oc.absorbed_mass.push_back(mass);
    }
    return oc;
}

double lagrangian_cost(const OperatingCharacteristics& oc, const Multipliers& mult) {
    if (mult.K() != oc.type_II.size()) throw ContractError("lagrangian_cost: dimension mismatch");
    double cost = oc.asn_star;
    if (mult.lambda0 != 0.0) cost += mult.lambda0 * oc.type_I;
    for (std::size_t k = 0; k < mult.K(); ++k) {
        if (mult.lambda[k] != 0.0) cost += mult.lambda[k] * oc.type_II[k];
        if (mult.mu[k] != 0.0) cost += mult.mu[k] * oc.mse[k];
    }
    return cost;
}

TrialRecord run_trial(const Policy& policy, const SignalModel& model, std::uint64_t seed) {
    TrialRecord rec;
    rec.true_theta = model.theta();
    rec.seed = seed;
    int m0 = 0, m1 = 0;
    if (!policy.stop(0, 0)) {
        auto src = make_gaussian_sources(model, seed);
        auto [state, bit] = init_race(src.obs, src.ref);
        for (;;) {
            (bit ? m1 : m0) += 1;
            if (policy.stop(m0, m1)) break;
            bit = next_bit(state, src.obs, src.ref);
        }
        rec.n_obs = state.n_obs;
        rec.n_ref = state.n_ref;
    }
    rec.M = m0 + m1;
    rec.decision = policy.decision(m0, m1);
    rec.theta_tilde = policy.estimate(m0, m1);
    if (rec.decision == 1) rec.theta_hat = snr_from_estimate(rec.theta_tilde);
    return rec;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t row, std::uint64_t trial) {
    return derive_seed({base_seed, row, trial});
}

SweepRow summarize(std::span<const TrialRecord> trials, double theta_linear, bool is_h0,
                   std::uint64_t base_seed) {
    SweepRow row;
    row.is_h0 = is_h0;
    row.theta_linear = theta_linear;
    row.theta_db = is_h0 ? -std::numeric_limits<double>::infinity() : linear_to_db(theta_linear);
    row.trials = trials.size();
    row.seed = base_seed;

    std::vector<double> err, rel, rel_det, sq, Ms, nobs, nref;
    const double target = theta_linear + 2.0;
    for (const auto& t : trials) {
        err.push_back(is_h0 ? double(t.decision == 1) : double(t.decision == 0));
        Ms.push_back(t.M);
        nobs.push_back(static_cast<double>(t.n_obs));
        nref.push_back(static_cast<double>(t.n_ref));
        const double d = t.theta_tilde - target;
        sq.push_back(d * d);
        if (!is_h0) {
            const double e = (t.theta_tilde - 2.0 - theta_linear) / theta_linear;
            rel.push_back(e * e);
            if (t.decision == 1) rel_det.push_back(e * e);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.err_prob = mean(err);
    row.err_prob_stderr =
        trials.empty() ? 0.0 : std::sqrt(row.err_prob * (1.0 - row.err_prob) / double(trials.size()));
    row.rel_mse = is_h0 ? nan : mean(rel);
    row.rel_mse_stderr = is_h0 ? nan : stderr_of_mean(rel);
    row.rel_mse_detected = rel_det.empty() ? nan : mean(rel_det);
    row.mse = mean(sq);
    row.mse_stderr = stderr_of_mean(sq);
    row.mean_M = mean(Ms);
    row.mean_M_stderr = stderr_of_mean(Ms);
    row.mean_n_obs = mean(nobs);
    row.mean_n_ref = mean(nref);
    return row;
}

SweepReport sweep(const Policy& policy, std::span<const double> theta_list_db,
                  const SweepOptions& options) {
    if (options.trials < 1) throw DomainError("sweep: trials must be >= 1");
    SweepReport report;
    std::vector<TrialRecord> recs(options.trials);
    auto run_row = [&](std::uint64_t row, double theta, bool h0) {
        const auto model = h0 ? SignalModel(0.0, options.sigma_w_sq)
                              : SignalModel::from_theta(theta, options.sigma_w_sq);
        for (std::uint64_t t = 0; t < options.trials; ++t)
            recs[t] = run_trial(policy, model, trial_seed(options.base_seed, row, t));
        report.rows.push_back(summarize(recs, theta, h0, options.base_seed));
    };
    run_row(0, 0.0, true);
    for (std::size_t i = 0; i < theta_list_db.size(); ++i) {
        run_row(i + 1, db_to_linear(theta_list_db[i]), false);
        report.rows.back().theta_db = theta_list_db[i];
    }
    return report;
}

std::vector<double> db_range(double lo, double hi, double step) {
    if (!(step > 0.0)) throw DomainError("db_range: step must be > 0");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
    os << "theta_db,theta_linear,trials,err_prob,err_prob_stderr,rel_mse,rel_mse_stderr,"
          "mean_M,mean_n_obs,mean_n_ref,seed,rel_mse_detected\n";
    for (const auto& r : report.rows) {
        os << (r.is_h0 ? std::string("H0") : fmt(r.theta_db)) << ',' << fmt(r.theta_linear) << ','
           << r.trials << ',' << fmt(r.err_prob) << ',' << fmt(r.err_prob_stderr) << ','
           << (r.is_h0 ? std::string() : fmt(r.rel_mse)) << ','
           << (r.is_h0 ? std::string() : fmt(r.rel_mse_stderr)) << ',' << fmt(r.mean_M) << ','
           << fmt(r.mean_n_obs) << ',' << fmt(r.mean_n_ref) << ',' << r.seed << ','
           << (r.is_h0 ? std::string() : fmt(r.rel_mse_detected)) << '\n';
    }
}

}  // namespace seqjde
