#include "seqjde/dual_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seqjde/errors.hpp"

namespace seqjde {

double dual_objective(const ProblemSpec& spec, const Multipliers& mult, const BuildOptions& build) {
    double d = L_value(spec, mult, build) - mult.lambda0 * spec.alpha;
    for (std::size_t k = 0; k < spec.K(); ++k)
        d -= mult.lambda[k] * spec.beta[k] + mult.mu[k] * spec.gamma[k];
    return d;
}

double dual_objective_flat(const ProblemSpec& spec, std::span<const double> flat,
                           const BuildOptions& build) {
    for (double v : flat)
        if (!(v >= 0.0) || !std::isfinite(v)) return -std::numeric_limits<double>::infinity();
    return dual_objective(spec, Multipliers::unflatten(flat, spec.K()), build);
}

std::vector<std::string> coordinate_names(std::size_t K) {
    std::vector<std::string> names{"lambda0"};
    for (std::size_t k = 1; k <= K; ++k) names.push_back("lambda[" + std::to_string(k) + "]");
    for (std::size_t k = 1; k <= K; ++k) names.push_back("mu[" + std::to_string(k) + "]");
    return names;
}

KktReport kkt_check(const ProblemSpec& spec, const Multipliers& mult, const KktTolerances& tol,
                    const BuildOptions& build) {
    mult.check_against(spec);
    const auto v = mult.flatten();
    const auto names = coordinate_names(spec.K());
    KktReport rep;
    rep.dual_value = dual_objective_flat(spec, v, build);
    rep.activity_threshold = tol.activity_rel * *std::max_element(v.begin(), v.end());
    rep.pass = true;

    auto probe = v;
    auto at = [&](std::size_t i, double value) {
        probe[i] = value;
        const double d = dual_objective_flat(spec, probe, build);
        probe[i] = v[i];
        return d;
    };
    for (std::size_t i = 0; i < v.size(); ++i) {
        KktCoordinate c;
        c.name = names[i];
        c.value = v[i];
        const double h = std::max(1e-4 * std::abs(v[i]), 1e-6);
        c.gradient = (v[i] - h >= 0.0) ? (at(i, v[i] + h) - at(i, v[i] - h)) / (2.0 * h)
                                       : (at(i, v[i] + h) - rep.dual_value) / h;
        c.g_tol = tol.g_factor * (1.0 + std::abs(rep.dual_value)) / std::max(1.0, std::abs(v[i]));
        c.active = v[i] > rep.activity_threshold;
        c.residual = c.active ? std::abs(c.gradient) : std::max(c.gradient, 0.0);
        c.pass = c.residual <= c.g_tol;
        rep.pass = rep.pass && c.pass;
        rep.coords.push_back(c);
    }
    return rep;
}

ConstraintStatus constraint_status(const ProblemSpec& spec, const OperatingCharacteristics& oc) {
    ConstraintStatus s;
    s.value.push_back(oc.type_I);
    s.bound.push_back(spec.alpha);
    for (std::size_t k = 0; k < spec.K(); ++k) {
        s.value.push_back(oc.type_II[k]);
        s.bound.push_back(spec.beta[k]);
    }
    for (std::size_t k = 0; k < spec.K(); ++k) {
        s.value.push_back(oc.mse[k]);
        s.bound.push_back(spec.gamma[k]);
    }
    return s;
}

Multipliers default_initial_multipliers(const ProblemSpec& spec) {
    Multipliers m = Multipliers::zeros(spec.K());
    m.lambda0 = 10.0;
    for (std::size_t k = 0; k < spec.K(); ++k) {
        m.lambda[k] = 10.0;
        m.mu[k] = 1.0 / spec.gamma[k];
    }
    return m;
}

DualOptions default_dual_options(const ProblemSpec& spec) {
    DualOptions o;
    o.initial = default_initial_multipliers(spec);
    // The dual is piecewise linear; its kinks stall x-based tests long
    // after the value has settled.
    o.subplex.f_tol_rel = 1e-6;
    o.subplex.stall_cycles = 3;
    o.subplex.max_evals = 30000;
    return o;
}

namespace {

ConstraintStatus status_at(const ProblemSpec& spec, std::span<const double> flat,
                           const BuildOptions& build) {
    const auto mult = Multipliers::unflatten(flat, spec.K());
    const auto tables = build_tables(spec, mult, build);
    return constraint_status(spec, exact_oc(spec, tables.policy));
}

// Smallest value of coordinate i (to bisection precision) at which its
// constraint holds. The constraint value of the minimizing policy is
// nonincreasing in its own multiplier.
void raise_until_satisfied(const ProblemSpec& spec, std::vector<double>& x, std::size_t i,
                           const BuildOptions& build) {
    const double top = *std::max_element(x.begin(), x.end());
    double lo = x[i];
    double hi = std::max({2.0 * x[i], 1e-3 * top, 1e-6});
    auto probe = x;
    auto ok = [&](double v) {
        probe[i] = v;
        return status_at(spec, probe, build).satisfied(i);
    };
    int doublings = 0;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) return;
    }
    for (int it = 0; it < 50 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    x[i] = hi;
}

}  // namespace

DualSolution maximize_dual(const ProblemSpec& spec, const DualOptions& options) {
    spec.validate();
    const Multipliers init = options.initial ? *options.initial : default_initial_multipliers(spec);
    init.check_against(spec);

    std::vector<double> x0 = init.flatten();
    std::vector<double> step(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) step[i] = x0[i] > 0.0 ? 0.5 * x0[i] : 1.0;

    opt::Objective neg_dual = [&](std::span<const double> x) {
        return -dual_objective_flat(spec, x, options.build);
    };
    // Every policy stops within m_bar bits, so a dual value above m_bar
    // proves that no policy meets the constraints.
    auto sub = options.subplex;
    sub.f_target = -static_cast<double>(spec.m_bar) * (1.0 + 1e-9);
    auto res = opt::subplex(neg_dual, x0, step, sub);

    DualSolution sol;
    sol.evals = res.evals;
    sol.converged = res.converged;
    sol.trace = res.trace;
    if (res.reached_target) {
        sol.infeasible = true;
        sol.converged = false;
        sol.multipliers = Multipliers::unflatten(res.x, spec.K());
        sol.dual_value = -res.f;
        sol.constraints = status_at(spec, res.x, options.build);
        return sol;
    }

    std::vector<double> x = res.x;
    const double top = *std::max_element(x.begin(), x.end());
    for (double& v : x)
        if (v < options.clamp_rel * top || v < options.clamp_abs) v = 0.0;

    if (options.repair) {
        auto violated_at = [&](std::span<const double> v) {
            const auto st = status_at(spec, v, options.build);
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!st.satisfied(i)) out.push_back(i);
            std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
                return st.rel_excess(a) > st.rel_excess(b);
            });
            return out;
        };
        // One constraint at a time while that makes progress.
        for (std::size_t round = 0; round < options.repair_rounds; ++round) {
            const auto violated = violated_at(x);
            if (violated.empty()) break;
            raise_until_satisfied(spec, x, violated.front(), options.build);
        }
        // Constraints that trade off against each other: scale every
        // multiplier up together, which buys more samples.
        if (!violated_at(x).empty()) {
            auto scaled = [&](double t) {
                auto y = x;
                for (double& v : y) v *= t;
                return y;
            };
            const double top_now = *std::max_element(x.begin(), x.end());
            const double t_max = 0.5 * std::numeric_limits<double>::max() / std::max(top_now, 1.0);
            double lo = 1.0, hi = 1.0 + 1e-3;
            bool found = false;
            while (top_now > 0.0 && hi < t_max) {
                if (violated_at(scaled(hi)).empty()) {
                    found = true;
                    break;
                }
                lo = hi;
                hi = 1.0 + 2.0 * (hi - 1.0);
            }
            if (found) {
                for (int it = 0; it < 40 && hi - lo > 1e-9 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (violated_at(scaled(mid)).empty() ? hi : lo) = mid;
                }
                x = scaled(hi);
            }
        }
        // Lower multipliers whose constraint has slack toward the point where
        // some constraint would break, keeping a small margin from that kink.
        // Accepted only when the dual does not drop.
        for (int pass = 0; pass < 4 && violated_at(x).empty(); ++pass) {
            const auto st = status_at(spec, x, options.build);
            const double top_now = *std::max_element(x.begin(), x.end());
            std::vector<std::size_t> order;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] > options.kkt.activity_rel * top_now && st.rel_excess(i) < -options.tighten_slack)
                    order.push_back(i);
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return st.rel_excess(a) < st.rel_excess(b); });
            bool changed = false;
            for (std::size_t i : order) {
                const double d0 = dual_objective_flat(spec, x, options.build);
                auto y = x;
                double lo = 0.0, hi = x[i];
                for (int it = 0; it < 30; ++it) {
                    y[i] = 0.5 * (lo + hi);
                    (violated_at(y).empty() ? hi : lo) = y[i];
                }
                y[i] = std::min(x[i], hi * (1.0 + options.tighten_margin));
                if (y[i] < x[i] && violated_at(y).empty() && dual_objective_flat(spec, y, options.build) >= d0) {
                    x = y;
                    changed = true;
                }
            }
            if (!changed) break;
        }
    }

    sol.multipliers = Multipliers::unflatten(x, spec.K());
    sol.dual_value = dual_objective(spec, sol.multipliers, options.build);
    sol.constraints = status_at(spec, x, options.build);
    sol.feasible = true;
    for (std::size_t i = 0; i < x.size(); ++i) sol.feasible = sol.feasible && sol.constraints.satisfied(i);
    sol.kkt = kkt_check(spec, sol.multipliers, options.kkt, options.build);
    return sol;
}

}  // namespace seqjde
