#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seqjde/evaluation.hpp"
#include "seqjde/policy_dp.hpp"
#include "seqjde/problem.hpp"
#include "seqjde/subplex.hpp"

namespace seqjde {

// L(mult) - lambda0 alpha - sum_k (lambda_k beta_k + mu_k gamma_k).
double dual_objective(const ProblemSpec& spec, const Multipliers& mult,
                      const BuildOptions& build = {});

// Same objective on the flat layout; any negative component gives -inf.
double dual_objective_flat(const ProblemSpec& spec, std::span<const double> flat,
                           const BuildOptions& build = {});

// Names of the flat coordinates: "lambda0", "lambda[1]".., "mu[1]"..
std::vector<std::string> coordinate_names(std::size_t K);

struct KktTolerances {
    // Base tolerance factor: g_tol_i = g_factor * (1 + |dual|) / max(1, |v_i|).
    double g_factor = 1e-2;
    // Coordinates at or below activity_rel * max_i v_i count as inactive.
    double activity_rel = 1e-3;
};

struct KktCoordinate {
    std::string name;
    double value = 0.0;
    double gradient = 0.0;  // finite-difference estimate of d(dual)/dv
    double g_tol = 0.0;
    bool active = false;
    // Active: |gradient|. Inactive: max(gradient, 0).
    double residual = 0.0;
    bool pass = false;
};

struct KktReport {
    double dual_value = 0.0;
    double activity_threshold = 0.0;
    std::vector<KktCoordinate> coords;
    bool pass = false;
};

// Central differences with step h = max(1e-4 |v|, 1e-6); coordinates too
// close to zero for a central step use a forward difference.
KktReport kkt_check(const ProblemSpec& spec, const Multipliers& mult,
                    const KktTolerances& tol = {}, const BuildOptions& build = {});

// Constraint values (type-I, type-II_k, mse_k) compared to their bounds,
// in the flat multiplier layout.
struct ConstraintStatus {
    std::vector<double> value;
    std::vector<double> bound;

    // Relative excess (value - bound) / bound of coordinate i.
    double rel_excess(std::size_t i) const { return (value[i] - bound[i]) / bound[i]; }
    bool satisfied(std::size_t i, double rel_tol = 0.0) const {
        return value[i] <= bound[i] * (1.0 + rel_tol);
    }
};

ConstraintStatus constraint_status(const ProblemSpec& spec, const OperatingCharacteristics& oc);

struct DualOptions {
    // Starting point; defaults to lambda = 10 everywhere, mu_k = 1/gamma_k.
    std::optional<Multipliers> initial;
    opt::SubplexOptions subplex;
    // Components below clamp_rel * max component, or below clamp_abs, are
    // set to exactly zero.
    double clamp_rel = 1e-3;
    double clamp_abs = 1e-6;
    // Raise the multiplier of the worst violated constraint until the exact
    // operating characteristics satisfy it (up to repair_rounds times), then
    // scale all multipliers up together if constraints still conflict.
    // Finally lower each active multiplier whose constraint is slack by more
    // than tighten_slack (relative) while every constraint keeps holding,
    // stopping tighten_margin (relative) short of the breaking point.
    bool repair = true;
    std::size_t repair_rounds = 8;
    double tighten_slack = 0.05;
    double tighten_margin = 1e-3;
    KktTolerances kkt;
    BuildOptions build;
};

struct DualSolution {
    Multipliers multipliers;
    double dual_value = 0.0;
    std::size_t evals = 0;
    bool converged = false;  // optimizer stopped on its tolerance, not its budget
    KktReport kkt;
    std::vector<opt::SubplexTrace> trace;
    // Exact constraint status of the policy induced by `multipliers`.
    ConstraintStatus constraints;
    bool feasible = false;
    // The dual exceeded m_bar: no policy within the horizon meets the
    // constraints. The search stops there; no repair or KKT check is run.
    bool infeasible = false;
};

DualOptions default_dual_options(const ProblemSpec& spec);

Multipliers default_initial_multipliers(const ProblemSpec& spec);

DualSolution maximize_dual(const ProblemSpec& spec, const DualOptions& options);

}  // namespace seqjde
