#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace seqjde::opt {

// Objective to be minimized. May return +inf to reject a point.
using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
    double reflect = 1.0;
    double expand = 2.0;
    double contract = 0.5;
    double shrink = 0.5;
    // Stop once the simplex spread in x falls below this (max-norm over vertices).
    double x_tol = 1e-8;
    // Stop once max f - min f over the simplex falls below this.
    double f_tol = 0.0;
    // Stop as soon as some vertex reaches this value.
    double f_target = -std::numeric_limits<double>::infinity();
    std::size_t max_evals = 1000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t evals = 0;
    bool converged = false;
    bool reached_target = false;
};

// Downhill simplex on the full space. The initial simplex is x0 plus one
// vertex x0 + step[i] e_i per coordinate.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> step,
                             const NelderMeadOptions& options);

struct SubplexOptions {
    // Largest subspace. With adaptive_subspaces off, coordinates are split
    // into consecutive blocks of exactly this size.
    std::size_t block_size = 5;
    // Re-partition after every cycle, grouping the coordinates that moved
    // most, with subspaces of min_block_size..block_size coordinates.
    bool adaptive_subspaces = false;
    std::size_t min_block_size = 2;
    // Inner simplex runs stop when their spread drops below psi times
    // the spread they started with.
    double psi = 0.25;
    // Bounds on the per-cycle step rescaling factor: [omega, 1/omega].
    double omega = 0.1;
    double x_tol_rel = 1e-5;
    double x_tol_abs = 1e-8;
    // Also stop once each of the last stall_cycles cycles improved f by at
    // most f_tol_rel * |f|. Zero disables the test.
    double f_tol_rel = 0.0;
    std::size_t stall_cycles = 3;
    std::size_t max_evals = 20000;
    // Stop as soon as f reaches this value.
    double f_target = -std::numeric_limits<double>::infinity();
    // Full-space Nelder-Mead pass after the subspace cycles.
    bool polish = true;
    std::size_t polish_max_evals = 4000;
};

struct SubplexTrace {
    std::size_t cycle;
    double f;
    std::size_t evals;
};

struct SubplexResult {
    std::vector<double> x;
    double f = 0.0;
    std::size_t evals = 0;
    bool converged = false;
    bool reached_target = false;
    std::vector<SubplexTrace> trace;
};

// Subspace-searching simplex: cycles Nelder-Mead over fixed coordinate
// blocks, adapting the per-coordinate step between cycles, then polishes
// in the full space. The best point found never gets worse.
SubplexResult subplex(const Objective& f, std::vector<double> x0, std::vector<double> step,
                      const SubplexOptions& options);

}  // namespace seqjde::opt
