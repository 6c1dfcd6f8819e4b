#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqjde/dual_optimizer.hpp"
#include "seqjde/problem.hpp"

namespace seqjde {

struct SweepConfig {
    double db_start = -3.0;
    double db_stop = 10.0;
    double db_step = 0.1;
    std::uint64_t trials = 10000;
    std::uint64_t base_seed = 1;
    double sigma_w_sq = 1.0;
};

struct OptimizerConfig {
    std::size_t max_evals = 30000;
    std::size_t block_size = 5;
    bool adaptive_subspaces = false;
    double psi = 0.25;
    double omega = 0.1;
    double x_tol_rel = 1e-5;
    double x_tol_abs = 1e-8;
    double f_tol_rel = 1e-6;
    std::size_t stall_cycles = 3;
    bool polish = true;
    std::size_t polish_max_evals = 4000;
    double clamp_rel = 1e-3;
    bool repair = true;
    double tighten_slack = 0.05;
    double kkt_g_factor = 1e-2;
    double kkt_activity_rel = 1e-3;
    // Overrides of the default starting point.
    std::optional<double> initial_lambda0;
    std::optional<std::vector<double>> initial_lambda;  // one per grid point, in config grid order
    std::optional<std::vector<double>> initial_mu;
};

struct OutputConfig {
    std::string dir = ".";
    std::string policy = "policy.txt";
    std::string solution = "solution.json";
    std::string oc = "oc.csv";
    std::string convergence = "convergence.csv";
    std::string sweep = "sweep.csv";
};

// Everything a batch run needs. SNR values are in dB here and nowhere
// else; ProblemSpec carries the linear / rho forms.
struct RunConfig {
    std::vector<double> snr_grid_db;
    double snr_nominal_db = 3.0;
    double alpha = 0.05;
    std::vector<double> beta{0.05};  // scalar (size 1) or one per grid point
    std::optional<double> c;
    std::optional<std::vector<double>> gamma;  // alternative to c, one per grid point
    int m_bar = 400;
    OptimizerConfig optimizer;
    SweepConfig sweep;
    OutputConfig output;

    ProblemSpec problem() const;
    DualOptions dual_options() const;
};

// Config file: JSON with sections "problem", "optimizer", "sweep", "output".
// Throws FormatError on malformed syntax and ValidationError (listing every
// offending field path) on bad values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const RunConfig& config);

// Reals formatted with 17 significant digits.
std::string format_real(double v);

// Stable 64-bit hash of the problem definition, as 16 hex digits.
std::string config_hash(const ProblemSpec& spec);

}  // namespace seqjde
