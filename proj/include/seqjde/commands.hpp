#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqjde/config.hpp"
#include "seqjde/dual_optimizer.hpp"
#include "seqjde/evaluation.hpp"

namespace seqjde {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitValidation = 2,
    kExitNotConverged = 3,
    kExitMismatch = 4,
};

// Operating characteristics at H0 and at every grid point, in increasing dB.
void write_oc_csv(std::ostream& os, const ProblemSpec& spec, const OperatingCharacteristics& oc,
                  const std::string& hash);

void write_convergence_csv(std::ostream& os, const DualSolution& sol, const std::string& hash);

std::string solution_json(const ProblemSpec& spec, const DualSolution& sol, const std::string& hash);

// Each command writes its artifacts under config.output.dir and returns an ExitCode.
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, const std::filesystem::path& policy, std::ostream& log);
int cmd_simulate(const RunConfig& config, const std::filesystem::path& policy, std::ostream& log);
int cmd_transform(const std::filesystem::path& obs, const std::filesystem::path& ref,
                  std::uint64_t max_bits, std::ostream& out, std::ostream& log);

// Full command-line entry point (argument parsing, dispatch, exit codes).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqjde
