#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "seqjde/policy_dp.hpp"
#include "seqjde/problem.hpp"

namespace seqjde {

inline constexpr int kPolicyFormatVersion = 1;

// Everything needed to run a solved design later.
struct PolicyFile {
    ProblemSpec spec;
    Multipliers multipliers;
    Policy policy;
    std::string config_hash;
};

// Text format: a "seqjde-policy <version>" tag line, the problem definition
// and multipliers as "key value..." lines, then one line per trellis state
// "m m1 stop decision estimate" in anti-diagonal order. Reals carry 17
// significant digits.
void write_policy(std::ostream& os, const PolicyFile& file);
void save_policy(const std::filesystem::path& path, const PolicyFile& file);

// Throws FormatError on malformed content or an unknown version tag.
PolicyFile read_policy(std::istream& is);
PolicyFile load_policy(const std::filesystem::path& path);

}  // namespace seqjde
