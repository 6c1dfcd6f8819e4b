#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqjde {

// Argument outside the mathematical domain of an operation (e.g. negative SNR).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A sample source ran dry. Carries the raw-sample counters reached so far.
class StreamEnd : public std::runtime_error {
public:
    StreamEnd(const std::string& what, std::uint64_t n_obs, std::uint64_t n_ref)
        : std::runtime_error(what), n_obs_(n_obs), n_ref_(n_ref) {}

    std::uint64_t n_obs() const noexcept { return n_obs_; }
    std::uint64_t n_ref() const noexcept { return n_ref_; }

private:
    std::uint64_t n_obs_;
    std::uint64_t n_ref_;
};

// Estimator requested while every estimation multiplier is zero.
class EstimatorUndefined : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Requested trellis larger than the configured maximum horizon.
class ResourceLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

// Inputs that do not belong together (tables built for another spec,
// policy file written for another config, dimension mismatch).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unparseable file content or unknown format version.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FieldIssue {
    std::string path;
    std::string message;
};

// One or more configuration fields failed validation. All issues found
// in a single pass are reported together.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<FieldIssue> issues);

    const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<FieldIssue> issues_;
};

}  // namespace seqjde
