#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "seqjde/sample_source.hpp"

namespace seqjde {

// Linear Gaussian model x = s + w with independent zero-mean s and w.
class SignalModel {
public:
    SignalModel(double sigma_s_sq, double sigma_w_sq);

    double sigma_s_sq() const noexcept { return sigma_s_sq_; }
    double sigma_w_sq() const noexcept { return sigma_w_sq_; }
    double theta() const noexcept { return sigma_s_sq_ / sigma_w_sq_; }
    double rho() const noexcept;

    static SignalModel from_theta(double theta, double sigma_w_sq = 1.0);

private:
    double sigma_s_sq_;
    double sigma_w_sq_;
};

// Success probability 1/(theta+2) of the transformed bit stream.
// Throws DomainError for theta < 0 or NaN.
double rho_of_theta(double theta);

using Bit = std::uint8_t;

enum class Leader : std::uint8_t { Obs, Ref };

// Two cumulative sums of squares racing each other, kept as (leader, gap)
// so that neither sum has to be stored.
struct BernoulliRaceState {
    Leader leader = Leader::Ref;
    double gap = 0.0;
    std::uint64_t n_obs = 0;
    std::uint64_t n_ref = 0;
    std::uint64_t bits_emitted = 0;
};

// Draws two samples from each source and emits the first bit
// (1 iff the observation increment does not exceed the reference one).
// Throws StreamEnd when a source cannot supply both samples.
std::pair<BernoulliRaceState, Bit> init_race(SampleSource& obs, SampleSource& ref);

// Draws one paired increment from the lagging source (the observation
// source on a tie) and emits 1 iff the observation sum is <= the reference sum.
Bit next_bit(BernoulliRaceState& state, SampleSource& obs, SampleSource& ref);

struct TransformResult {
    std::vector<Bit> bits;
    std::uint64_t n_obs = 0;
    std::uint64_t n_ref = 0;
    // Set when a source ran dry before max_bits were produced.
    bool truncated = false;
};

TransformResult transform_stream(SampleSource& obs, SampleSource& ref, std::uint64_t max_bits);

// Seeded Gaussian streams for the given model. Observation and reference
// sources draw from independent generators derived from `seed`.
TransformResult transform_stream(const SignalModel& model, std::uint64_t seed,
                                 std::uint64_t max_bits);

struct GaussianPair {
    GaussianSource obs;
    GaussianSource ref;
};

GaussianPair make_gaussian_sources(const SignalModel& model, std::uint64_t seed);

}  // namespace seqjde
