#include "seqjde/bernoulli_transform.hpp"

#include <cmath>
#include <string>

#include "seqjde/errors.hpp"
#include "seqjde/seeding.hpp"

namespace seqjde {

SignalModel::SignalModel(double sigma_s_sq, double sigma_w_sq)
    : sigma_s_sq_(sigma_s_sq), sigma_w_sq_(sigma_w_sq) {
    if (!(sigma_w_sq > 0.0) || !std::isfinite(sigma_w_sq))
        throw DomainError("SignalModel: sigma_w_sq must be finite and > 0");
    if (!(sigma_s_sq >= 0.0) || !std::isfinite(sigma_s_sq))
        throw DomainError("SignalModel: sigma_s_sq must be finite and >= 0");
}

double SignalModel::rho() const noexcept { return 1.0 / (theta() + 2.0); }

SignalModel SignalModel::from_theta(double theta, double sigma_w_sq) {
    if (!(theta >= 0.0)) throw DomainError("SignalModel: theta must be >= 0");
    return SignalModel(theta * sigma_w_sq, sigma_w_sq);
}

double rho_of_theta(double theta) {
    if (!(theta >= 0.0)) throw DomainError("rho_of_theta: theta must be >= 0");
    return 1.0 / (theta + 2.0);
}

namespace {

// Sum of two squared samples: exponential with mean twice the variance.
// `counter` advances per sample actually drawn so a StreamEnd reports
// exactly what was consumed.
double draw_increment(SampleSource& src, std::uint64_t& counter, const BernoulliRaceState& state,
                      const char* which) {
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
        auto v = src.next();
        if (!v) {
            throw StreamEnd(std::string(which) + " stream exhausted", state.n_obs, state.n_ref);
        }
        ++counter;
        sum += *v * *v;
    }
    return sum;
}

Bit leadership_bit(const BernoulliRaceState& s) {
    return (s.leader == Leader::Ref || s.gap == 0.0) ? Bit{1} : Bit{0};
}

}  // namespace

std::pair<BernoulliRaceState, Bit> init_race(SampleSource& obs, SampleSource& ref) {
    BernoulliRaceState state;
    const double u = draw_increment(obs, state.n_obs, state, "observation");
    const double t = draw_increment(ref, state.n_ref, state, "reference");
    state.leader = (u > t) ? Leader::Obs : Leader::Ref;
    state.gap = std::abs(u - t);
    state.bits_emitted = 1;
    return {state, leadership_bit(state)};
}

Bit next_bit(BernoulliRaceState& state, SampleSource& obs, SampleSource& ref) {
    const bool draw_obs = state.gap == 0.0 || state.leader == Leader::Ref;
    const double inc = draw_obs ? draw_increment(obs, state.n_obs, state, "observation")
                                : draw_increment(ref, state.n_ref, state, "reference");
    if (inc > state.gap) {
        state.leader = draw_obs ? Leader::Obs : Leader::Ref;
        state.gap = inc - state.gap;
    } else {
        state.gap -= inc;
    }
    ++state.bits_emitted;
    return leadership_bit(state);
}

TransformResult transform_stream(SampleSource& obs, SampleSource& ref, std::uint64_t max_bits) {
    if (max_bits < 1) throw DomainError("transform_stream: max_bits must be >= 1");
    TransformResult out;
    BernoulliRaceState state;
    try {
        auto [s, first] = init_race(obs, ref);
        state = s;
        out.bits.push_back(first);
        while (out.bits.size() < max_bits) out.bits.push_back(next_bit(state, obs, ref));
    } catch (const StreamEnd& e) {
        out.truncated = true;
        out.n_obs = e.n_obs();
        out.n_ref = e.n_ref();
        return out;
    }
    out.n_obs = state.n_obs;
    out.n_ref = state.n_ref;
    return out;
}

GaussianPair make_gaussian_sources(const SignalModel& model, std::uint64_t seed) {
    return GaussianPair{
        GaussianSource(model.sigma_s_sq() + model.sigma_w_sq(), derive_seed({seed, 0})),
        GaussianSource(model.sigma_w_sq(), derive_seed({seed, 1})),
    };
}

TransformResult transform_stream(const SignalModel& model, std::uint64_t seed,
                                 std::uint64_t max_bits) {
    auto src = make_gaussian_sources(model, seed);
    return transform_stream(src.obs, src.ref, max_bits);
}

}  // namespace seqjde
