#pragma once

// Independent reference computations used only by tests. None of these go
// through the library's recursion or log-domain machinery.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "seqjde/bernoulli_transform.hpp"
#include "seqjde/problem.hpp"
#include "seqjde/sample_source.hpp"

namespace seqjde::oracle {

// Race with the two full cumulative sums of squares kept explicitly.
// Bit = 1 iff the observation sum is <= the reference sum.
struct ExplicitRace {
    double obs_sum = 0.0;
    double ref_sum = 0.0;
    std::uint64_t n_obs = 0;
    std::uint64_t n_ref = 0;

    static double pair(SampleSource& s, std::uint64_t& n) {
        const double a = *s.next();
        const double b = *s.next();
        n += 2;
        return a * a + b * b;
    }

    int init(SampleSource& obs, SampleSource& ref) {
        obs_sum = pair(obs, n_obs);
        ref_sum = pair(ref, n_ref);
        return obs_sum <= ref_sum ? 1 : 0;
    }

    int step(SampleSource& obs, SampleSource& ref) {
        if (obs_sum <= ref_sum)
            obs_sum += pair(obs, n_obs);
        else
            ref_sum += pair(ref, n_ref);
        return obs_sum <= ref_sum ? 1 : 0;
    }
};

// Exhaustive minimization of the Lagrangian cost over every stop/continue
// labelling of the interior trellis states and every decision labelling of
// the stop states that can actually be reached. Costs are exact
// expectations obtained by walking all 2^m_bar bit strings.
class BruteForcePolicyCost {
public:
    BruteForcePolicyCost(const ProblemSpec& spec, const Multipliers& mult)
        : spec_(spec), mult_(mult), n_(spec.m_bar) {}

    double minimum() const {
        std::vector<std::pair<int, int>> interior;
        for (int m = 0; m < n_; ++m)
            for (int m1 = 0; m1 <= m; ++m1) interior.emplace_back(m - m1, m1);

        double best = std::numeric_limits<double>::infinity();
        const std::uint64_t n_labels = 1ULL << interior.size();
        for (std::uint64_t mask = 0; mask < n_labels; ++mask) {
            std::map<std::pair<int, int>, bool> stops;
            for (std::size_t i = 0; i < interior.size(); ++i) stops[interior[i]] = (mask >> i) & 1U;
            best = std::min(best, best_over_decisions(stops));
        }
        return best;
    }

private:
    struct StopMass {
        double p_half = 0.0;
        std::vector<double> p_k;
    };

    static double path_prob(double rho, int zeros, int ones) {
        return std::pow(rho, ones) * std::pow(1.0 - rho, zeros);
    }

    double best_over_decisions(const std::map<std::pair<int, int>, bool>& stops) const {
        const std::size_t K = spec_.K();
        std::map<std::pair<int, int>, StopMass> reached;
        double asn = 0.0;
        // Every length-n string; the walk stops at the first stop state and
        // summing over the unread suffix leaves the prefix probability.
        for (std::uint64_t s = 0; s < (1ULL << n_); ++s) {
            int m0 = 0, m1 = 0;
            for (int t = 0;; ++t) {
                const bool at_boundary = m0 + m1 == n_;
                if (at_boundary || stops.at({m0, m1})) break;
                const bool one = (s >> t) & 1U;
                (one ? m1 : m0) += 1;
            }
            // Weight of this full string under each measure.
            const int zeros = n_ - __builtin_popcountll(s & ((1ULL << n_) - 1));
            const int ones = n_ - zeros;
            auto& mass = reached[{m0, m1}];
            mass.p_k.resize(K, 0.0);
            mass.p_half += path_prob(0.5, zeros, ones);
            for (std::size_t k = 0; k < K; ++k) mass.p_k[k] += path_prob(spec_.rho[k], zeros, ones);
            asn += path_prob(spec_.rho_star, zeros, ones) * (m0 + m1);
        }

        // Estimation cost per stop state, with the best constant estimate.
        double est_cost = 0.0;
        for (const auto& [state, mass] : reached) {
            double w = 0.0, wt = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                w += mult_.mu[k] * mass.p_k[k];
                wt += mult_.mu[k] * mass.p_k[k] / spec_.rho[k];
            }
            const double est = w > 0.0 ? wt / w : 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double d = est - 1.0 / spec_.rho[k];
                est_cost += mult_.mu[k] * mass.p_k[k] * d * d;
            }
        }

        std::vector<const StopMass*> masses;
        for (const auto& [state, mass] : reached) masses.push_back(&mass);
        double best = std::numeric_limits<double>::infinity();
        for (std::uint64_t dmask = 0; dmask < (1ULL << masses.size()); ++dmask) {
            double cost = asn + est_cost;
            for (std::size_t j = 0; j < masses.size(); ++j) {
                const bool decide_one = (dmask >> j) & 1U;
                if (decide_one) {
                    cost += mult_.lambda0 * masses[j]->p_half;
                } else {
                    for (std::size_t k = 0; k < K; ++k) cost += mult_.lambda[k] * masses[j]->p_k[k];
                }
            }
            best = std::min(best, cost);
        }
        return best;
    }

    const ProblemSpec& spec_;
    const Multipliers& mult_;
    int n_;
};

inline double brute_force_L(const ProblemSpec& spec, const Multipliers& mult) {
    return BruteForcePolicyCost(spec, mult).minimum();
}

}  // namespace seqjde::oracle
