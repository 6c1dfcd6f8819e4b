#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace seqjde {

double db_to_linear(double db);
double linear_to_db(double linear);

// Relative-MSE bound c expressed as an absolute bound on (theta_tilde - 1/rho)^2:
// gamma(rho) = c * (1/rho - 2)^2.
double gamma_from_c(double c, double rho);

// One instance of the constrained sequential design over the Bernoulli stream.
// Grid quantities are indexed k = 0..K-1 in order of increasing rho.
struct ProblemSpec {
    double alpha = 0.05;
    std::vector<double> beta;   // type-II bound per grid point
    std::vector<double> gamma;  // absolute MSE bound per grid point
    std::vector<double> rho;    // strictly increasing, in (0, rho_max]
    double rho_star = 0.25;     // nominal point for the expected sample number
    double rho_max = 0.5;       // 1/(theta_min + 2)
    int m_bar = 400;            // truncation horizon in Bernoulli samples
    std::optional<double> c;    // relative-MSE coefficient, when gamma was derived from it

    std::size_t K() const noexcept { return rho.size(); }

    // Throws ValidationError listing every violated invariant.
    void validate() const;

    // Builds a validated spec from SNR values in dB. The theta grid may be
    // given in any order; rho comes out sorted increasing. `beta` is either a
    // single value or one value per grid point in the order given. The MSE
    // bound comes from `c` when set, else from `gamma` (one per grid point).
    static ProblemSpec from_db(std::span<const double> snr_grid_db, double snr_nominal_db,
                               double alpha, std::span<const double> beta,
                               std::optional<double> c, std::span<const double> gamma,
                               int m_bar);
};

// Dual variables: lambda0 for type-I, lambda[k] for type-II at rho[k],
// mu[k] for the MSE bound at rho[k].
struct Multipliers {
    double lambda0 = 0.0;
    std::vector<double> lambda;
    std::vector<double> mu;

    static Multipliers zeros(std::size_t K);

    std::size_t K() const noexcept { return lambda.size(); }
    std::size_t dim() const noexcept { return 1 + lambda.size() + mu.size(); }

    // Flat layout lambda0, lambda_1..lambda_K, mu_1..mu_K.
    std::vector<double> flatten() const;
    static Multipliers unflatten(std::span<const double> flat, std::size_t K);

    bool all_mu_zero() const noexcept;

    // Throws ContractError on dimension mismatch or a negative / non-finite component.
    void check_against(const ProblemSpec& spec) const;
};

}  // namespace seqjde
