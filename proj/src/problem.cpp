#include "seqjde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqjde/errors.hpp"

namespace seqjde {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double gamma_from_c(double c, double rho) {
    const double theta = 1.0 / rho - 2.0;
    return c * theta * theta;
}

namespace {

bool in_open_unit(double v) { return v > 0.0 && v < 1.0; }

std::string indexed(const char* name, std::size_t k) {
    return std::string(name) + "[" + std::to_string(k) + "]";
}

}  // namespace

void ProblemSpec::validate() const {
    std::vector<FieldIssue> issues;
    if (!in_open_unit(alpha)) issues.push_back({"alpha", "must lie in (0, 1)"});
    if (rho.empty()) issues.push_back({"rho", "grid must be nonempty"});
    if (beta.size() != rho.size())
        issues.push_back({"beta", "expected " + std::to_string(rho.size()) + " values"});
    if (gamma.size() != rho.size())
        issues.push_back({"gamma", "expected " + std::to_string(rho.size()) + " values"});
    if (!(rho_max > 0.0 && rho_max < 0.5)) issues.push_back({"rho_max", "must lie in (0, 0.5)"});
    if (!(rho_star > 0.0 && rho_star < 0.5)) issues.push_back({"rho_star", "must lie in (0, 0.5)"});
    if (m_bar < 1) issues.push_back({"m_bar", "must be >= 1"});
    if (c && !(*c > 0.0 && std::isfinite(*c))) issues.push_back({"c", "must be > 0"});
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (!(rho[k] > 0.0)) issues.push_back({indexed("rho", k), "must be > 0"});
        if (!(rho[k] <= rho_max)) issues.push_back({indexed("rho", k), "must be <= rho_max"});
        if (k > 0 && !(rho[k] > rho[k - 1]))
            issues.push_back({indexed("rho", k), "grid must be strictly increasing"});
    }
    for (std::size_t k = 0; k < beta.size(); ++k)
        if (!in_open_unit(beta[k])) issues.push_back({indexed("beta", k), "must lie in (0, 1)"});
    for (std::size_t k = 0; k < gamma.size(); ++k)
        if (!(gamma[k] > 0.0 && std::isfinite(gamma[k])))
            issues.push_back({indexed("gamma", k), "must be > 0"});
    if (!issues.empty()) throw ValidationError(std::move(issues));
}

ProblemSpec ProblemSpec::from_db(std::span<const double> snr_grid_db, double snr_nominal_db,
                                 double alpha, std::span<const double> beta,
                                 std::optional<double> c, std::span<const double> gamma,
                                 int m_bar) {
    const std::size_t K = snr_grid_db.size();
    std::vector<FieldIssue> issues;
    if (K == 0) issues.push_back({"snr_grid_db", "grid must be nonempty"});
    if (beta.size() != 1 && beta.size() != K)
        issues.push_back({"beta", "must be a scalar or one value per grid point"});
    if (!c && gamma.size() != K) issues.push_back({"gamma", "need c or one value per grid point"});
    if (!issues.empty()) throw ValidationError(std::move(issues));

    // Higher SNR means smaller rho: walk the grid from the top down.
    std::vector<std::size_t> order(K);
    for (std::size_t i = 0; i < K; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return snr_grid_db[a] > snr_grid_db[b]; });

    ProblemSpec spec;
    spec.alpha = alpha;
    spec.m_bar = m_bar;
    spec.c = c;
    spec.rho_star = 1.0 / (db_to_linear(snr_nominal_db) + 2.0);
    double theta_min = db_to_linear(snr_grid_db[order.back()]);
    spec.rho_max = 1.0 / (theta_min + 2.0);
    for (std::size_t i : order) {
        const double r = 1.0 / (db_to_linear(snr_grid_db[i]) + 2.0);
        spec.rho.push_back(r);
        spec.beta.push_back(beta.size() == 1 ? beta[0] : beta[i]);
        spec.gamma.push_back(c ? gamma_from_c(*c, r) : gamma[i]);
    }
    spec.validate();
    return spec;
}

Multipliers Multipliers::zeros(std::size_t K) {
    return Multipliers{0.0, std::vector<double>(K, 0.0), std::vector<double>(K, 0.0)};
}

std::vector<double> Multipliers::flatten() const {
    std::vector<double> out;
    out.reserve(dim());
    out.push_back(lambda0);
    out.insert(out.end(), lambda.begin(), lambda.end());
    out.insert(out.end(), mu.begin(), mu.end());
    return out;
}

Multipliers Multipliers::unflatten(std::span<const double> flat, std::size_t K) {
    if (flat.size() != 1 + 2 * K) throw ContractError("Multipliers::unflatten: bad length");
    Multipliers m;
    m.lambda0 = flat[0];
    m.lambda.assign(flat.begin() + 1, flat.begin() + 1 + K);
    m.mu.assign(flat.begin() + 1 + K, flat.end());
    return m;
}

bool Multipliers::all_mu_zero() const noexcept {
    return std::all_of(mu.begin(), mu.end(), [](double v) { return v == 0.0; });
}

void Multipliers::check_against(const ProblemSpec& spec) const {
    if (lambda.size() != spec.K() || mu.size() != spec.K())
        throw ContractError("multiplier dimensions do not match the grid size");
    for (double v : flatten())
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ContractError("multipliers must be finite and nonnegative");
}

ValidationError::ValidationError(std::vector<FieldIssue> issues)
    : std::invalid_argument([&] {
          std::string msg = "validation failed:";
          for (const auto& i : issues) msg += " [" + i.path + ": " + i.message + "]";
          return msg;
      }()),
      issues_(std::move(issues)) {}

}  // namespace seqjde
