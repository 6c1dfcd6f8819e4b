#include "seqjde/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqjde/errors.hpp"
#include "seqjde/policy_io.hpp"

namespace seqjde {
namespace {

constexpr const char* kToolVersion = "1.0.0";

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::path dir(cfg.output.dir);
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw FormatError("cannot write " + p.string());
    return os;
}

std::string real_or_empty(double v) { return std::isnan(v) ? std::string() : format_real(v); }

// The policy must have been solved for exactly the problem in the config.
bool hashes_match(const RunConfig& cfg, const PolicyFile& pf, std::ostream& log) {
    const std::string expected = config_hash(cfg.problem());
    if (expected == pf.config_hash) return true;
    log << "error: policy was built for config hash " << pf.config_hash << ", config has "
        << expected << "\n";
    return false;
}

}  // namespace

void write_oc_csv(std::ostream& os, const ProblemSpec& spec, const OperatingCharacteristics& oc,
                  const std::string& hash) {
    os << "point,theta_db,theta_linear,rho,err_prob,err_bound,mse,mse_bound,rel_mse,asn\n";
    // oc.asn carries rho = 0.5 first, then the grid.
    os << "H0,,0,0.5," << format_real(oc.type_I) << ',' << format_real(spec.alpha) << ",,,,"
       << format_real(oc.asn.at(0)) << '\n';
    for (std::size_t i = spec.K(); i-- > 0;) {
        const double theta = 1.0 / spec.rho[i] - 2.0;
        os << (spec.K() - i) << ',' << format_real(linear_to_db(theta)) << ','
           << format_real(theta) << ',' << format_real(spec.rho[i]) << ','
           << format_real(oc.type_II[i]) << ',' << format_real(spec.beta[i]) << ','
           << real_or_empty(oc.mse[i]) << ',' << format_real(spec.gamma[i]) << ','
           << real_or_empty(oc.mse[i] / (theta * theta)) << ',' << format_real(oc.asn.at(i + 1))
           << '\n';
    }
    os << "# config_hash=" << hash << '\n';
}

void write_convergence_csv(std::ostream& os, const DualSolution& sol, const std::string& hash) {
    os << "iteration,dual_value,evals\n";
    for (const auto& t : sol.trace) os << t.cycle << ',' << format_real(-t.f) << ',' << t.evals << '\n';
    os << "# config_hash=" << hash << '\n';
}

std::string solution_json(const ProblemSpec& spec, const DualSolution& sol, const std::string& hash) {
    using nlohmann::json;
    json coords = json::array();
    const auto names = coordinate_names(spec.K());
    const auto flat = sol.multipliers.flatten();
    for (std::size_t i = 0; i < flat.size(); ++i) {
        json c{{"name", names[i]}, {"value", flat[i]}};
        if (i > 0) {
            const std::size_t k = (i - 1) % spec.K();
            c["theta_db"] = linear_to_db(1.0 / spec.rho[k] - 2.0);
        }
        if (i < sol.kkt.coords.size()) {
            const auto& kc = sol.kkt.coords[i];
            c["gradient"] = kc.gradient;
            c["g_tol"] = kc.g_tol;
            c["active"] = kc.active;
            c["kkt_pass"] = kc.pass;
        }
        if (i < sol.constraints.value.size()) {
            c["constraint"] = sol.constraints.value[i];
            c["bound"] = sol.constraints.bound[i];
        }
        coords.push_back(c);
    }
    json doc{{"format", "seqjde-solution"},
             {"version", 1},
             {"config_hash", hash},
             {"dual_value", sol.dual_value},
             {"evals", sol.evals},
             {"converged", sol.converged},
             {"feasible", sol.feasible},
             {"infeasible_within_horizon", sol.infeasible},
             {"kkt_pass", sol.kkt.pass},
             {"activity_threshold", sol.kkt.activity_threshold},
             {"lambda0", sol.multipliers.lambda0},
             {"lambda", sol.multipliers.lambda},
             {"mu", sol.multipliers.mu},
             {"coordinates", coords}};
    return doc.dump(2) + "\n";
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const ProblemSpec spec = cfg.problem();
    const std::string hash = config_hash(spec);
    const DualOptions options = cfg.dual_options();
    log << "solving: K=" << spec.K() << " m_bar=" << spec.m_bar << " hash=" << hash << "\n";

    const DualSolution sol = maximize_dual(spec, options);
    if (sol.infeasible) {
        {
            auto os = open_out(out_path(cfg, cfg.output.solution));
            os << solution_json(spec, sol, hash);
        }
        log << "error: dual value " << format_real(sol.dual_value) << " exceeds m_bar = " << spec.m_bar
            << "; no test within the horizon meets the constraints\n";
        return kExitFailure;
    }
    const PolicyTables tables = build_tables(spec, sol.multipliers, options.build);
    std::vector<double> rho_list{0.5};
    rho_list.insert(rho_list.end(), spec.rho.begin(), spec.rho.end());
    const auto oc = exact_oc(spec, tables.policy, rho_list);

    save_policy(out_path(cfg, cfg.output.policy), PolicyFile{spec, sol.multipliers, tables.policy, hash});
    {
        auto os = open_out(out_path(cfg, cfg.output.solution));
        os << solution_json(spec, sol, hash);
    }
    {
        auto os = open_out(out_path(cfg, cfg.output.oc));
        write_oc_csv(os, spec, oc, hash);
    }
    {
        auto os = open_out(out_path(cfg, cfg.output.convergence));
        write_convergence_csv(os, sol, hash);
    }

    log << "dual value " << format_real(sol.dual_value) << " after " << sol.evals << " evaluations\n"
        << "converged=" << sol.converged << " kkt=" << (sol.kkt.pass ? "PASS" : "FAIL")
        << " feasible=" << sol.feasible << "\n";
    return (sol.converged && sol.kkt.pass && sol.feasible) ? kExitOk : kExitNotConverged;
}

int cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& policy, std::ostream& log) {
    const PolicyFile pf = load_policy(policy);
    if (!hashes_match(cfg, pf, log)) return kExitMismatch;
    std::vector<double> rho_list{0.5};
    rho_list.insert(rho_list.end(), pf.spec.rho.begin(), pf.spec.rho.end());
    const auto oc = exact_oc(pf.spec, pf.policy, rho_list);
    auto os = open_out(out_path(cfg, cfg.output.oc));
    write_oc_csv(os, pf.spec, oc, pf.config_hash);
    log << "type-I " << format_real(oc.type_I) << ", ASN at nominal " << format_real(oc.asn_star)
        << "\n";
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& policy, std::ostream& log) {
    const PolicyFile pf = load_policy(policy);
    if (!hashes_match(cfg, pf, log)) return kExitMismatch;
    SweepOptions so;
    so.trials = cfg.sweep.trials;
    so.base_seed = cfg.sweep.base_seed;
    so.sigma_w_sq = cfg.sweep.sigma_w_sq;
    const auto dbs = db_range(cfg.sweep.db_start, cfg.sweep.db_stop, cfg.sweep.db_step);
    const auto report = sweep(pf.policy, dbs, so);

    const auto csv_path = out_path(cfg, cfg.output.sweep);
    {
        auto os = open_out(csv_path);
        write_sweep_csv(os, report);
        os << "# config_hash=" << pf.config_hash << '\n';
    }
    {
        nlohmann::json meta{{"config_hash", pf.config_hash},
                            {"base_seed", so.base_seed},
                            {"trials", so.trials},
                            {"sigma_w_sq", so.sigma_w_sq},
                            {"db_start", cfg.sweep.db_start},
                            {"db_stop", cfg.sweep.db_stop},
                            {"db_step", cfg.sweep.db_step},
                            {"tool_version", kToolVersion}};
        auto os = open_out(csv_path.string() + ".meta.json");
        os << meta.dump(2) << '\n';
    }
    log << "wrote " << report.rows.size() << " rows to " << csv_path.string() << "\n";
    return kExitOk;
}

int cmd_transform(const std::filesystem::path& obs, const std::filesystem::path& ref,
                  std::uint64_t max_bits, std::ostream& out, std::ostream& log) {
    FileSource o(obs), r(ref);
    const auto res = transform_stream(o, r, max_bits);
    for (Bit b : res.bits) out << int(b) << '\n';
    if (res.truncated) {
        out << "# truncated: a source ran out after " << res.bits.size() << " bits\n";
        log << "warning: input exhausted after " << res.bits.size() << " of " << max_bits
            << " bits\n";
    }
    out << "# n_obs=" << res.n_obs << " n_ref=" << res.n_ref << '\n';
    return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sequential joint signal detection and SNR estimation"};
    app.require_subcommand(1);

    std::string config_file, policy_file, obs_file, ref_file;
    std::uint64_t max_bits = 0;

    auto* solve = app.add_subcommand("solve", "maximize the dual and write the policy");
    solve->add_option("--config", config_file, "config file")->required();
    auto* evaluate = app.add_subcommand("evaluate", "exact operating characteristics of a policy");
    evaluate->add_option("--config", config_file, "config file")->required();
    evaluate->add_option("--policy", policy_file, "policy file")->required();
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo SNR sweep of a policy");
    simulate->add_option("--config", config_file, "config file")->required();
    simulate->add_option("--policy", policy_file, "policy file")->required();
    auto* transform = app.add_subcommand("transform", "turn two sample files into Bernoulli bits");
    transform->add_option("--obs", obs_file, "observation samples")->required();
    transform->add_option("--ref", ref_file, "reference samples")->required();
    transform->add_option("--max-bits", max_bits, "number of bits")->required()->check(
        CLI::PositiveNumber);

    // CLI11 takes a vector of arguments (no program name) in reverse order.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (*transform) return cmd_transform(obs_file, ref_file, max_bits, out, err);
        const RunConfig cfg = load_config(config_file);
        if (*solve) return cmd_solve(cfg, err);
        if (*evaluate) return cmd_evaluate(cfg, policy_file, err);
        if (*simulate) return cmd_simulate(cfg, policy_file, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace seqjde
