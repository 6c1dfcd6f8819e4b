#include "seqjde/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "seqjde/errors.hpp"

namespace seqjde {

using nlohmann::json;

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string config_hash(const ProblemSpec& spec) {
    std::ostringstream os;
    os << "alpha=" << format_real(spec.alpha) << ";rho_star=" << format_real(spec.rho_star)
       << ";rho_max=" << format_real(spec.rho_max) << ";m_bar=" << spec.m_bar;
    auto list = [&](const char* name, const std::vector<double>& v) {
        os << ';' << name << '=';
        for (double x : v) os << format_real(x) << ',';
    };
    list("rho", spec.rho);
    list("beta", spec.beta);
    list("gamma", spec.gamma);
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Walks a JSON object, pulling typed fields and collecting every problem
// with its dotted path instead of stopping at the first.
class Reader {
public:
    Reader(const json& obj, std::string prefix, std::vector<FieldIssue>& issues)
        : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {
        if (!obj_.is_object()) fail("", "must be an object");
    }

    std::string path(const std::string& key) const {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return obj_.is_object() && obj_.contains(key);
    }

    const json& at(const std::string& key) const { return obj_.at(key); }

    void fail(const std::string& key, std::string msg) {
        issues_.push_back({key.empty() ? prefix_ : path(key), std::move(msg)});
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        if (!has(key)) return;
        try {
            out = obj_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    void reject_unknown() {
        if (!obj_.is_object()) return;
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k)) fail(k, "unknown key");
    }

private:
    const json& obj_;
    std::string prefix_;
    std::vector<FieldIssue>& issues_;
    std::set<std::string> seen_;
};

void read_problem(Reader& r, RunConfig& cfg, std::vector<FieldIssue>& issues) {
    if (r.has("snr_grid_db")) {
        const json& g = r.at("snr_grid_db");
        if (g.is_array()) {
            r.get("snr_grid_db", cfg.snr_grid_db);
        } else if (g.is_object()) {
            Reader gr(g, r.path("snr_grid_db"), issues);
            double start = 0, stop = 0, step = 0;
            gr.get("start", start);
            gr.get("stop", stop);
            gr.get("step", step);
            gr.reject_unknown();
            if (!(step > 0.0)) {
                gr.fail("step", "must be > 0");
            } else {
                cfg.snr_grid_db.clear();
                const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
                for (long i = 0; i <= n; ++i) cfg.snr_grid_db.push_back(start + double(i) * step);
            }
        } else {
            r.fail("snr_grid_db", "must be a list or a {start, stop, step} range");
        }
    } else {
        r.fail("snr_grid_db", "is required");
    }
    r.get("snr_nominal_db", cfg.snr_nominal_db);
    r.get("alpha", cfg.alpha);
    if (r.has("beta")) {
        const json& b = r.at("beta");
        if (b.is_number())
            cfg.beta = {b.get<double>()};
        else
            r.get("beta", cfg.beta);
    }
    r.get("c", cfg.c);
    r.get("gamma", cfg.gamma);
    r.get("m_bar", cfg.m_bar);
    r.reject_unknown();
}

void read_optimizer(Reader& r, OptimizerConfig& o) {
    r.get("max_evals", o.max_evals);
    r.get("block_size", o.block_size);
    r.get("adaptive_subspaces", o.adaptive_subspaces);
    r.get("psi", o.psi);
    r.get("omega", o.omega);
    r.get("x_tol_rel", o.x_tol_rel);
    r.get("x_tol_abs", o.x_tol_abs);
    r.get("f_tol_rel", o.f_tol_rel);
    r.get("stall_cycles", o.stall_cycles);
    r.get("polish", o.polish);
    r.get("polish_max_evals", o.polish_max_evals);
    r.get("clamp_rel", o.clamp_rel);
    r.get("repair", o.repair);
    r.get("tighten_slack", o.tighten_slack);
    r.get("kkt_g_factor", o.kkt_g_factor);
    r.get("kkt_activity_rel", o.kkt_activity_rel);
    r.get("initial_lambda0", o.initial_lambda0);
    r.get("initial_lambda", o.initial_lambda);
    r.get("initial_mu", o.initial_mu);
    r.reject_unknown();
}

void read_sweep(Reader& r, SweepConfig& s) {
    r.get("db_start", s.db_start);
    r.get("db_stop", s.db_stop);
    r.get("db_step", s.db_step);
    r.get("trials", s.trials);
    r.get("base_seed", s.base_seed);
    r.get("sigma_w_sq", s.sigma_w_sq);
    r.reject_unknown();
}

void read_output(Reader& r, OutputConfig& o) {
    r.get("dir", o.dir);
    r.get("policy", o.policy);
    r.get("solution", o.solution);
    r.get("oc", o.oc);
    r.get("convergence", o.convergence);
    r.get("sweep", o.sweep);
    r.reject_unknown();
}

void validate(const RunConfig& cfg, std::vector<FieldIssue>& issues) {
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    const std::size_t K = cfg.snr_grid_db.size();
    if (K == 0) issues.push_back({"problem.snr_grid_db", "grid must be nonempty"});
    for (std::size_t i = 0; i < K; ++i) {
        if (!std::isfinite(cfg.snr_grid_db[i]))
            issues.push_back({"problem.snr_grid_db[" + std::to_string(i) + "]", "must be finite"});
        if (i > 0 && !(cfg.snr_grid_db[i] > cfg.snr_grid_db[i - 1]))
            issues.push_back({"problem.snr_grid_db[" + std::to_string(i) + "]",
                              "grid must be strictly increasing"});
    }
    if (!std::isfinite(cfg.snr_nominal_db))
        issues.push_back({"problem.snr_nominal_db", "must be finite"});
    if (!open_unit(cfg.alpha)) issues.push_back({"problem.alpha", "must lie in (0, 1)"});
    if (cfg.beta.size() != 1 && cfg.beta.size() != K)
        issues.push_back({"problem.beta", "must be a scalar or one value per grid point"});
    for (std::size_t i = 0; i < cfg.beta.size(); ++i)
        if (!open_unit(cfg.beta[i]))
            issues.push_back({cfg.beta.size() == 1 ? std::string("problem.beta")
                                                   : "problem.beta[" + std::to_string(i) + "]",
                              "must lie in (0, 1)"});
    if (cfg.c && cfg.gamma) issues.push_back({"problem.c", "give either c or gamma, not both"});
    if (!cfg.c && !cfg.gamma) issues.push_back({"problem.c", "one of c or gamma is required"});
    if (cfg.c && !(*cfg.c > 0.0 && std::isfinite(*cfg.c)))
        issues.push_back({"problem.c", "must be > 0"});
    if (cfg.gamma) {
        if (cfg.gamma->size() != K)
            issues.push_back({"problem.gamma", "expected one value per grid point"});
        for (std::size_t i = 0; i < cfg.gamma->size(); ++i)
            if (!((*cfg.gamma)[i] > 0.0))
                issues.push_back({"problem.gamma[" + std::to_string(i) + "]", "must be > 0"});
    }
    if (cfg.m_bar < 1) issues.push_back({"problem.m_bar", "must be >= 1"});

    const auto& o = cfg.optimizer;
    if (o.max_evals < 1) issues.push_back({"optimizer.max_evals", "must be >= 1"});
    if (o.block_size < 1) issues.push_back({"optimizer.block_size", "must be >= 1"});
    if (!(o.f_tol_rel >= 0.0)) issues.push_back({"optimizer.f_tol_rel", "must be >= 0"});
    if (o.stall_cycles < 1) issues.push_back({"optimizer.stall_cycles", "must be >= 1"});
    if (!(o.tighten_slack >= 0.0)) issues.push_back({"optimizer.tighten_slack", "must be >= 0"});
    if (!(o.psi > 0.0 && o.psi < 1.0)) issues.push_back({"optimizer.psi", "must lie in (0, 1)"});
    if (!(o.omega > 0.0 && o.omega < 1.0))
        issues.push_back({"optimizer.omega", "must lie in (0, 1)"});
    if (!(o.clamp_rel >= 0.0 && o.clamp_rel < 1.0))
        issues.push_back({"optimizer.clamp_rel", "must lie in [0, 1)"});
    if (!(o.kkt_g_factor > 0.0)) issues.push_back({"optimizer.kkt_g_factor", "must be > 0"});
    auto check_initial = [&](const std::optional<std::vector<double>>& v, const char* name) {
        if (!v) return;
        if (v->size() != K)
            issues.push_back({std::string("optimizer.") + name, "expected one value per grid point"});
        for (double x : *v)
            if (!(x >= 0.0)) issues.push_back({std::string("optimizer.") + name, "must be >= 0"});
    };
    check_initial(o.initial_lambda, "initial_lambda");
    check_initial(o.initial_mu, "initial_mu");
    if (o.initial_lambda0 && !(*o.initial_lambda0 >= 0.0))
        issues.push_back({"optimizer.initial_lambda0", "must be >= 0"});

    const auto& s = cfg.sweep;
    if (!(s.db_step > 0.0)) issues.push_back({"sweep.db_step", "must be > 0"});
    if (!(s.db_stop >= s.db_start)) issues.push_back({"sweep.db_stop", "must be >= db_start"});
    if (s.trials < 1) issues.push_back({"sweep.trials", "must be >= 1"});
    if (!(s.sigma_w_sq > 0.0)) issues.push_back({"sweep.sigma_w_sq", "must be > 0"});
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("config: malformed JSON: ") + e.what());
    }
    std::vector<FieldIssue> issues;
    RunConfig cfg;
    Reader top(doc, "", issues);
    if (top.has("problem")) {
        Reader r(doc.at("problem"), "problem", issues);
        read_problem(r, cfg, issues);
    } else {
        issues.push_back({"problem", "section is required"});
    }
    if (top.has("optimizer")) {
        Reader r(doc.at("optimizer"), "optimizer", issues);
        read_optimizer(r, cfg.optimizer);
    }
    if (top.has("sweep")) {
        Reader r(doc.at("sweep"), "sweep", issues);
        read_sweep(r, cfg.sweep);
    }
    if (top.has("output")) {
        Reader r(doc.at("output"), "output", issues);
        read_output(r, cfg.output);
    }
    top.reject_unknown();
    if (issues.empty()) validate(cfg, issues);
    if (issues.empty()) {
        try {
            (void)cfg.problem();
        } catch (const ValidationError& e) {
            for (const auto& i : e.issues()) issues.push_back({"problem." + i.path, i.message});
        }
    }
    if (!issues.empty()) throw ValidationError(std::move(issues));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json p;
    p["snr_grid_db"] = cfg.snr_grid_db;
    p["snr_nominal_db"] = cfg.snr_nominal_db;
    p["alpha"] = cfg.alpha;
    if (cfg.beta.size() == 1)
        p["beta"] = cfg.beta[0];
    else
        p["beta"] = cfg.beta;
    if (cfg.c) p["c"] = *cfg.c;
    if (cfg.gamma) p["gamma"] = *cfg.gamma;
    p["m_bar"] = cfg.m_bar;

    const auto& o = cfg.optimizer;
    json oj{{"max_evals", o.max_evals},
            {"block_size", o.block_size},
            {"adaptive_subspaces", o.adaptive_subspaces},
            {"psi", o.psi},
            {"omega", o.omega},
            {"x_tol_rel", o.x_tol_rel},
            {"x_tol_abs", o.x_tol_abs},
            {"f_tol_rel", o.f_tol_rel},
            {"stall_cycles", o.stall_cycles},
            {"polish", o.polish},
            {"polish_max_evals", o.polish_max_evals},
            {"clamp_rel", o.clamp_rel},
            {"repair", o.repair},
            {"tighten_slack", o.tighten_slack},
            {"kkt_g_factor", o.kkt_g_factor},
            {"kkt_activity_rel", o.kkt_activity_rel}};
    if (o.initial_lambda0) oj["initial_lambda0"] = *o.initial_lambda0;
    if (o.initial_lambda) oj["initial_lambda"] = *o.initial_lambda;
    if (o.initial_mu) oj["initial_mu"] = *o.initial_mu;

    const auto& s = cfg.sweep;
    json sj{{"db_start", s.db_start}, {"db_stop", s.db_stop},     {"db_step", s.db_step},
            {"trials", s.trials},     {"base_seed", s.base_seed}, {"sigma_w_sq", s.sigma_w_sq}};
    const auto& out = cfg.output;
    json outj{{"dir", out.dir},
              {"policy", out.policy},
              {"solution", out.solution},
              {"oc", out.oc},
              {"convergence", out.convergence},
              {"sweep", out.sweep}};
    json doc{{"problem", p}, {"optimizer", oj}, {"sweep", sj}, {"output", outj}};
    return doc.dump(2) + "\n";
}

ProblemSpec RunConfig::problem() const {
    static const std::vector<double> none;
    return ProblemSpec::from_db(snr_grid_db, snr_nominal_db, alpha, beta, c, gamma ? *gamma : none,
                                m_bar);
}

DualOptions RunConfig::dual_options() const {
    const ProblemSpec spec = problem();
    DualOptions d = default_dual_options(spec);
    d.subplex.max_evals = optimizer.max_evals;
    d.subplex.block_size = optimizer.block_size;
    d.subplex.adaptive_subspaces = optimizer.adaptive_subspaces;
    d.subplex.psi = optimizer.psi;
    d.subplex.omega = optimizer.omega;
    d.subplex.x_tol_rel = optimizer.x_tol_rel;
    d.subplex.x_tol_abs = optimizer.x_tol_abs;
    d.subplex.f_tol_rel = optimizer.f_tol_rel;
    d.subplex.stall_cycles = optimizer.stall_cycles;
    d.subplex.polish = optimizer.polish;
    d.subplex.polish_max_evals = optimizer.polish_max_evals;
    d.clamp_rel = optimizer.clamp_rel;
    d.repair = optimizer.repair;
    d.tighten_slack = optimizer.tighten_slack;
    d.kkt.g_factor = optimizer.kkt_g_factor;
    d.kkt.activity_rel = optimizer.kkt_activity_rel;

    // Config lists follow the config grid order (increasing dB); the spec
    // grid runs by increasing rho, i.e. decreasing dB.
    const std::size_t K = snr_grid_db.size();
    auto to_spec_order = [&](const std::vector<double>& v) {
        std::vector<double> out(K);
        for (std::size_t i = 0; i < K; ++i) out[K - 1 - i] = v[i];
        return out;
    };
    Multipliers& init = *d.initial;
    if (optimizer.initial_lambda0) init.lambda0 = *optimizer.initial_lambda0;
    if (optimizer.initial_lambda) init.lambda = to_spec_order(*optimizer.initial_lambda);
    if (optimizer.initial_mu) init.mu = to_spec_order(*optimizer.initial_mu);
    return d;
}

}  // namespace seqjde
