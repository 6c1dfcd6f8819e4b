#include "seqjde/policy_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "seqjde/config.hpp"
#include "seqjde/errors.hpp"

namespace seqjde {
namespace {

constexpr const char* kTag = "seqjde-policy";

void write_list(std::ostream& os, const char* key, const std::vector<double>& v) {
    os << key << ' ' << v.size();
    for (double x : v) os << ' ' << format_real(x);
    os << '\n';
}

double parse_real(const std::string& tok, const std::string& what) {
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw FormatError("policy file: bad number '" + tok + "' in " + what);
    return v;
}

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    // Next line split on whitespace; the first token must equal `key`.
    std::istringstream expect(const std::string& key) {
        std::string line;
        if (!std::getline(is_, line)) throw FormatError("policy file: missing '" + key + "'");
        ++line_no_;
        std::istringstream ss(line);
        std::string got;
        ss >> got;
        if (got != key)
            throw FormatError("policy file line " + std::to_string(line_no_) + ": expected '" + key +
                              "', got '" + got + "'");
        return ss;
    }

    double real(const std::string& key) {
        auto ss = expect(key);
        std::string tok;
        if (!(ss >> tok)) throw FormatError("policy file: missing value for " + key);
        return parse_real(tok, key);
    }

    std::vector<double> list(const std::string& key) {
        auto ss = expect(key);
        std::size_t n = 0;
        if (!(ss >> n)) throw FormatError("policy file: missing length for " + key);
        std::vector<double> out;
        std::string tok;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(ss >> tok)) throw FormatError("policy file: short list for " + key);
            out.push_back(parse_real(tok, key));
        }
        return out;
    }

    std::istream& stream() { return is_; }
    std::size_t& line_no() { return line_no_; }

private:
    std::istream& is_;
    std::size_t line_no_ = 0;
};

}  // namespace

void write_policy(std::ostream& os, const PolicyFile& f) {
    const auto& s = f.spec;
    os << kTag << ' ' << kPolicyFormatVersion << '\n';
    os << "config_hash " << f.config_hash << '\n';
    os << "alpha " << format_real(s.alpha) << '\n';
    os << "rho_star " << format_real(s.rho_star) << '\n';
    os << "rho_max " << format_real(s.rho_max) << '\n';
    os << "m_bar " << s.m_bar << '\n';
    os << "c " << (s.c ? format_real(*s.c) : std::string("none")) << '\n';
    write_list(os, "rho", s.rho);
    write_list(os, "beta", s.beta);
    write_list(os, "gamma", s.gamma);
    os << "lambda0 " << format_real(f.multipliers.lambda0) << '\n';
    write_list(os, "lambda", f.multipliers.lambda);
    write_list(os, "mu", f.multipliers.mu);
    const auto& p = f.policy;
    os << "states " << p.stop.size() << '\n';
    for (int m = 0; m <= p.m_bar(); ++m) {
        for (int m1 = 0; m1 <= m; ++m1) {
            const int m0 = m - m1;
            const double est = p.estimate(m0, m1);
            os << m << ' ' << m1 << ' ' << int(p.stop(m0, m1)) << ' ' << int(p.decision(m0, m1))
               << ' ' << (std::isnan(est) ? std::string("nan") : format_real(est)) << '\n';
        }
    }
}

void save_policy(const std::filesystem::path& path, const PolicyFile& file) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write policy file: " + path.string());
    write_policy(out, file);
}

PolicyFile read_policy(std::istream& is) {
    LineReader r(is);
    {
        auto ss = r.expect(kTag);
        int version = 0;
        if (!(ss >> version) || version != kPolicyFormatVersion)
            throw FormatError("policy file: unsupported format version");
    }
    PolicyFile f;
    {
        auto ss = r.expect("config_hash");
        ss >> f.config_hash;
    }
    auto& s = f.spec;
    s.alpha = r.real("alpha");
    s.rho_star = r.real("rho_star");
    s.rho_max = r.real("rho_max");
    {
        auto ss = r.expect("m_bar");
        if (!(ss >> s.m_bar)) throw FormatError("policy file: bad m_bar");
    }
    {
        auto ss = r.expect("c");
        std::string tok;
        ss >> tok;
        if (tok != "none") s.c = parse_real(tok, "c");
    }
    s.rho = r.list("rho");
    s.beta = r.list("beta");
    s.gamma = r.list("gamma");
    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw FormatError(std::string("policy file: invalid problem: ") + e.what());
    }
    f.multipliers.lambda0 = r.real("lambda0");
    f.multipliers.lambda = r.list("lambda");
    f.multipliers.mu = r.list("mu");
    try {
        f.multipliers.check_against(s);
    } catch (const ContractError& e) {
        throw FormatError(std::string("policy file: ") + e.what());
    }

    std::size_t n_states = 0;
    {
        auto ss = r.expect("states");
        if (!(ss >> n_states) || n_states != Triangle<double>::size_for(s.m_bar))
            throw FormatError("policy file: state count does not match m_bar");
    }
    auto& p = f.policy;
    p.stop = Triangle<std::uint8_t>(s.m_bar, 0);
    p.decision = Triangle<std::uint8_t>(s.m_bar, 0);
    p.estimate = Triangle<double>(s.m_bar, 0.0);
    std::string line;
    for (int m = 0; m <= s.m_bar; ++m) {
        for (int m1 = 0; m1 <= m; ++m1) {
            if (!std::getline(r.stream(), line)) throw FormatError("policy file: truncated table");
            ++r.line_no();
            std::istringstream ss(line);
            int gm = -1, gm1 = -1, stop = -1, dec = -1;
            std::string est;
            if (!(ss >> gm >> gm1 >> stop >> dec >> est) || gm != m || gm1 != m1 ||
                (stop != 0 && stop != 1) || (dec != 0 && dec != 1))
                throw FormatError("policy file line " + std::to_string(r.line_no()) +
                                  ": bad table row");
            const int m0 = m - m1;
            p.stop(m0, m1) = static_cast<std::uint8_t>(stop);
            p.decision(m0, m1) = static_cast<std::uint8_t>(dec);
            p.estimate(m0, m1) = parse_real(est, "table");
        }
    }
    for (int m1 = 0; m1 <= s.m_bar; ++m1)
        if (!p.stop(s.m_bar - m1, m1))
            throw FormatError("policy file: boundary state does not stop");
    if (config_hash(s) != f.config_hash)
        throw FormatError("policy file: config hash does not match its problem definition");
    return f;
}

PolicyFile load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open policy file: " + path.string());
    return read_policy(in);
}

}  // namespace seqjde
