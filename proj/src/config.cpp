#include "hilfer/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hilfer/errors.hpp"

namespace hilfer {

namespace {

struct Value {
    std::string text;
    bool quoted = false;
    std::size_t line = 0;
};

using Table = std::map<std::string, Value>;

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Document {
    Table problem;
    Table solver;
    std::optional<Table> stability;
    std::vector<Table> boundary;
    std::vector<std::size_t> boundary_lines;
    std::size_t stability_line = 0;
};

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

Value parse_value(const std::string& raw, std::size_t line) {
    if (raw.empty()) throw ConfigError("missing value", line);
    if (raw.front() != '"') return {raw, false, line};
    std::string out;
    std::size_t i = 1;
    for (; i < raw.size() && raw[i] != '"'; ++i) {
        if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
        out.push_back(raw[i]);
    }
    if (i >= raw.size()) throw ConfigError("unterminated string", line);
    if (!trim(raw.substr(i + 1)).empty()) throw ConfigError("unexpected text after string", line);
    return {out, true, line};
}

Document read_document(std::string_view text) {
    Document doc;
    Table* current = nullptr;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    bool seen_problem = false, seen_solver = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s == "[[boundary]]") {
            doc.boundary.emplace_back();
            doc.boundary_lines.push_back(line);
            current = &doc.boundary.back();
            continue;
        }
        if (s.front() == '[') {
            if (s == "[problem]") {
                if (seen_problem) throw ConfigError("duplicate [problem] table", line);
                seen_problem = true;
                current = &doc.problem;
            } else if (s == "[solver]") {
                if (seen_solver) throw ConfigError("duplicate [solver] table", line);
                seen_solver = true;
                current = &doc.solver;
            } else if (s == "[stability]") {
                if (doc.stability) throw ConfigError("duplicate [stability] table", line);
                doc.stability.emplace();
                doc.stability_line = line;
                current = &*doc.stability;
            } else {
                throw ConfigError("unknown table " + s, line);
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("missing key", line);
        if (!current) throw ConfigError("key '" + key + "' outside of any table", line);
        if (current->count(key)) throw ConfigError("duplicate key '" + key + "'", line);
        (*current)[key] = parse_value(trim(s.substr(eq + 1)), line);
    }
    if (!seen_problem) throw ConfigError("missing [problem] table", 0);
    return doc;
}

class Reader {
public:
    Reader(const Table& t, std::string name, std::size_t line) : t_(t), name_(std::move(name)), line_(line) {}

    bool has(const std::string& k) const { return t_.count(k) > 0; }
    std::size_t line_of(const std::string& k) const { return has(k) ? t_.at(k).line : line_; }

    double number(const std::string& k) const {
        const Value& v = require(k);
        if (v.quoted) throw ConfigError("'" + k + "' must be a number, not a string", v.line);
        try {
            return Expr::parse(v.text, {}).eval(std::map<std::string, double>{});
        } catch (const Error& e) {
            throw ConfigError("invalid number for '" + k + "': " + e.what(), v.line);
        }
    }
    double number_or(const std::string& k, double fallback) const { return has(k) ? number(k) : fallback; }

    std::size_t count(const std::string& k) const {
        const double x = number(k);
        if (!(x >= 1.0) || x != std::floor(x) || x > 1e9)
            throw ConfigError("'" + k + "' must be a positive integer", line_of(k));
        return static_cast<std::size_t>(x);
    }
    std::size_t count_or(const std::string& k, std::size_t fallback) const { return has(k) ? count(k) : fallback; }

    std::string string(const std::string& k) const {
        const Value& v = require(k);
        if (!v.quoted) throw ConfigError("'" + k + "' must be a quoted string", v.line);
        return v.text;
    }

    Expr expr(const std::string& k, std::vector<std::string> vars) const {
        const std::string src = string(k);
        try {
            return Expr::parse(src, std::move(vars));
        } catch (const Error& e) {
            throw ConfigError("in '" + k + "': " + e.what(), line_of(k));
        }
    }

    void only(std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : t_) {
            bool ok = false;
            for (const char* a : keys) ok = ok || k == a;
            if (!ok) throw ConfigError("unknown key '" + k + "' in " + name_, v.line);
        }
    }

private:
    const Value& require(const std::string& k) const {
        auto it = t_.find(k);
        if (it == t_.end()) throw ConfigError("missing key '" + k + "' in " + name_, line_);
        return it->second;
    }

    const Table& t_;
    std::string name_;
    std::size_t line_;
};

std::size_t problem_line(const Document& d) {
    std::size_t m = 0;
    for (const auto& [k, v] : d.problem) m = m ? std::min(m, v.line) : v.line;
    return m ? m - 1 : 0;
}

PhiFunction read_phi(const Reader& p, double a) {
    const std::string fam = p.has("phi") ? p.string("phi") : "identity";
    if (fam == "identity") return PhiFunction::identity();
    if (fam == "log_shift" || fam == "log") return PhiFunction::log_shift(a);
    if (fam == "power_rho" || fam == "power") {
        const double rho = p.number("rho");
        if (!(rho > 0.0)) throw ConfigError("rho must be positive", p.line_of("rho"));
        return PhiFunction::power(rho);
    }
    if (fam == "custom") {
        try {
            return PhiFunction::custom(p.expr("phi_expr", {"t"}), p.expr("phi_prime", {"t"}));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what(), p.line_of("phi_expr"));
        }
    }
    throw ConfigError("unknown phi family '" + fam + "' (identity, log_shift, power_rho, custom)", p.line_of("phi"));
}

}  // namespace

ProblemConfig parse_config(std::string_view text) {
    const Document doc = read_document(text);
    ProblemConfig cfg;
    ProblemSpec& s = cfg.spec;

    const Reader p(doc.problem, "[problem]", problem_line(doc));
    p.only({"mu", "nu", "a", "b", "phi", "rho", "phi_expr", "phi_prime", "f", "K", "L"});
    s.mu = p.number("mu");
    if (!(s.mu > 1.0 && s.mu < 2.0)) throw ConfigError("mu must satisfy 1 < mu < 2", p.line_of("mu"));
    s.nu = p.number("nu");
    if (!(s.nu >= 0.0 && s.nu <= 1.0)) throw ConfigError("nu must satisfy 0 <= nu <= 1", p.line_of("nu"));
    s.a = p.number_or("a", 0.0);
    s.b = p.number_or("b", 1.0);
    if (!(s.a < s.b)) throw ConfigError("interval requires a < b", p.line_of("b"));
    s.phi = read_phi(p, s.a);
    s.f = p.expr("f", {"t", "y", "d"});
    s.K = p.number("K");
    if (!(s.K > 0.0)) throw ConfigError("K = " + format_number(s.K) + " violates the Lipschitz hypothesis K > 0", p.line_of("K"));
    s.L = p.number("L");
    if (!(s.L > 0.0 && s.L < 1.0))
        throw ConfigError("L = " + format_number(s.L) + " violates the Lipschitz hypothesis 0 < L < 1", p.line_of("L"));

    for (std::size_t i = 0; i < doc.boundary.size(); ++i) {
        const Reader r(doc.boundary[i], "[[boundary]]", doc.boundary_lines[i]);
        r.only({"lambda", "delta", "tau"});
        BoundaryTerm bt{r.number("lambda"), r.number("delta"), r.number("tau")};
        if (!(bt.delta > 0.0)) throw ConfigError("delta must be positive", r.line_of("delta"));
        if (!(bt.tau >= s.a && bt.tau <= s.b)) throw ConfigError("tau must lie in [a, b]", r.line_of("tau"));
        if (!s.boundary.empty() && !(bt.tau > s.boundary.back().tau))
            throw ConfigError("tau values must be strictly increasing", r.line_of("tau"));
        s.boundary.push_back(bt);
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what(), p.line_of("phi"));
    }

    const std::size_t solver_line = doc.solver.empty() ? 0 : doc.solver.begin()->second.line;
    const Reader sv(doc.solver, "[solver]", solver_line);
    sv.only({"N", "grading", "outer_tol", "outer_max_iters", "inner_tol", "inner_max_iters", "initial_guess"});
    SolverConfig& c = cfg.solver;
    c.grid_size = sv.count_or("N", c.grid_size);
    if (c.grid_size < 2) throw ConfigError("N must be at least 2", sv.line_of("N"));
    c.grading = sv.number_or("grading", c.grading);
    if (!(c.grading >= 1.0)) throw ConfigError("grading must be >= 1", sv.line_of("grading"));
    c.outer_tol = sv.number_or("outer_tol", c.outer_tol);
    if (!(c.outer_tol > 0.0)) throw ConfigError("outer_tol must be positive", sv.line_of("outer_tol"));
    c.inner_tol = sv.number_or("inner_tol", c.inner_tol);
    if (!(c.inner_tol > 0.0)) throw ConfigError("inner_tol must be positive", sv.line_of("inner_tol"));
    c.outer_max_iters = sv.count_or("outer_max_iters", c.outer_max_iters);
    c.inner_max_iters = sv.count_or("inner_max_iters", c.inner_max_iters);
    if (sv.has("initial_guess")) {
        const std::string g = sv.string("initial_guess");
        if (g == "zero") c.initial_guess = InitialGuess::Zero;
        else if (g == "boundary_shape") c.initial_guess = InitialGuess::BoundaryShape;
        else throw ConfigError("initial_guess must be \"zero\" or \"boundary_shape\"", sv.line_of("initial_guess"));
    }

    if (doc.stability) {
        const Reader st(*doc.stability, "[stability]", doc.stability_line);
        st.only({"chi", "K_star", "perturbation", "amplitude"});
        StabilityConfig sc;
        if (st.has("chi")) sc.chi = st.expr("chi", {"t"});
        if (st.has("K_star")) {
            sc.K_star = st.number("K_star");
            if (!(*sc.K_star > 0.0)) throw ConfigError("K_star must be positive", st.line_of("K_star"));
        }
        if (st.has("perturbation")) sc.perturbation = st.expr("perturbation", {"t"});
        sc.amplitude = st.number_or("amplitude", sc.amplitude);
        if (!(sc.amplitude >= 0.0)) throw ConfigError("amplitude must be nonnegative", st.line_of("amplitude"));
        cfg.stability = std::move(sc);
    }
    return cfg;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string num(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

}  // namespace

std::string serialize_config(const ProblemConfig& cfg) {
    const ProblemSpec& s = cfg.spec;
    std::ostringstream o;
    o << "[problem]\n";
    o << "mu = " << num(s.mu) << "\n";
    o << "nu = " << num(s.nu) << "\n";
    o << "a = " << num(s.a) << "\n";
    o << "b = " << num(s.b) << "\n";
    switch (s.phi.family()) {
        case PhiFamily::Identity: o << "phi = \"identity\"\n"; break;
        case PhiFamily::LogShift: o << "phi = \"log_shift\"\n"; break;
        case PhiFamily::PowerRho: o << "phi = \"power_rho\"\nrho = " << num(s.phi.rho()) << "\n"; break;
        case PhiFamily::Custom:
            o << "phi = \"custom\"\nphi_expr = " << quote(s.phi.phi_expr().to_string())
              << "\nphi_prime = " << quote(s.phi.phi_prime_expr().to_string()) << "\n";
            break;
    }
    o << "f = " << quote(s.f.to_string()) << "\n";
    o << "K = " << num(s.K) << "\n";
    o << "L = " << num(s.L) << "\n";
    for (const auto& bt : s.boundary)
        o << "\n[[boundary]]\nlambda = " << num(bt.lambda) << "\ndelta = " << num(bt.delta) << "\ntau = " << num(bt.tau)
          << "\n";
    const SolverConfig& c = cfg.solver;
    o << "\n[solver]\n";
    o << "N = " << c.grid_size << "\n";
    o << "grading = " << num(c.grading) << "\n";
    o << "outer_tol = " << num(c.outer_tol) << "\n";
    o << "outer_max_iters = " << c.outer_max_iters << "\n";
    o << "inner_tol = " << num(c.inner_tol) << "\n";
    o << "inner_max_iters = " << c.inner_max_iters << "\n";
    o << "initial_guess = " << (c.initial_guess == InitialGuess::Zero ? "\"zero\"" : "\"boundary_shape\"") << "\n";
    if (cfg.stability) {
        const StabilityConfig& st = *cfg.stability;
        o << "\n[stability]\n";
        if (st.chi) o << "chi = " << quote(st.chi->to_string()) << "\n";
        if (st.K_star) o << "K_star = " << num(*st.K_star) << "\n";
        o << "perturbation = " << quote(st.perturbation.to_string()) << "\n";
        o << "amplitude = " << num(st.amplitude) << "\n";
    }
    return o.str();
}

}  // namespace hilfer
