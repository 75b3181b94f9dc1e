#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hilfer/bvp.hpp"
#include "hilfer/solver.hpp"

namespace hilfer {

struct StabilityConfig {
    std::optional<Expr> chi;  // in t
    std::optional<double> K_star;
    Expr perturbation = Expr::parse("cos(t)", {"t"});  // shape of the injected defect
    double amplitude = 0.01;

    friend bool operator==(const StabilityConfig&, const StabilityConfig&) = default;
};

/// Everything a configuration file describes.
///
/// The format is a small TOML subset: `[problem]`, `[solver]` and
/// `[stability]` tables, repeated `[[boundary]]` tables, `key = value` lines
/// and `#` comments. Values are double-quoted strings or unquoted constant
/// arithmetic (`10/7`, `1/(10*e)`).
struct ProblemConfig {
    ProblemSpec spec;
    SolverConfig solver;
    std::optional<StabilityConfig> stability;

    friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

/// Parses and validates; every failure is a ConfigError carrying a line number.
ProblemConfig parse_config(std::string_view text);
ProblemConfig load_config(const std::string& path);

/// Text that parse_config maps back to an equal ProblemConfig.
std::string serialize_config(const ProblemConfig& cfg);

}  // namespace hilfer
