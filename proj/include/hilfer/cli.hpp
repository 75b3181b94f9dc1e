#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace hilfer::cli {

enum ExitCode : int {
    kOk = 0,
    kVerdictFailed = 1,
    kConfigError = 2,
    kComputeError = 3,
    kDiverged = 4,
};

struct Options {
    std::string config_path;
    std::string out_path;
    std::string kind = "uh";
    std::optional<double> perturb_amplitude;
    std::optional<std::size_t> grid_size;
    std::optional<std::string> phi_variant;  // identity | log | power
};

int cmd_check(const Options& o, std::ostream& out, std::ostream& err);
int cmd_solve(const Options& o, std::ostream& out, std::ostream& err);
int cmd_certify(const Options& o, std::ostream& out, std::ostream& err);
int cmd_reproduce_example(const Options& o, std::ostream& out, std::ostream& err);

/// Parses argv (subcommand plus flags) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// The bundled example problem as configuration text.
std::string example_config_text();

}  // namespace hilfer::cli
