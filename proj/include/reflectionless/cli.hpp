#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflectionless/identities.hpp"
#include "reflectionless/soliton.hpp"

namespace refl {

struct GridSpec {
    double xmin = 0.0;
    double xmax = 0.0;
    int points = 0;
};

struct RunConfig {
    std::string command;
    std::string config_path;             // may be empty for `verify --fuzz`
    std::optional<GridSpec> grid;
    std::string output;                  // empty: standard output
    std::string format;                  // empty: the command's own default
    std::optional<std::uint64_t> seed;
    int order = 0;
    std::vector<double> k;               // scattering wavenumbers
    std::string scheme;
    std::vector<int> deleted;
    std::map<int, double> e;
    bool unsafe = false;
    bool all = false;
    std::string identity;
    int fuzz = 0;                        // random configs for `verify --fuzz`
    std::optional<double> tol;
    double big_t = 3.0;
    GridSpec tgrid{0.0, 1.0, 5};
    double step = 1e-3;
};

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitNumerical = 3 };

/// {"k": [...], "c": [...], "times": {"3": t3, ...}} -> validated config.
SolitonConfig parse_config(const std::string& text);
std::string config_to_json(const SolitonConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Arguments after the program name. Throws UsageError; `help` is set to the
/// help text instead when --help is given.
RunConfig parse_args(const std::vector<std::string>& args, std::string* help = nullptr);

int run(const RunConfig& rc, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-code mapping of every error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string report_json(const std::vector<VerificationReport>& reports, bool pass);

}  // namespace refl
