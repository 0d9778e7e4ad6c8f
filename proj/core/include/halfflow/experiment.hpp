#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace halfflow {

// Command-line overrides that take precedence over config-file keys.
struct CliOverrides {
    std::optional<std::uint64_t> seed; // --seed
    std::optional<std::string> out;    // --out, overrides output_dir
    std::optional<std::string> trace;  // scan/bubble: --trace <dir>
    std::optional<std::string> radii;  // scan: --radii "r1,r2,..."
    std::optional<std::string> at;     // bubble: --at "t,x,R"
};

// Runs one subcommand (calibrate | flow | scan | bubble | variational |
// wente | accept).  config_path may be empty when every required key
// is supplied by overrides or defaults.  Creates the output directory,
// writes the artifacts for the subcommand together with the resolved
// configuration and the calibration record used, and returns the
// process exit status.  Failures print a JSON object
// {code, message, context} on stderr and return nonzero.
int run_experiment(const std::string& subcommand, const std::string& config_path,
                   const CliOverrides& overrides);

} // namespace halfflow
