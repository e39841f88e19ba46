#pragma once

#include <string>
#include <vector>

#include "envelab/config.hpp"

namespace envelab::experiments {

// Exit codes of the runner: 0 all checks pass, 1 at least one assertion
// failed, 2 configuration error, 3 numerical escalation exhausted.
enum ExitCode : int { kPass = 0, kAssertionFailed = 1, kConfigError = 2, kNumericFailure = 3 };

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string kind;  // "rel", "abs", "bool", "trend"
    bool pass = false;
    std::string note;
};

struct Result {
    int exit_code = kPass;
    std::vector<Check> checks;
    std::string summary_json;  // serialized summary, also written to out/summary.json
};

// Known experiments: arc-decay, radial-distribution, transfer-identity,
// ball-growth, schatten-convergence, property-suite.
const std::vector<std::string>& experiment_names();

Result run(const std::string& experiment, const config::Config& cfg, const std::string& out_dir,
           int threads = 0, long precision_bits_override = 0);

// Assembles a default configuration text for the experiment (the values the
// acceptance runs use).
std::string default_config(const std::string& experiment);

}  // namespace envelab::experiments
