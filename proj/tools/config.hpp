#pragma once

#include <string>

#include "cbi/model.hpp"

namespace cbi::cli {

/// Line-oriented `key = value` config with [model] and [experiment]
/// sections and `#` comments. Unknown keys are rejected.
struct ExperimentConfig {
    ModelParams model;
    long n = 1000;
    long reps = 1000;
    std::uint64_t seed = 1;
    double euler_h = 1.0 / 256.0;
    double limit_h = 5e-4;
    std::string output;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace cbi::cli
