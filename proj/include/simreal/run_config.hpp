#pragma once

#include <string>

#include "simreal/dataset.hpp"
#include "simreal/synth.hpp"
#include "simreal/train.hpp"

namespace simreal {

// One reproducibility artifact per run: a single JSON file with documented
// sections. Unknown keys anywhere are rejected. Scalar values may be
// overridden by command-line flags.
struct RunConfig {
    Schema schema;  // derived from scenario.d when the section is absent
    bool schema_given = false;

    struct Paths {
        std::string source;
        std::string target;
        std::string control_source;
        std::string control_target;
    } paths;

    TrainConfig train;
    ScenarioConfig scenario;
    double agreement_threshold = 0.09;
    std::string output_dir = "out";
};

// Parses and validates the config file. Throws ConfigError for unknown or
// ill-typed keys, ParseError when the file cannot be read.
RunConfig load_run_config(const std::string& path);

// The schema actually used for loading files: the configured one, or the
// synth convention (f0..f{d-1}, label "signal", weight "weight") otherwise.
Schema effective_schema(const RunConfig& cfg);

}  // namespace simreal
