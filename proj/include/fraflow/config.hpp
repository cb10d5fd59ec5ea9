#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fraflow/profiles.hpp"

namespace fraflow {

// Raised for malformed files, unknown keys, and constraint violations; the
// CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string name = "experiment";
    unsigned long long seed = 1806;

    ModelParams params;  // defaults: d=1, s=0, m=0.75, M=1

    struct GridCfg {
        int n = 512;
        double L = 20.0;
    } grid;

    struct IntegratorCfg {
        double T = 1.0;
        double stride = 0.02;
        double cfl = 0.2;
        double floor_rel = 1e-8;
        double fixed_dt = 0.0;
        std::string init = "stationary";  // or "gaussian"
        double kappa_ref = 0.0;           // > 0 enables the slope verdict
    } integrator;

    struct OptimizerCfg {
        int max_iters = 2000;
        double step0 = 0.5;
        bool polish = true;
        int polish_iters = 300;
    } optimizer;

    struct GapCfg {
        int max_iters = 400;
        int restarts = 3;
        double tol = 1e-11;
        double floor_rel = 1e-10;
        bool check_stationarity = false;
    } gap;

    struct OutputCfg {
        std::string dir;  // empty = unset; resolution order is CLI, env, here
    } output;

    struct SweepCfg {
        std::string key;  // "params.m" | "params.s" | "params.M"
        std::vector<double> values;
        std::string run = "gns";  // inner subcommand per sweep point
    } sweep;
};

// Parses and validates an INI-style file: [section] headers, key = value
// lines, '#'/';' comments. Unknown sections or keys are errors, as are
// violated model constraints.
ExperimentConfig parse_config(const std::string& path);

// Validation shared with the parser; throws ConfigError naming the
// constraint.
void validate_config(const ExperimentConfig& cfg);

// The fully resolved config, serialized back in the accepted INI grammar.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace fraflow
