#pragma once

// Reproducible run descriptions: a JSON document mirroring SimulationConfig
// plus artifact plumbing (output path, RNG seed for randomized verification
// suites).  Parsing is strict — unknown keys are rejected — and `--set`
// overrides are applied to the document before validation, so typos surface
// as configuration errors rather than silently doing nothing.

#include <cstdint>
#include <string>
#include <vector>

#include "qdd/dynamics.hpp"

namespace qdd {

struct RunConfig {
    SimulationConfig sim;
    std::string initial_label = "custom";  // named state, or "custom" for raw amplitudes
    std::string output;                    // CSV path; empty = no file, print summary only
    std::uint64_t seed = 1;                // seeds the randomized verification suites
};

// The protected reference states addressable by name in configs.
StateVector named_state(const std::string& label);

// Parse a JSON document, apply `key=value` overrides (dotted paths descend
// into objects, numeric segments index arrays), then validate strictly.
// Throws ValidationError on malformed JSON, unknown keys, or bad values.
RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// Serialize with every field spelled out; parse_run_config round-trips it.
std::string dump_run_config(const RunConfig& config);

// Named experiment bundles reproducing the reference figures.
struct PresetRun {
    std::string label;
    RunConfig config;
};
std::vector<PresetRun> preset_runs(const std::string& name);  // fig3a | fig4 | fig5

// Base configuration and pulse-interval grid for the schedule-crossover table.
RunConfig table_base();
std::vector<double> table_intervals();

} // namespace qdd
