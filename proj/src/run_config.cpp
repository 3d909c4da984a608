#include "qdd/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "qdd/dfs.hpp"
#include "qdd/errors.hpp"

namespace qdd {

namespace {

using nlohmann::ordered_json;

PauliAxis parse_axis(const std::string& name) {
    if (name == "x") return PauliAxis::x;
    if (name == "y") return PauliAxis::y;
    if (name == "z") return PauliAxis::z;
    throw ValidationError("unknown coupling axis '" + name + "' (use x, y, or z)");
}

CycleKind parse_cycle(const std::string& name) {
    if (name == "optimal") return CycleKind::optimal;
    if (name == "cyclic") return CycleKind::cyclic;
    if (name == "original4") return CycleKind::original4;
    if (name == "none") return CycleKind::none;
    throw ValidationError("unknown cycle kind '" + name +
                          "' (use optimal, cyclic, original4, or none)");
}

ScheduleKind parse_schedule(const std::string& name) {
    if (name == "periodic") return ScheduleKind::periodic;
    if (name == "concatenated") return ScheduleKind::concatenated;
    throw ValidationError("unknown schedule '" + name + "' (use periodic or concatenated)");
}

ExecutionPolicy parse_exec(const std::string& name) {
    if (name == "serial") return ExecutionPolicy::serial;
    if (name == "parallel") return ExecutionPolicy::parallel;
    throw ValidationError("unknown execution policy '" + name + "' (use serial or parallel)");
}

BathSpec parse_bath(const ordered_json& node) {
    if (!node.is_object()) throw ValidationError("each bath entry must be an object");
    BathSpec spec;
    for (const auto& [key, value] : node.items()) {
        if (key == "axis") spec.axis = parse_axis(value.get<std::string>());
        else if (key == "coupling") spec.coupling = value.get<double>();
        else if (key == "memory_rate") spec.memory_rate = value.get<double>();
        else if (key == "n_max") spec.n_max = value.get<int>();
        else if (key == "enabled") spec.enabled = value.get<bool>();
        else throw ValidationError("unknown bath key '" + key + "'");
    }
    return spec;
}

PulseMode parse_pulse(const ordered_json& node) {
    if (!node.is_object()) throw ValidationError("'pulse' must be an object with a 'kind'");
    std::string kind;
    double strength = 0.0;
    bool has_strength = false;
    for (const auto& [key, value] : node.items()) {
        if (key == "kind") kind = value.get<std::string>();
        else if (key == "strength") { strength = value.get<double>(); has_strength = true; }
        else throw ValidationError("unknown pulse key '" + key + "'");
    }
    if (kind == "ideal") {
        if (has_strength)
            throw ValidationError("'pulse.strength' is only valid for finite pulses");
        return PulseMode::Ideal();
    }
    if (kind == "finite") {
        if (!has_strength) throw ValidationError("finite pulses require 'pulse.strength'");
        return PulseMode::Finite(strength);
    }
    throw ValidationError("unknown pulse kind '" + kind + "' (use ideal or finite)");
}

StateVector parse_amplitudes(const ordered_json& node, int n_qubits) {
    const Index size = Index(1) << n_qubits;
    if (!node.is_array() || static_cast<Index>(node.size()) != size)
        throw ValidationError("'initial' amplitude list must have 2^n_qubits entries");
    Vector amps(size);
    for (Index i = 0; i < size; ++i) {
        const auto& entry = node[static_cast<size_t>(i)];
        if (entry.is_number()) {
            amps(i) = Complex(entry.get<double>(), 0.0);
        } else if (entry.is_array() && entry.size() == 2) {
            amps(i) = Complex(entry[0].get<double>(), entry[1].get<double>());
        } else {
            throw ValidationError("'initial' entries must be numbers or [re, im] pairs");
        }
    }
    return StateVector(std::vector<Index>(static_cast<size_t>(n_qubits), 2), amps);
}

bool is_index(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
}

void apply_override(ordered_json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override '" + assignment + "' is not of the form key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    ordered_json value;
    try {
        value = ordered_json::parse(text);
    } catch (const ordered_json::exception&) {
        value = text;  // bare words (axis names, labels) stay strings
    }

    ordered_json* node = &doc;
    std::istringstream segments(path);
    std::string segment;
    std::vector<std::string> parts;
    while (std::getline(segments, segment, '.')) parts.push_back(segment);
    if (parts.empty()) throw ValidationError("override '" + assignment + "' has an empty key");

    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        const std::string& p = parts[i];
        if (is_index(p)) {
            if (!node->is_array() || std::stoul(p) >= node->size())
                throw ValidationError("override path '" + path + "' indexes past the array");
            node = &(*node)[std::stoul(p)];
        } else {
            node = &(*node)[p];  // creates objects; unknown keys are rejected later
        }
    }
    const std::string& leaf = parts.back();
    if (is_index(leaf)) {
        if (!node->is_array() || std::stoul(leaf) >= node->size())
            throw ValidationError("override path '" + path + "' indexes past the array");
        (*node)[std::stoul(leaf)] = value;
    } else {
        (*node)[leaf] = value;
    }
}

RunConfig from_document(const ordered_json& doc) {
    if (!doc.is_object()) throw ValidationError("configuration must be a JSON object");

    RunConfig run;
    SimulationConfig& sim = run.sim;
    if (doc.contains("n_qubits")) sim.n_qubits = doc["n_qubits"].get<int>();

    bool saw_baths = false;
    bool saw_initial = false;
    ordered_json initial_node;

    for (const auto& [key, value] : doc.items()) {
        if (key == "n_qubits") continue;  // consumed above
        else if (key == "omega") sim.omega = value.get<double>();
        else if (key == "shared_bath") sim.shared_bath = value.get<bool>();
        else if (key == "baths") {
            if (!value.is_array()) throw ValidationError("'baths' must be an array");
            sim.baths.clear();
            for (const auto& entry : value) sim.baths.push_back(parse_bath(entry));
            saw_baths = true;
        } else if (key == "cycle") sim.cycle = parse_cycle(value.get<std::string>());
        else if (key == "cycle_sites") sim.cycle_sites = value.get<int>();
        else if (key == "schedule") sim.schedule = parse_schedule(value.get<std::string>());
        else if (key == "repeats") sim.repeats = value.get<int>();
        else if (key == "tau") sim.tau = value.get<double>();
        else if (key == "pulse") sim.pulse = parse_pulse(value);
        else if (key == "t_final") sim.t_final = value.get<double>();
        else if (key == "dt") sim.dt = value.get<double>();
        else if (key == "initial") { initial_node = value; saw_initial = true; }
        else if (key == "sample_points") sim.sample_points = value.get<int>();
        else if (key == "exec") sim.exec = parse_exec(value.get<std::string>());
        else if (key == "dense_rhs") sim.dense_rhs = value.get<bool>();
        else if (key == "output") run.output = value.get<std::string>();
        else if (key == "seed") run.seed = value.get<std::uint64_t>();
        else throw ValidationError("unknown configuration key '" + key + "'");
    }

    if (!saw_baths)
        sim.baths.assign(sim.shared_bath ? 1 : static_cast<size_t>(sim.n_qubits), BathSpec{});
    if (!saw_initial)
        throw ValidationError("configuration requires 'initial' (a named state or amplitudes)");

    if (initial_node.is_string()) {
        run.initial_label = initial_node.get<std::string>();
        sim.initial = named_state(run.initial_label);
        if (sim.initial.size() != (Index(1) << sim.n_qubits))
            throw ValidationError("initial state '" + run.initial_label + "' describes a " +
                                  std::to_string(sim.initial.dims.size()) +
                                  "-qubit register, but n_qubits = " +
                                  std::to_string(sim.n_qubits));
    } else {
        run.initial_label = "custom";
        sim.initial = parse_amplitudes(initial_node, sim.n_qubits);
    }
    return run;
}

ordered_json bath_to_json(const BathSpec& spec) {
    return ordered_json{{"axis", to_string(spec.axis)},
                        {"coupling", spec.coupling},
                        {"memory_rate", spec.memory_rate},
                        {"n_max", spec.n_max},
                        {"enabled", spec.enabled}};
}

std::vector<BathSpec> standard_baths(int n, int n_max) {
    return std::vector<BathSpec>(static_cast<size_t>(n),
                                 BathSpec{PauliAxis::x, 0.1, 1.0, n_max, true});
}

} // namespace

StateVector named_state(const std::string& label) {
    if (label == "singlet") return singlet_state();
    if (label == "singlet_pair") return singlet_pair_state();
    if (label == "balanced_dark") return balanced_dark_state();
    throw ValidationError("unknown initial state '" + label +
                          "' (use singlet, singlet_pair, or balanced_dark)");
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::string>& overrides) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("configuration is not valid JSON: ") + e.what());
    }
    try {
        for (const std::string& assignment : overrides) apply_override(doc, assignment);
        return from_document(doc);
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("bad configuration value: ") + e.what());
    }
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open configuration file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str(), overrides);
}

std::string dump_run_config(const RunConfig& config) {
    const SimulationConfig& sim = config.sim;
    ordered_json doc;
    doc["n_qubits"] = sim.n_qubits;
    doc["omega"] = sim.omega;
    doc["shared_bath"] = sim.shared_bath;
    doc["baths"] = ordered_json::array();
    for (const BathSpec& spec : sim.baths) doc["baths"].push_back(bath_to_json(spec));
    doc["cycle"] = to_string(sim.cycle);
    doc["cycle_sites"] = sim.cycle_sites;
    doc["schedule"] = to_string(sim.schedule);
    doc["repeats"] = sim.repeats;
    doc["tau"] = sim.tau;
    if (sim.pulse.kind == PulseMode::ideal) {
        doc["pulse"] = ordered_json{{"kind", "ideal"}};
    } else {
        doc["pulse"] = ordered_json{{"kind", "finite"}, {"strength", sim.pulse.strength}};
    }
    doc["t_final"] = sim.t_final;
    doc["dt"] = sim.dt;
    if (config.initial_label != "custom") {
        doc["initial"] = config.initial_label;
    } else {
        ordered_json amps = ordered_json::array();
        for (Index i = 0; i < sim.initial.size(); ++i)
            amps.push_back({sim.initial.amps(i).real(), sim.initial.amps(i).imag()});
        doc["initial"] = amps;
    }
    doc["sample_points"] = sim.sample_points;
    doc["exec"] = sim.exec == ExecutionPolicy::serial ? "serial" : "parallel";
    doc["dense_rhs"] = sim.dense_rhs;
    doc["output"] = config.output;
    doc["seed"] = config.seed;
    return doc.dump(2) + "\n";
}

std::vector<PresetRun> preset_runs(const std::string& name) {
    auto controlled = [](RunConfig base, CycleKind cycle, PulseMode pulse, int repeats,
                         double tau, std::string label, std::string file) {
        base.sim.cycle = cycle;
        base.sim.pulse = pulse;
        base.sim.schedule = ScheduleKind::periodic;
        base.sim.repeats = repeats;
        base.sim.tau = tau;
        base.output = std::move(file);
        return PresetRun{std::move(label), std::move(base)};
    };

    if (name == "fig3a") {
        RunConfig base;
        base.sim.n_qubits = 2;
        base.sim.baths = standard_baths(2, 2);
        base.sim.t_final = 4.0;
        base.sim.initial = named_state("singlet");
        base.initial_label = "singlet";

        RunConfig free_decay = base;
        free_decay.sim.cycle = CycleKind::none;
        free_decay.output = "fig3a_uncontrolled.csv";
        return {{"uncontrolled", free_decay},
                controlled(base, CycleKind::optimal, PulseMode::Finite(M_PI), 8, 0.25,
                           "finite", "fig3a_finite.csv"),
                controlled(base, CycleKind::optimal, PulseMode::Ideal(), 8, 0.25,
                           "ideal", "fig3a_ideal.csv")};
    }
    if (name == "fig4") {
        RunConfig base;
        base.sim.n_qubits = 4;
        base.sim.baths = standard_baths(4, 1);
        base.sim.t_final = 4.0;
        base.sim.initial = named_state("singlet_pair");
        base.initial_label = "singlet_pair";

        RunConfig free_decay = base;
        free_decay.sim.cycle = CycleKind::none;
        free_decay.output = "fig4_uncontrolled.csv";
        return {{"uncontrolled", free_decay},
                controlled(base, CycleKind::optimal, PulseMode::Finite(M_PI), 4, 0.25,
                           "finite", "fig4_finite.csv"),
                controlled(base, CycleKind::optimal, PulseMode::Ideal(), 4, 0.25,
                           "ideal", "fig4_ideal.csv")};
    }
    if (name == "fig5") {
        RunConfig base;
        base.sim.n_qubits = 4;
        base.sim.baths = standard_baths(4, 1);
        base.sim.t_final = 4.0;
        base.sim.initial = named_state("singlet_pair");
        base.initial_label = "singlet_pair";
        // The one-by-one shift fires three exchange windows per station; at
        // J = pi*omega each window lasts (pi/4)/J = 0.25, so the interval must
        // hold a 0.75-long station.  tau = 1 is the only whole-cycle fit in
        // t_final = 4, and both schemes run at the same tau for a fair race.
        return {controlled(base, CycleKind::optimal, PulseMode::Finite(M_PI), 1, 1.0,
                           "optimal_finite", "fig5_optimal_finite.csv"),
                controlled(base, CycleKind::original4, PulseMode::Finite(M_PI), 1, 1.0,
                           "original_finite", "fig5_original_finite.csv"),
                controlled(base, CycleKind::optimal, PulseMode::Ideal(), 1, 1.0,
                           "optimal_ideal", "fig5_optimal_ideal.csv"),
                controlled(base, CycleKind::original4, PulseMode::Ideal(), 1, 1.0,
                           "original_ideal", "fig5_original_ideal.csv")};
    }
    throw ValidationError("unknown preset '" + name +
                          "' (use fig3a, fig4, fig5, or table1 via the table1 command)");
}

RunConfig table_base() {
    RunConfig base;
    base.sim.n_qubits = 4;
    base.sim.baths = standard_baths(4, 1);
    base.sim.cycle = CycleKind::optimal;
    base.sim.pulse = PulseMode::Ideal();
    base.sim.initial = named_state("singlet_pair");
    base.initial_label = "singlet_pair";
    base.output = "table1.csv";
    return base;
}

std::vector<double> table_intervals() { return {1.0 / 20.0, 1.0 / 100.0, 1.0 / 250.0}; }

} // namespace qdd
