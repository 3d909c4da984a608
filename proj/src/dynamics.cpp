#include "qdd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qdd {

double BathSpec::mode_coupling() const {
    return std::sqrt(coupling * memory_rate / 2.0);
}

std::string to_string(CycleKind kind) {
    switch (kind) {
        case CycleKind::optimal: return "optimal";
        case CycleKind::cyclic: return "cyclic";
        case CycleKind::original4: return "original4";
        case CycleKind::none: return "none";
    }
    return "unknown";
}

std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::periodic ? "periodic" : "concatenated";
}

double SimulationConfig::default_step() const {
    const double base = 0.005 / omega;
    if (cycle == CycleKind::none) return base;
    return std::min(tau / 20.0, base);
}

namespace {

uint64_t fnv1a(const void* data, size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

DecouplingCycle make_cycle(const SimulationConfig& config) {
    const int sites = config.cycle_sites > 0 ? config.cycle_sites : config.n_qubits;
    DecouplingCycle cycle;
    switch (config.cycle) {
        case CycleKind::optimal: cycle = optimal_cycle(sites); break;
        case CycleKind::cyclic: cycle = cyclic_cycle(sites); break;
        case CycleKind::original4:
            if (sites != 4)
                throw ValidationError("the sequential reference cycle routes 4 sites");
            cycle = original_cycle_4();
            break;
        case CycleKind::none:
            throw ValidationError("no cycle requested");
    }
    if (cycle.n_qubits != config.n_qubits)
        throw ValidationError("cycle routes " + std::to_string(cycle.n_qubits) +
                              " sites but the register has " +
                              std::to_string(config.n_qubits) +
                              " qubits (odd routing needs the ancilla site included)");
    return cycle;
}

Matrix lowering_operator(int n_max) {
    const Index d = n_max + 1;
    Matrix a = Matrix::Zero(d, d);
    for (Index k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

} // namespace

std::string SimulationConfig::fingerprint() const {
    std::ostringstream os;
    os.precision(12);
    os << "n=" << n_qubits << ";omega=" << omega << ";shared=" << shared_bath
       << ";baths=";
    for (const BathSpec& b : baths)
        os << to_string(b.axis) << ":" << b.coupling << ":" << b.memory_rate << ":"
           << b.n_max << ":" << b.enabled << ",";
    os << ";cycle=" << to_string(cycle) << ";sites=" << cycle_sites
       << ";schedule=" << to_string(schedule) << ";repeats=" << repeats
       << ";tau=" << tau << ";pulse=";
    if (pulse.kind == PulseMode::ideal) os << "ideal";
    else os << "J=" << pulse.strength;
    os << ";tf=" << t_final << ";dt=" << step_size() << ";points=" << sample_points
       << ";init=" << std::hex
       << fnv1a(initial.amps.data(), sizeof(Complex) * static_cast<size_t>(initial.size()));
    return os.str();
}

void validate_config(const SimulationConfig& config) {
    if (config.n_qubits < 1) throw ValidationError("need at least one qubit");
    if (config.omega <= 0) throw ValidationError("omega must be positive");
    if (config.shared_bath) {
        if (config.baths.empty())
            throw ValidationError("shared bath needs one bath specification");
    } else if (config.baths.size() != static_cast<size_t>(config.n_qubits)) {
        throw ValidationError("need one bath specification per qubit");
    }
    for (const BathSpec& b : config.baths) {
        if (b.coupling < 0) throw ValidationError("bath coupling must be >= 0");
        if (b.memory_rate <= 0) throw ValidationError("bath memory rate must be > 0");
        if (b.n_max < 1) throw ValidationError("bosonic truncation must be >= 1");
    }
    if (config.initial.size() != (Index(1) << config.n_qubits))
        throw ValidationError("initial state size does not match the register");
    if (!config.initial.is_normalized(1e-9))
        throw ValidationError("initial state is not normalized");
    if (config.t_final <= 0) throw ValidationError("t_final must be positive");
    if (config.sample_points < 1) throw ValidationError("need at least one sample interval");
    if (config.cycle != CycleKind::none) {
        if (config.tau <= 0) throw ValidationError("pulse interval must be positive");
        if (config.repeats < 1) throw ValidationError("repeats must be >= 1");
        if (config.schedule == ScheduleKind::concatenated && config.repeats != 1)
            throw ValidationError("the concatenated schedule runs one super-cycle");
        const DecouplingCycle cycle = make_cycle(config);
        const double m = static_cast<double>(cycle.intervals);
        const double nominal = config.schedule == ScheduleKind::periodic
                                   ? config.repeats * m * config.tau
                                   : m * m * config.tau;
        if (std::abs(config.t_final - nominal) > 1e-9 * std::max(1.0, nominal))
            throw ValidationError("t_final must equal a whole number of cycles (" +
                                  std::to_string(nominal) + ")");
    }
    if (config.dt > 0 && config.dt > config.default_step() * (1 + 1e-12))
        throw ValidationError("integrator step exceeds min(tau/20, 0.005/omega)");
}

Model build_model(const SimulationConfig& config) {
    validate_config(config);
    Model model;
    const Index qubit_side = Index(1) << config.n_qubits;
    model.dims.push_back(qubit_side);
    model.mode_axis.assign(static_cast<size_t>(config.n_qubits), -1);

    struct ModeEntry {
        int axis;
        const BathSpec* spec;
        Matrix coupling_op;  // qubit-side operator attached to this mode
    };
    std::vector<ModeEntry> modes;

    if (config.shared_bath) {
        const BathSpec& spec = config.baths.front();
        if (spec.enabled) {
            model.dims.push_back(spec.n_max + 1);
            const int axis = static_cast<int>(model.dims.size()) - 1;
            for (int i = 0; i < config.n_qubits; ++i)
                model.mode_axis[static_cast<size_t>(i)] = axis;
            modes.push_back({axis, &spec, collective_spin(spec.axis, config.n_qubits).mat});
        }
    } else {
        for (int i = 0; i < config.n_qubits; ++i) {
            const BathSpec& spec = config.baths[static_cast<size_t>(i)];
            if (!spec.enabled) continue;
            model.dims.push_back(spec.n_max + 1);
            const int axis = static_cast<int>(model.dims.size()) - 1;
            model.mode_axis[static_cast<size_t>(i)] = axis;
            modes.push_back({axis, &spec, pauli_on(spec.axis, i + 1, config.n_qubits).mat});
        }
    }
    if (model.side() > kDefaultMaxSide)
        throw CapacityError("model dimension " + std::to_string(model.side()) +
                            " exceeds the capacity limit " +
                            std::to_string(kDefaultMaxSide));

    model.hamiltonian.dims = model.dims;
    StructuredTerm system;
    system.weight = config.omega / 2.0;
    system.factors.push_back({0, collective_spin(PauliAxis::z, config.n_qubits).mat});
    model.hamiltonian.terms.push_back(std::move(system));

    for (const ModeEntry& mode : modes) {
        const Matrix a = lowering_operator(mode.spec->n_max);
        const double g = mode.spec->mode_coupling();
        if (g > 0) {
            StructuredTerm term;
            term.weight = g;
            term.factors.push_back({0, mode.coupling_op});
            term.factors.push_back({mode.axis, Matrix(a + Matrix(a.adjoint()))});
            model.hamiltonian.terms.push_back(std::move(term));
        }
        model.dissipators.push_back({mode.axis, a, 2.0 * mode.spec->memory_rate});
    }
    validate_structured(model.hamiltonian);
    return model;
}

std::vector<CorrelationSample> bath_correlation_oracle(double coupling,
                                                       double memory_rate,
                                                       const std::vector<double>& times) {
    if (memory_rate <= 0) throw ValidationError("bath memory rate must be > 0");
    BathSpec spec;
    spec.coupling = coupling;
    spec.memory_rate = memory_rate;
    const double g = spec.mode_coupling();
    std::vector<CorrelationSample> rows;
    rows.reserve(times.size());
    for (double t : times) {
        const double envelope = std::exp(-memory_rate * std::abs(t));
        rows.push_back({t, coupling * memory_rate / 2.0 * envelope, g * g * envelope});
    }
    return rows;
}

std::vector<double> dephasing_oracle(double coupling, double memory_rate,
                                     const std::vector<double>& times) {
    if (memory_rate <= 0) throw ValidationError("bath memory rate must be > 0");
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) {
        const double integral =
            coupling / 2.0 * (t - (1.0 - std::exp(-memory_rate * t)) / memory_rate);
        values.push_back(std::exp(-4.0 * integral));
    }
    return values;
}

namespace {

// Integrator state: dense per-segment Hamiltonian (the commutator is the
// dominant cost and runs as one matrix product per stage), dissipators applied
// through the axis kernels, classical RK4 with re-Hermitization each step.
class Engine {
public:
    Engine(const Model& model, ExecutionPolicy policy, bool dense_rhs)
        : model_(model), policy_(policy), dense_rhs_(dense_rhs), side_(model.side()) {
        h_static_ = model.hamiltonian.dense();
        for (const Model::Dissipator& d : model.dissipators) {
            ModeDiss md;
            md.axis = d.axis;
            md.lower = d.lower;
            md.raise = d.lower.adjoint();
            md.number = md.raise * md.lower;
            md.rate = d.rate;
            mode_diss_.push_back(std::move(md));
            if (dense_rhs_) {
                StructuredOperator so{model.dims,
                                      {StructuredTerm{Complex(1, 0), {{d.axis, d.lower}}}}};
                DenseDiss dd;
                dd.lower = so.dense();
                dd.number = dd.lower.adjoint() * dd.lower;
                dd.rate = d.rate;
                dense_diss_.push_back(std::move(dd));
            }
        }
        rho = Matrix::Zero(side_, side_);
        for (Matrix* m : {&k1_, &k2_, &k3_, &k4_, &stage_, &prod_, &tmp_})
            *m = Matrix::Zero(side_, side_);
        h_segment_ = h_static_;
        cap_ = 1.0;
    }

    Matrix rho;

    void set_free_segment(double step_cap) {
        h_segment_ = h_static_;
        cap_ = step_cap;
    }

    void set_window_segment(const TimelineEvent& event, int n_qubits, double step_cap) {
        h_segment_ = h_static_;
        const Index rest = side_ / (Index(1) << n_qubits);
        for (const ExchangePair& pair : event.pairs) {
            const Matrix q = heisenberg_coupling(pair.a, pair.b, n_qubits).mat;
            h_segment_ += event.strength *
                          Eigen::kroneckerProduct(q, Matrix::Identity(rest, rest));
        }
        cap_ = std::min(step_cap, event.duration / 20.0);
    }

    void advance(double length) {
        if (length <= 0) return;
        const auto steps =
            std::max<long long>(1, static_cast<long long>(std::ceil(length / cap_ - 1e-12)));
        const double h = length / static_cast<double>(steps);
        for (long long s = 0; s < steps; ++s) step(h);
    }

    // rho -> U rho U' for a register permutation (modes untouched).
    void apply_permutation(const QubitPermutation& p) {
        const int n = p.n;
        const Index qubit_side = Index(1) << n;
        const Index rest = side_ / qubit_side;
        std::vector<Index> image(static_cast<size_t>(qubit_side));
        for (Index q = 0; q < qubit_side; ++q) {
            Index r = 0;
            for (int site = 1; site <= n; ++site) {
                const Index bit = (q >> (n - site)) & 1;
                r |= bit << (n - p.dest(site));
            }
            image[static_cast<size_t>(q)] = r;
        }
        for (Index qr = 0; qr < qubit_side; ++qr)
            for (Index mr = 0; mr < rest; ++mr)
                for (Index qc = 0; qc < qubit_side; ++qc)
                    tmp_.block(image[static_cast<size_t>(qr)] * rest + mr,
                               image[static_cast<size_t>(qc)] * rest, 1, rest) =
                        rho.block(qr * rest + mr, qc * rest, 1, rest);
        rho.swap(tmp_);
    }

    double trace_drift() const { return std::abs(rho.trace().real() - 1.0) +
                                        std::abs(rho.trace().imag()); }

private:
    struct ModeDiss {
        int axis;
        Matrix lower, raise, number;
        double rate;
    };
    struct DenseDiss {
        Matrix lower, number;
        double rate;
    };

    void rhs(const Matrix& r, Matrix& out) {
        prod_.noalias() = h_segment_ * r;
        out = Complex(0, -1) * prod_;
        out += (Complex(0, -1) * prod_).adjoint();  // +i r H for Hermitian r, H
        if (dense_rhs_) {
            for (const DenseDiss& d : dense_diss_) {
                prod_.noalias() = d.lower * r;
                tmp_.noalias() = prod_ * d.lower.adjoint();
                out += d.rate * tmp_;
                prod_.noalias() = d.number * r;
                out += (-0.5 * d.rate) * prod_;
                prod_.noalias() = r * d.number;
                out += (-0.5 * d.rate) * prod_;
            }
            return;
        }
        for (const ModeDiss& d : mode_diss_) {
            prod_.setZero();
            axis_accumulate_left(d.lower, d.axis, model_.dims, r, prod_, Complex(1, 0),
                                 policy_);
            tmp_.setZero();
            axis_accumulate_right(d.raise, d.axis, model_.dims, prod_, tmp_,
                                  Complex(d.rate, 0), policy_);
            out += tmp_;
            axis_accumulate_left(d.number, d.axis, model_.dims, r, out,
                                 Complex(-0.5 * d.rate, 0), policy_);
            axis_accumulate_right(d.number, d.axis, model_.dims, r, out,
                                  Complex(-0.5 * d.rate, 0), policy_);
        }
    }

    void step(double h) {
        rhs(rho, k1_);
        stage_ = rho + (h / 2.0) * k1_;
        rhs(stage_, k2_);
        stage_ = rho + (h / 2.0) * k2_;
        rhs(stage_, k3_);
        stage_ = rho + h * k3_;
        rhs(stage_, k4_);
        rho += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
        stage_ = rho.adjoint();
        rho = 0.5 * (rho + stage_);
    }

    const Model& model_;
    ExecutionPolicy policy_;
    bool dense_rhs_;
    Index side_;
    Matrix h_static_, h_segment_;
    double cap_;
    std::vector<ModeDiss> mode_diss_;
    std::vector<DenseDiss> dense_diss_;
    Matrix k1_, k2_, k3_, k4_, stage_, prod_, tmp_;
};

Vector initial_full_state(const Model& model, const StateVector& psi) {
    const Index rest = model.side() / model.dims.front();
    Vector full = Vector::Zero(model.side());
    for (Index q = 0; q < psi.size(); ++q) full(q * rest) = psi.amps(q);
    return full;
}

} // namespace

double FidelityTrace::final_fidelity() const {
    if (samples.empty()) throw ValidationError("trace has no samples");
    return samples.back().fidelity;
}

std::string FidelityTrace::to_csv() const {
    std::string out = "t,fidelity\n";
    char line[80];
    for (const FidelitySample& s : samples) {
        std::snprintf(line, sizeof(line), "%.12g,%.12g\n", s.t, s.fidelity);
        out += line;
    }
    return out;
}

FidelityTrace evolve(const SimulationConfig& config) {
    const Model model = build_model(config);

    PulseTimeline timeline;
    if (config.cycle == CycleKind::none) {
        timeline.n_qubits = config.n_qubits;
        timeline.total_duration = config.t_final;
        TimelineEvent free;
        free.start = 0.0;
        free.kind = EventKind::free_evolution;
        free.duration = config.t_final;
        timeline.events.push_back(free);
    } else {
        const DecouplingCycle cycle = make_cycle(config);
        timeline = config.schedule == ScheduleKind::periodic
                       ? schedule_periodic(cycle, config.repeats, config.tau, config.pulse)
                       : schedule_concatenated(cycle, config.tau, config.pulse);
    }

    const double horizon = timeline.total_duration;
    const double tol = 1e-9 * std::max(1.0, horizon);
    const int points = std::max(config.sample_points, 200);
    std::vector<double> uniform;
    uniform.reserve(static_cast<size_t>(points) + 1);
    for (int k = 0; k <= points; ++k) {
        const double t = k == points ? horizon : horizon * k / points;
        bool collides = false;
        for (const CycleMark& mark : timeline.cycle_marks)
            if (std::abs(mark.time - t) <= tol) { collides = true; break; }
        if (!collides) uniform.push_back(t);
    }

    Engine engine(model, config.exec, config.dense_rhs);
    const Vector full = initial_full_state(model, config.initial);
    engine.rho = full * full.adjoint();

    FidelityTrace trace;
    trace.fingerprint = config.fingerprint();
    trace.min_eigenvalue = 1.0;
    auto record = [&](double t) {
        if (!trace.samples.empty() && t <= trace.samples.back().t + tol) return;
        const double drift = engine.trace_drift();
        trace.max_trace_drift = std::max(trace.max_trace_drift, drift);
        if (drift > kTraceDriftLimit)
            throw NumericsError("integrator trace drift " + std::to_string(drift) +
                                " at t=" + std::to_string(t));
        const OperatorMatrix rho_full{model.dims, engine.rho};
        const OperatorMatrix rho_s = partial_trace(rho_full, {1});
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_s.mat);
        const double min_eig = es.eigenvalues().minCoeff();
        trace.min_eigenvalue = std::min(trace.min_eigenvalue, min_eig);
        if (min_eig < kNegativityLimit)
            throw NumericsError("reduced state eigenvalue " + std::to_string(min_eig) +
                                " at t=" + std::to_string(t));
        trace.samples.push_back({t, state_fidelity(config.initial, rho_s)});
    };

    size_t next_uniform = 0;
    size_t next_mark = 0;
    size_t processed = 0;
    double cursor = 0.0;
    auto record_due_uniform = [&]() {
        while (next_uniform < uniform.size() && uniform[next_uniform] <= cursor + tol) {
            record(uniform[next_uniform]);
            ++next_uniform;
        }
    };
    auto fire_marks = [&]() {
        while (next_mark < timeline.cycle_marks.size() &&
               timeline.cycle_marks[next_mark].next_event <= processed) {
            record(timeline.cycle_marks[next_mark].time);
            ++next_mark;
        }
    };

    record_due_uniform();  // t = 0
    const double step = config.step_size();
    for (const TimelineEvent& event : timeline.events) {
        if (event.kind == EventKind::pulse) {
            engine.apply_permutation(event.permutation);
            ++processed;
            fire_marks();
            continue;
        }
        if (event.kind == EventKind::window)
            engine.set_window_segment(event, config.n_qubits, step);
        else
            engine.set_free_segment(step);
        const double seg_end = event.start + event.duration;
        while (cursor < seg_end - tol) {
            double target = seg_end;
            bool at_sample = false;
            if (next_uniform < uniform.size() &&
                uniform[next_uniform] < seg_end - tol &&
                uniform[next_uniform] > cursor + tol) {
                target = uniform[next_uniform];
                at_sample = true;
            }
            engine.advance(target - cursor);
            cursor = target;
            if (at_sample) {
                record(cursor);
                ++next_uniform;
            }
        }
        cursor = seg_end;
        record_due_uniform();
        ++processed;
        fire_marks();
    }
    record_due_uniform();
    return trace;
}

std::vector<double> dephasing_simulation(double coupling, double memory_rate,
                                         int n_max, const std::vector<double>& times) {
    if (times.empty()) return {};
    SimulationConfig config;
    config.n_qubits = 1;
    config.baths = {BathSpec{PauliAxis::z, coupling, memory_rate, n_max, true}};
    config.cycle = CycleKind::none;
    config.t_final = std::max(times.back(), 1e-9);
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    config.initial = StateVector({2}, plus);
    const Model model = build_model(config);

    Engine engine(model, config.exec, false);
    const Vector full = initial_full_state(model, config.initial);
    engine.rho = full * full.adjoint();
    engine.set_free_segment(config.step_size());

    std::vector<double> values;
    values.reserve(times.size());
    double cursor = 0.0;
    for (double t : times) {
        if (t < cursor - 1e-12)
            throw ValidationError("dephasing grid must be nondecreasing");
        engine.advance(t - cursor);
        cursor = std::max(cursor, t);
        const OperatorMatrix rho_full{model.dims, engine.rho};
        const OperatorMatrix rho_s = partial_trace(rho_full, {1});
        values.push_back(2.0 * std::abs(rho_s.mat(0, 1)));
    }
    return values;
}

std::vector<SchedulePoint> compare_schedules(const SimulationConfig& base,
                                             const std::vector<double>& taus) {
    if (base.pulse.kind != PulseMode::ideal)
        throw ValidationError("schedule comparison runs with ideal pulses");
    SimulationConfig probe = base;
    probe.schedule = ScheduleKind::periodic;
    probe.repeats = 1;
    probe.t_final = 0;  // filled per tau below
    const int m = make_cycle(probe).intervals;

    std::vector<std::future<double>> jobs;
    for (double tau : taus) {
        for (ScheduleKind kind : {ScheduleKind::periodic, ScheduleKind::concatenated}) {
            SimulationConfig run = base;
            run.exec = ExecutionPolicy::serial;  // jobs fan out instead
            run.schedule = kind;
            run.tau = tau;
            run.repeats = kind == ScheduleKind::periodic ? m : 1;
            run.t_final = static_cast<double>(m) * m * tau;
            run.dt = 0;
            jobs.push_back(std::async(std::launch::async, [run]() {
                return evolve(run).final_fidelity();
            }));
        }
    }
    std::vector<SchedulePoint> rows;
    for (size_t i = 0; i < taus.size(); ++i)
        rows.push_back({taus[i], jobs[2 * i].get(), jobs[2 * i + 1].get()});
    return rows;
}

std::vector<CycleComparison> compare_cycles(const SimulationConfig& base) {
    if (base.n_qubits != 4)
        throw ValidationError("cycle comparison runs on the four-qubit register");
    const double strength =
        base.pulse.kind == PulseMode::finite ? base.pulse.strength : M_PI * base.omega;

    std::vector<std::future<double>> jobs;
    for (PulseMode mode : {PulseMode::Finite(strength), PulseMode::Ideal()}) {
        for (CycleKind kind : {CycleKind::optimal, CycleKind::original4}) {
            SimulationConfig run = base;
            run.exec = ExecutionPolicy::serial;
            run.cycle = kind;
            run.cycle_sites = 4;
            run.schedule = ScheduleKind::periodic;
            run.pulse = mode;
            run.t_final = base.repeats * 4.0 * base.tau;
            run.dt = 0;
            jobs.push_back(std::async(std::launch::async, [run]() {
                return evolve(run).final_fidelity();
            }));
        }
    }
    return {{"finite", jobs[0].get(), jobs[1].get()},
            {"ideal", jobs[2].get(), jobs[3].get()}};
}

} // namespace qdd
