#include "qdd/avg_ham.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdd {

namespace {

const Complex kI(0.0, 1.0);

Matrix comm(const Matrix& a, const Matrix& b) { return a * b - b * a; }

void check_hermitian(const Matrix& m, const char* what) {
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > kHermitianRelTol * scale)
        throw ValidationError(std::string(what) + ": operator must be Hermitian");
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

std::vector<Index> SystemBathHamiltonian::full_dims() const {
    std::vector<Index> dims(static_cast<size_t>(n_qubits), 2);
    dims.insert(dims.end(), bath_dims.begin(), bath_dims.end());
    return dims;
}

Matrix embed_bath(const std::vector<Index>& bath_dims, int bath_index, const Matrix& b) {
    if (bath_index < 1 || bath_index > static_cast<int>(bath_dims.size()))
        throw ValidationError("embed_bath: bath index out of range");
    if (b.rows() != b.cols() || b.rows() != bath_dims[static_cast<size_t>(bath_index) - 1])
        throw ValidationError("embed_bath: operator does not match the bath dimension");
    Index pre = 1, post = 1;
    for (int k = 0; k < static_cast<int>(bath_dims.size()); ++k) {
        if (k < bath_index - 1) pre *= bath_dims[static_cast<size_t>(k)];
        if (k > bath_index - 1) post *= bath_dims[static_cast<size_t>(k)];
    }
    const Matrix left = Eigen::kroneckerProduct(Matrix::Identity(pre, pre), b);
    return Eigen::kroneckerProduct(left, Matrix::Identity(post, post));
}

OperatorMatrix lift_qubit_operator(const Matrix& q, int n_qubits,
                                   const std::vector<Index>& bath_dims) {
    if (q.rows() != (Index(1) << n_qubits))
        throw ValidationError("lift_qubit_operator: operator does not match the register");
    std::vector<Index> dims(static_cast<size_t>(n_qubits), 2);
    dims.insert(dims.end(), bath_dims.begin(), bath_dims.end());
    const Index bath = dims_product(bath_dims);
    if (bath == 1) return OperatorMatrix(dims, q);
    Matrix full = Eigen::kroneckerProduct(q, Matrix::Identity(bath, bath));
    if (full.rows() > kDefaultMaxSide)
        throw CapacityError("lift_qubit_operator: assembled operator exceeds capacity");
    return OperatorMatrix(dims, std::move(full));
}

OperatorMatrix lift_controller(const QubitPermutation& g, const std::vector<Index>& bath_dims) {
    return lift_qubit_operator(permutation_unitary(g).mat, g.n, bath_dims);
}

OperatorMatrix SystemBathHamiltonian::coupling() const {
    if (n_qubits < 1) throw ValidationError("SystemBathHamiltonian: need at least one qubit");
    OperatorMatrix h = OperatorMatrix::zero(full_dims());
    const Index bside = bath_side();
    const Index side = qubit_side() * bside;
    for (const BathCoupling& term : terms) {
        if (term.site < 1 || term.site > n_qubits)
            throw ValidationError("SystemBathHamiltonian: coupling site out of range");
        if (term.bath_index < 1 || term.bath_index > static_cast<int>(bath_dims.size()))
            throw ValidationError("SystemBathHamiltonian: bath index out of range");
        const Index d = bath_dims[static_cast<size_t>(term.bath_index - 1)];
        if (term.bath_op.rows() != d || term.bath_op.cols() != d)
            throw ValidationError("SystemBathHamiltonian: bath operator dimension mismatch");
        check_hermitian(term.bath_op, "SystemBathHamiltonian bath operator");

        // sigma^(site) (x) B^(bath_index) has at most four nonzeros per row;
        // accumulate them directly instead of materializing the Kronecker
        // product (adds the same products, so results are entrywise identical).
        Index inner = 1;
        for (size_t f = static_cast<size_t>(term.bath_index); f < bath_dims.size(); ++f)
            inner *= bath_dims[f];
        const Matrix sig = pauli(term.axis);
        const Index site_shift = Index(1) << (n_qubits - term.site);
        for (Index r = 0; r < side; ++r) {
            const Index q = r / bside, w = r % bside;
            const Index s = (q / site_shift) & Index(1);
            const Index o = w / (d * inner), rem = w % (d * inner);
            const Index i = rem / inner, t = rem % inner;
            for (Index sp = 0; sp < 2; ++sp) {
                const Complex sv = sig(s, sp);
                if (sv == Complex(0.0, 0.0)) continue;
                const Index qp = (q & ~site_shift) | (sp * site_shift);
                for (Index j = 0; j < d; ++j) {
                    const Complex bv = term.bath_op(i, j);
                    if (bv == Complex(0.0, 0.0)) continue;
                    h.mat(r, qp * bside + (o * d + j) * inner + t) += sv * bv;
                }
            }
        }
    }
    return h;
}

OperatorMatrix SystemBathHamiltonian::assemble() const {
    OperatorMatrix h = coupling();
    if (system_term.size() > 0) {
        check_hermitian(system_term, "SystemBathHamiltonian system term");
        h.mat += lift_qubit_operator(system_term, n_qubits, bath_dims).mat;
    }
    if (bath_term.size() > 0) {
        check_hermitian(bath_term, "SystemBathHamiltonian bath term");
        if (bath_term.rows() != bath_side())
            throw ValidationError("SystemBathHamiltonian: bath term has the wrong dimension");
        h.mat += Eigen::kroneckerProduct(Matrix::Identity(qubit_side(), qubit_side()),
                                         bath_term);
    }
    return h;
}

namespace {

// Basis image of the controller extended by identity on the baths:
// lift_controller(g).mat * e_c = e_image[c].  Conjugating by a permutation is
// then the O(side^2) relabeling (U^dag H U)(i, j) = H(image[i], image[j]),
// entrywise identical to the dense product.
std::vector<Index> lifted_basis_image(const QubitPermutation& g, Index bath_side) {
    const int n = g.n;
    const Index qubit_side = Index(1) << n;
    std::vector<Index> image(static_cast<size_t>(qubit_side * bath_side));
    for (Index q = 0; q < qubit_side; ++q) {
        Index r = 0;
        for (int i = 1; i <= n; ++i)
            r |= ((q >> (n - i)) & Index(1)) << (n - g.dest(i));
        for (Index b = 0; b < bath_side; ++b)
            image[static_cast<size_t>(q * bath_side + b)] = r * bath_side + b;
    }
    return image;
}

} // namespace

OperatorMatrix average_hamiltonian(const SystemBathHamiltonian& h, const DecouplingCycle& cycle) {
    validate_cycle(cycle);
    if (cycle.n_qubits != h.n_qubits)
        throw ValidationError("average_hamiltonian: cycle and Hamiltonian disagree on qubits");
    const Matrix h0 = h.assemble().mat;
    const Index side = h0.rows();
    Matrix sum = Matrix::Zero(side, side);
    for (const QubitPermutation& g : cycle.controllers) {
        const auto image = lifted_basis_image(g, h.bath_side());
        // Each output entry is touched exactly once per controller, so the
        // row partition is bitwise independent of the thread count.
#pragma omp parallel for schedule(static)
        for (Index i = 0; i < side; ++i)
            for (Index j = 0; j < side; ++j)
                sum(i, j) += h0(image[static_cast<size_t>(i)], image[static_cast<size_t>(j)]);
    }
    sum /= static_cast<double>(cycle.intervals);
    return OperatorMatrix(h.full_dims(), std::move(sum));
}

CollectivityReport verify_collectivity(const OperatorMatrix& h_eff, int n_qubits,
                                       const std::vector<Index>& bath_dims) {
    const Index expected = (Index(1) << n_qubits) * dims_product(bath_dims);
    if (h_eff.side() != expected)
        throw ValidationError("verify_collectivity: operator does not match the layout");
    CollectivityReport report;
    const Index side = h_eff.side();
    const Index bath_side = dims_product(bath_dims);
    for (int i = 1; i <= n_qubits; ++i) {
        for (int j = i + 1; j <= n_qubits; ++j) {
            const auto image = lifted_basis_image(
                QubitPermutation::transposition(n_qubits, i, j), bath_side);
            // Per-row partial sums keep the final reduction order fixed
            // regardless of the thread count.
            std::vector<double> row_sumsq(static_cast<size_t>(side), 0.0);
#pragma omp parallel for schedule(static)
            for (Index r = 0; r < side; ++r) {
                double acc = 0.0;
                for (Index c = 0; c < side; ++c)
                    acc += std::norm(h_eff.mat(image[static_cast<size_t>(r)],
                                               image[static_cast<size_t>(c)]) -
                                     h_eff.mat(r, c));
                row_sumsq[static_cast<size_t>(r)] = acc;
            }
            double sumsq = 0.0;
            for (double v : row_sumsq) sumsq += v;
            const double violation = std::sqrt(sumsq);
            if (violation > report.max_violation) {
                report.max_violation = violation;
                report.worst_i = i;
                report.worst_j = j;
            }
        }
    }
    report.passed = report.max_violation < kCollectivityTol;
    return report;
}

GradedLog graded_log_product(const std::vector<Matrix>& generators) {
    if (generators.empty()) throw ValidationError("graded_log_product: no factors");
    const Index dim = generators.front().rows();
    GradedLog acc;
    acc.z1 = Matrix::Zero(dim, dim);
    acc.z2 = Matrix::Zero(dim, dim);
    acc.z3 = Matrix::Zero(dim, dim);
    for (const Matrix& x : generators) {
        if (x.rows() != dim || x.cols() != dim)
            throw ValidationError("graded_log_product: factor dimensions disagree");
        // log(e^x e^z), graded by powers of the step length; z updated in
        // place using the pre-fold components.
        acc.z3 += 0.5 * comm(x, acc.z2) +
                  (1.0 / 12.0) * (comm(x, comm(x, acc.z1)) + comm(acc.z1, comm(acc.z1, x)));
        acc.z2 += 0.5 * comm(x, acc.z1);
        acc.z1 += x;
    }
    return acc;
}

std::string ErrorReport::to_text() const {
    std::ostringstream out;
    out << "h_eff_norm: " << format_value(frobenius(h_eff.mat)) << '\n'
        << "h_p_norm: " << format_value(frobenius(h_p.mat)) << '\n'
        << "h_3_norm: " << format_value(frobenius(h_3.mat)) << '\n'
        << "h_c_norm: " << format_value(frobenius(h_c.mat)) << '\n';
    for (const ResidualRow& row : residuals) {
        out << "residual_tau: " << format_value(row.tau) << '\n'
            << "residual_r1: " << format_value(row.r1) << '\n'
            << "residual_r2: " << format_value(row.r2) << '\n'
            << "residual_r3: " << format_value(row.r3) << '\n';
    }
    return out.str();
}

namespace {

std::vector<Matrix> conjugated_terms(const SystemBathHamiltonian& h,
                                     const DecouplingCycle& cycle) {
    const Matrix h0 = h.assemble().mat;
    std::vector<Matrix> a;
    a.reserve(cycle.controllers.size());
    for (const QubitPermutation& g : cycle.controllers) {
        const Matrix u = lift_controller(g, h.bath_dims).mat;
        a.push_back(u.adjoint() * h0 * u);
    }
    return a;
}

} // namespace

ErrorReport error_hamiltonians(const SystemBathHamiltonian& h, const DecouplingCycle& cycle) {
    validate_cycle(cycle);
    if (cycle.n_qubits != h.n_qubits)
        throw ValidationError("error_hamiltonians: cycle and Hamiltonian disagree on qubits");
    const std::vector<Matrix> a = conjugated_terms(h, cycle);
    const int m = cycle.intervals;
    const Index dim = a.front().rows();

    Matrix hbar = Matrix::Zero(dim, dim);
    for (const Matrix& ak : a) hbar += ak;

    Matrix acc = Matrix::Zero(dim, dim);
    for (int j = 1; j < m; ++j)
        for (int k = 0; k < j; ++k) acc += comm(a[static_cast<size_t>(j)],
                                                a[static_cast<size_t>(k)]);
    const Matrix h_p = -0.5 * kI * acc;

    std::vector<Matrix> gens;
    gens.reserve(a.size());
    for (const Matrix& ak : a) gens.push_back(-kI * ak);
    const GradedLog folded = graded_log_product(gens);
    const Matrix h_3 = kI * folded.z3;

    Matrix boundary = Matrix::Zero(dim, dim);
    for (int k = 0; k < m; ++k) {
        const Matrix u = lift_controller(cycle.controllers[static_cast<size_t>(k)],
                                         h.bath_dims).mat;
        boundary += static_cast<double>(m - 2 * k - 1) *
                    comm(hbar, (u.adjoint() * h_p * u).eval());
    }
    const Matrix h_c = -0.5 * kI * boundary;

    ErrorReport report;
    const auto dims = h.full_dims();
    report.h_eff = OperatorMatrix(dims, hbar / static_cast<double>(m));
    report.h_p = OperatorMatrix(dims, h_p);
    report.h_3 = OperatorMatrix(dims, h_3);
    report.h_c = OperatorMatrix(dims, h_c);
    return report;
}

std::vector<ResidualRow> bch_residual(const SystemBathHamiltonian& h,
                                      const DecouplingCycle& cycle,
                                      const std::vector<double>& taus, ScheduleKind kind) {
    const ErrorReport report = error_hamiltonians(h, cycle);
    const std::vector<Matrix> a = conjugated_terms(h, cycle);
    const int m = cycle.intervals;
    const Index dim = a.front().rows();
    const Matrix hbar = report.h_eff.mat * static_cast<double>(m);

    std::vector<ResidualRow> rows;
    for (double tau : taus) {
        if (!(tau > 0.0)) throw ValidationError("bch_residual: intervals must be positive");
        Matrix u0 = Matrix::Identity(dim, dim);
        for (const Matrix& ak : a) u0 = (expm_hermitian(ak, tau) * u0).eval();
        const Matrix log0 = unitary_log(u0);

        ResidualRow row;
        row.tau = tau;
        row.r1 = (log0 + kI * tau * hbar).norm();
        row.r2 = (log0 + kI * (tau * hbar + tau * tau * report.h_p.mat)).norm();

        if (kind == ScheduleKind::concatenated) {
            Matrix uc = Matrix::Identity(dim, dim);
            Matrix sym_p = Matrix::Zero(dim, dim);
            Matrix sym_3 = Matrix::Zero(dim, dim);
            for (int k = 0; k < m; ++k) {
                const Matrix u = lift_controller(cycle.controllers[static_cast<size_t>(k)],
                                                 h.bath_dims).mat;
                uc = (u.adjoint() * u0 * u * uc).eval();
                sym_p += u.adjoint() * report.h_p.mat * u;
                sym_3 += u.adjoint() * report.h_3.mat * u;
            }
            const Matrix target = tau * static_cast<double>(m) * hbar +
                                  tau * tau * sym_p +
                                  tau * tau * tau * (report.h_c.mat + sym_3);
            row.r3 = (unitary_log(uc) + kI * target).norm();
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

// Per-axis, per-site bath operators embedded on the bath tensor product.
std::map<PauliAxis, std::vector<Matrix>> per_site_bath(const SystemBathHamiltonian& h) {
    const Index bath = h.bath_side();
    std::map<PauliAxis, std::vector<Matrix>> table;
    for (const BathCoupling& term : h.terms) {
        auto [it, inserted] = table.try_emplace(
            term.axis,
            std::vector<Matrix>(static_cast<size_t>(h.n_qubits), Matrix::Zero(bath, bath)));
        check_hermitian(term.bath_op, "collective_decompose bath operator");
        it->second[static_cast<size_t>(term.site) - 1] +=
            embed_bath(h.bath_dims, term.bath_index, term.bath_op);
    }
    return table;
}

} // namespace

DecomposedCoupling collective_decompose(const SystemBathHamiltonian& h) {
    const int n = h.n_qubits;
    const auto dims = h.full_dims();
    DecomposedCoupling out;
    out.collective = OperatorMatrix::zero(dims);
    out.noncollective.assign(static_cast<size_t>(std::max(0, n - 1)),
                             OperatorMatrix::zero(dims));

    for (const auto& [axis, site_ops] : per_site_bath(h)) {
        Matrix b_plus = -0.5 * static_cast<double>(n - 3) * site_ops[0];
        for (int i = 2; i <= n; ++i) b_plus += 0.5 * site_ops[static_cast<size_t>(i) - 1];
        const Matrix s_alpha = collective_spin(axis, n).mat;
        out.collective.mat += Eigen::kroneckerProduct(s_alpha, b_plus);
        for (int j = 2; j <= n; ++j) {
            const Matrix b_minus = 0.5 * (site_ops[0] - site_ops[static_cast<size_t>(j) - 1]);
            const Matrix q = s_alpha - 2.0 * pauli_on(axis, j, n).mat;
            out.noncollective[static_cast<size_t>(j) - 2].mat +=
                Eigen::kroneckerProduct(q, b_minus);
        }
    }

    Matrix resum = out.collective.mat;
    for (const OperatorMatrix& part : out.noncollective) resum += part.mat;
    if ((resum - h.coupling().mat).norm() > 1e-12 * std::max(1.0, resum.norm()))
        throw PropertyViolationError("collective_decompose: components do not re-sum");
    return out;
}

EliminationReport eliminate_noncollective(const SystemBathHamiltonian& h, int j,
                                          const DecouplingCycle& cycle) {
    validate_cycle(cycle);
    if (cycle.n_qubits != h.n_qubits)
        throw ValidationError("eliminate_noncollective: cycle and Hamiltonian disagree");
    if (j < 2 || j > h.n_qubits)
        throw ValidationError("eliminate_noncollective: component index out of range");

    const DecomposedCoupling parts = collective_decompose(h);
    const Matrix& component = parts.noncollective[static_cast<size_t>(j) - 2].mat;

    const Index dim = component.rows();
    Matrix summed = Matrix::Zero(dim, dim);
    for (const QubitPermutation& g : cycle.controllers) {
        const auto image = lifted_basis_image(g, h.bath_side());
#pragma omp parallel for schedule(static)
        for (Index r = 0; r < dim; ++r)
            for (Index c = 0; c < dim; ++c)
                summed(r, c) +=
                    component(image[static_cast<size_t>(r)], image[static_cast<size_t>(c)]);
    }

    // Reference direction S_alpha (x) B^{j-} summed over axes.
    Matrix reference = Matrix::Zero(dim, dim);
    for (const auto& [axis, site_ops] : per_site_bath(h)) {
        const Matrix b_minus = 0.5 * (site_ops[0] - site_ops[static_cast<size_t>(j) - 1]);
        reference += Eigen::kroneckerProduct(collective_spin(axis, h.n_qubits).mat, b_minus);
    }

    EliminationReport report;
    report.summed = OperatorMatrix(h.full_dims(), summed);
    const double ref_sq = reference.squaredNorm();
    if (ref_sq > 0.0)
        report.coefficient_fit = ((reference.adjoint() * summed).trace() / ref_sq).real();
    report.residual_fit = (summed - report.coefficient_fit * reference).norm();
    report.residual_minus2 = (summed - static_cast<double>(h.n_qubits - 2) * reference).norm();
    report.residual_minus1 = (summed - static_cast<double>(h.n_qubits - 1) * reference).norm();
    if (report.residual_minus2 > kEliminationTol * std::max(1.0, reference.norm()))
        throw PropertyViolationError(
            "eliminate_noncollective: conjugate sum deviates from (n-2) S (x) B");
    return report;
}

} // namespace qdd
