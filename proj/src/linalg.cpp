#include "qdd/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qdd {

namespace {

void check_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw ValidationError(std::string(who) + ": matrix is not square");
}

void check_dims_match(const std::vector<Index>& dims, Index side, const char* who) {
    if (dims.empty() || dims_product(dims) != side)
        throw ValidationError(std::string(who) + ": factor dimensions do not multiply to the side length");
    for (Index d : dims)
        if (d < 1) throw ValidationError(std::string(who) + ": factor dimension < 1");
}

} // namespace

OperatorMatrix::OperatorMatrix(std::vector<Index> dims_, Matrix mat_)
    : dims(std::move(dims_)), mat(std::move(mat_)) {
    check_square(mat, "OperatorMatrix");
    check_dims_match(dims, mat.rows(), "OperatorMatrix");
}

OperatorMatrix OperatorMatrix::identity(std::vector<Index> dims_) {
    Index n = dims_product(dims_);
    return OperatorMatrix(std::move(dims_), Matrix::Identity(n, n));
}

OperatorMatrix OperatorMatrix::zero(std::vector<Index> dims_) {
    Index n = dims_product(dims_);
    return OperatorMatrix(std::move(dims_), Matrix::Zero(n, n));
}

bool OperatorMatrix::is_hermitian(double rel_tol) const {
    double scale = std::max(1.0, mat.norm());
    return (mat - mat.adjoint()).norm() < rel_tol * scale;
}

StateVector::StateVector(std::vector<Index> dims_, Vector amps_)
    : dims(std::move(dims_)), amps(std::move(amps_)) {
    check_dims_match(dims, amps.size(), "StateVector");
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(amps.norm() - 1.0) < tol;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b, Index max_side) {
    if (a.side() * b.side() > max_side)
        throw CapacityError("kron: side length " + std::to_string(a.side() * b.side()) +
                            " exceeds the configured maximum " + std::to_string(max_side));
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    Matrix m = Eigen::kroneckerProduct(a.mat, b.mat).eval();
    return OperatorMatrix(std::move(dims), std::move(m));
}

StateVector kron(const StateVector& a, const StateVector& b, Index max_side) {
    if (a.size() * b.size() > max_side)
        throw CapacityError("kron: state size exceeds the configured maximum");
    std::vector<Index> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    Vector v(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i)
        v.segment(i * b.size(), b.size()) = a.amps(i) * b.amps;
    return StateVector(std::move(dims), std::move(v));
}

Matrix expm_hermitian(const Matrix& h, double t) {
    check_square(h, "expm_hermitian");
    double scale = std::max(1.0, h.norm());
    if ((h - h.adjoint()).norm() >= kHermitianRelTol * scale * 10)
        throw ValidationError("expm_hermitian: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw NumericsError("expm_hermitian: eigendecomposition failed");
    Eigen::VectorXcd phases(h.rows());
    for (Index i = 0; i < h.rows(); ++i)
        phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
    Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return Matrix(u);
}

OperatorMatrix expm_hermitian(const OperatorMatrix& h, double t) {
    return OperatorMatrix(h.dims, expm_hermitian(h.mat, t));
}

Matrix unitary_log(const Matrix& u) {
    check_square(u, "unitary_log");
    Index n = u.rows();
    if ((u.adjoint() * u - Matrix::Identity(n, n)).norm() > 1e-8)
        throw ValidationError("unitary_log: input is not unitary");
    // U is normal, so its Schur form is diagonal; take principal-branch
    // phases of the diagonal.
    Eigen::MatrixXcd dense = u;
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(dense);
    if (schur.info() != Eigen::Success)
        throw NumericsError("unitary_log: Schur decomposition failed");
    Eigen::VectorXcd logdiag(n);
    for (Index i = 0; i < n; ++i) {
        Complex lambda = schur.matrixT()(i, i);
        double theta = std::arg(lambda);
        if (M_PI - std::abs(theta) < 1e-6)
            throw BranchAmbiguityError("unitary_log: eigenphase within 1e-6 of the branch cut; shorten the interval");
        logdiag(i) = Complex(0.0, theta);
    }
    Eigen::MatrixXcd l = schur.matrixU() * logdiag.asDiagonal() * schur.matrixU().adjoint();
    return Matrix(l);
}

OperatorMatrix unitary_log(const OperatorMatrix& u) {
    return OperatorMatrix(u.dims, unitary_log(u.mat));
}

OperatorMatrix partial_trace(const OperatorMatrix& m, const std::vector<int>& keep) {
    const auto nf = static_cast<int>(m.dims.size());
    if (keep.empty())
        throw ValidationError("partial_trace: keep set is empty");
    std::vector<int> k = keep;
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end())
        throw ValidationError("partial_trace: duplicate keep index");
    for (int f : k)
        if (f < 1 || f > nf)
            throw ValidationError("partial_trace: keep index out of range");

    std::vector<Index> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * m.dims[f + 1];

    std::vector<int> kept, traced;
    std::vector<bool> is_kept(nf, false);
    for (int f : k) is_kept[f - 1] = true;
    for (int f = 0; f < nf; ++f) (is_kept[f] ? kept : traced).push_back(f);

    // Enumerate offsets contributed by the kept and traced factor groups.
    auto offsets = [&](const std::vector<int>& factors) {
        std::vector<Index> off{0};
        for (int f : factors) {
            std::vector<Index> next;
            next.reserve(off.size() * m.dims[f]);
            for (Index base : off)
                for (Index i = 0; i < m.dims[f]; ++i)
                    next.push_back(base + i * stride[f]);
            off = std::move(next);
        }
        return off;
    };
    const std::vector<Index> keep_off = offsets(kept);
    const std::vector<Index> tr_off = offsets(traced);

    std::vector<Index> out_dims;
    for (int f : kept) out_dims.push_back(m.dims[f]);
    const Index kd = static_cast<Index>(keep_off.size());
    Matrix out = Matrix::Zero(kd, kd);
    for (Index r = 0; r < kd; ++r)
        for (Index c = 0; c < kd; ++c) {
            Complex s = 0.0;
            for (Index t : tr_off) s += m.mat(keep_off[r] + t, keep_off[c] + t);
            out(r, c) = s;
        }
    return OperatorMatrix(std::move(out_dims), std::move(out));
}

double state_fidelity(const StateVector& psi, const OperatorMatrix& rho) {
    if (psi.size() != rho.side())
        throw ValidationError("state_fidelity: state and operator sizes differ");
    const Complex v = psi.amps.adjoint() * rho.mat * psi.amps;
    double overlap = v.real();
    if (overlap < -1e-10)
        throw NumericsError("state_fidelity: overlap " + std::to_string(overlap) + " is negative beyond tolerance");
    overlap = std::clamp(overlap, 0.0, 1.0);
    return std::sqrt(overlap);
}

} // namespace qdd
