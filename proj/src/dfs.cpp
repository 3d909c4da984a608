#include "qdd/dfs.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/SVD>

#include "qdd/qubit_ops.hpp"

namespace qdd {

namespace {

constexpr double kPivotTol = 1e-10;

// Row-reduce in place over the complex field, pivoting on the first usable
// coordinate so the resulting span basis is unique.
void reduce_rows(Matrix& rows) {
    Index pivot_row = 0;
    for (Index col = 0; col < rows.cols() && pivot_row < rows.rows(); ++col) {
        Index best = pivot_row;
        for (Index r = pivot_row + 1; r < rows.rows(); ++r)
            if (std::abs(rows(r, col)) > std::abs(rows(best, col))) best = r;
        if (std::abs(rows(best, col)) < kPivotTol) continue;
        rows.row(pivot_row).swap(rows.row(best));
        rows.row(pivot_row) /= rows(pivot_row, col);
        for (Index r = 0; r < rows.rows(); ++r)
            if (r != pivot_row) rows.row(r) -= rows(r, col) * rows.row(pivot_row);
        ++pivot_row;
    }
}

// In-order Gram-Schmidt with the leading nonzero coordinate rotated to the
// positive real axis.
void orthonormalize_rows(Matrix& rows) {
    for (Index r = 0; r < rows.rows(); ++r) {
        for (Index p = 0; p < r; ++p)
            rows.row(r) -= rows.row(p).dot(rows.row(r)) * rows.row(p);
        rows.row(r) /= rows.row(r).norm();
        for (Index col = 0; col < rows.cols(); ++col) {
            const Complex lead = rows(r, col);
            if (std::abs(lead) > kPivotTol) {
                rows.row(r) *= std::conj(lead) / std::abs(lead);
                break;
            }
        }
    }
}

} // namespace

DarkBasis dark_subspace(int n) {
    if (n < 1) throw ValidationError("dark_subspace: need at least one qubit");
    const Index dim = Index(1) << n;
    Matrix stacked(3 * dim, dim);
    stacked.topRows(dim) = collective_spin(PauliAxis::x, n).mat;
    stacked.middleRows(dim, dim) = collective_spin(PauliAxis::y, n).mat;
    stacked.bottomRows(dim) = collective_spin(PauliAxis::z, n).mat;

    Eigen::BDCSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    Index null_count = 0;
    while (null_count < dim && sigma(dim - 1 - null_count) < kKernelTol) ++null_count;

    if (null_count > 0 && null_count < dim) {
        const double largest_null = sigma(dim - null_count);
        const double smallest_kept = sigma(dim - null_count - 1);
        if (largest_null > 0.0 && smallest_kept / largest_null < kKernelGapRatio)
            throw NumericsError("dark_subspace: kernel threshold sits inside a spectral cluster");
    }

    DarkBasis basis;
    basis.n_qubits = n;
    if (null_count == 0) return basis;

    Matrix rows = svd.matrixV().rightCols(null_count).transpose();
    reduce_rows(rows);
    orthonormalize_rows(rows);
    const std::vector<Index> dims(static_cast<size_t>(n), 2);
    for (Index r = 0; r < rows.rows(); ++r)
        basis.vectors.emplace_back(dims, rows.row(r).transpose());
    return basis;
}

double contains(const DarkBasis& basis, const StateVector& psi) {
    double sum = 0.0;
    for (const StateVector& v : basis.vectors) {
        if (v.size() != psi.size())
            throw ValidationError("contains: state dimension does not match the basis");
        sum += std::norm(v.amps.dot(psi.amps));
    }
    return std::sqrt(sum);
}

int dfs_dimension(int n) { return dark_subspace(n).dimension(); }

StateVector singlet_state() {
    Vector amps = Vector::Zero(4);
    amps(1) = 1.0 / std::sqrt(2.0);   // |01>
    amps(2) = -1.0 / std::sqrt(2.0);  // |10>
    return StateVector({2, 2}, amps);
}

StateVector singlet_pair_state() { return kron(singlet_state(), singlet_state()); }

StateVector balanced_dark_state() {
    Vector amps = Vector::Zero(16);
    const double c = 1.0 / (2.0 * std::sqrt(3.0));
    amps(0b0011) = 2.0 * c;
    amps(0b0101) = -c;
    amps(0b1001) = -c;
    amps(0b0110) = -c;
    amps(0b1010) = -c;
    amps(0b1100) = 2.0 * c;
    return StateVector({2, 2, 2, 2}, amps);
}

std::string format_ket(const StateVector& psi) {
    std::ostringstream out;
    const int n = static_cast<int>(psi.dims.size());
    bool first = true;
    for (Index idx = 0; idx < psi.size(); ++idx) {
        const Complex amp = psi.amps(idx);
        if (std::abs(amp) < 0.5e-6) continue;
        char buf[64];
        if (std::abs(amp.imag()) < 0.5e-6) {
            out << (first ? (amp.real() < 0 ? "-" : "") : (amp.real() < 0 ? " - " : " + "));
            std::snprintf(buf, sizeof(buf), "%.6f", std::abs(amp.real()));
            out << buf;
        } else {
            out << (first ? "" : " + ");
            std::snprintf(buf, sizeof(buf), "(%.6f%+.6fi)", amp.real(), amp.imag());
            out << buf;
        }
        out << '|';
        for (int b = n - 1; b >= 0; --b) out << ((idx >> b) & 1);
        out << '>';
        first = false;
    }
    if (first) out << "0";
    return out.str();
}

} // namespace qdd
