#pragma once

// Dense complex linear algebra on labeled tensor-factor spaces: Kronecker
// products, Hermitian/unitary spectral functions, partial trace, fidelity.
// Conventions: factor 0 is the most significant tensor factor; the
// computational basis is ordered |00...0>, |00...1>, ...; sigma_z|0> = +|0>.
// hbar = 1, frequencies in units of omega, times in units of 1/omega.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qdd/errors.hpp"

namespace qdd {

using Complex = std::complex<double>;
// Row-major storage over the tensor-product basis.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

constexpr Index kDefaultMaxSide = 4096;     // capacity limit for kron results
constexpr double kHermitianRelTol = 1e-12;  // relative Hermiticity invariant

inline Index dims_product(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

// Dense square operator on an ordered list of tensor factors.
struct OperatorMatrix {
    std::vector<Index> dims;  // factor dimensions, most significant first
    Matrix mat;               // side = product of dims, row-major

    OperatorMatrix() = default;
    OperatorMatrix(std::vector<Index> dims_, Matrix mat_);

    Index side() const { return mat.rows(); }

    static OperatorMatrix identity(std::vector<Index> dims_);
    static OperatorMatrix zero(std::vector<Index> dims_);

    bool is_hermitian(double rel_tol = kHermitianRelTol) const;
};

// State vector on the same factor layout.
struct StateVector {
    std::vector<Index> dims;
    Vector amps;

    StateVector() = default;
    StateVector(std::vector<Index> dims_, Vector amps_);

    Index size() const { return amps.size(); }
    bool is_normalized(double tol = 1e-12) const;
};

// Tensor product; dims are concatenated.  Throws CapacityError when the
// resulting side length exceeds max_side.
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b,
                    Index max_side = kDefaultMaxSide);
StateVector kron(const StateVector& a, const StateVector& b,
                 Index max_side = kDefaultMaxSide);

// exp(-i H t) for Hermitian H, via spectral decomposition.
OperatorMatrix expm_hermitian(const OperatorMatrix& h, double t);
Matrix expm_hermitian(const Matrix& h, double t);

// Principal-branch logarithm of a unitary: skew-Hermitian L with e^L = U and
// eigenphases in (-pi, pi].  Throws BranchAmbiguityError when an eigenphase
// lies within 1e-6 of +-pi.
OperatorMatrix unitary_log(const OperatorMatrix& u);
Matrix unitary_log(const Matrix& u);

// Trace out all factors not listed in `keep` (1-based factor indices, kept in
// their original order).  Throws ValidationError for an empty or invalid set.
OperatorMatrix partial_trace(const OperatorMatrix& m, const std::vector<int>& keep);

// sqrt(<psi|rho|psi>), clamped to [0,1].  Throws NumericsError when the
// overlap is below -1e-10.
double state_fidelity(const StateVector& psi, const OperatorMatrix& rho);

inline double frobenius(const Matrix& m) { return m.norm(); }

} // namespace qdd
