#include "qdd/kernels.hpp"

#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace qdd {

namespace {

struct AxisSplit {
    Index outer = 1;  // product of dims before the axis
    Index dim = 1;    // the axis itself
    Index inner = 1;  // product of dims after the axis
};

AxisSplit split_axis(const std::vector<Index>& dims, int axis) {
    if (axis < 0 || axis >= static_cast<int>(dims.size()))
        throw ValidationError("factor axis " + std::to_string(axis) +
                              " outside layout of rank " + std::to_string(dims.size()));
    AxisSplit s;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        if (k < axis) s.outer *= dims[static_cast<size_t>(k)];
        else if (k == axis) s.dim = dims[static_cast<size_t>(k)];
        else s.inner *= dims[static_cast<size_t>(k)];
    }
    return s;
}

void check_shapes(const Matrix& a, const AxisSplit& s, const Matrix& in, const Matrix& out) {
    if (a.rows() != a.cols() || a.rows() != s.dim)
        throw ValidationError("axis factor must be square with the axis dimension");
    const Index side = s.outer * s.dim * s.inner;
    if (in.rows() != side || in.cols() != side || out.rows() != side || out.cols() != side)
        throw ValidationError("operand side does not match the axis layout");
}

} // namespace

void validate_structured(const StructuredOperator& op) {
    if (op.dims.empty()) throw ValidationError("structured operator needs at least one axis");
    for (Index d : op.dims)
        if (d < 1) throw ValidationError("axis dimensions must be positive");
    for (const StructuredTerm& term : op.terms) {
        int prev = -1;
        for (const FactorOp& f : term.factors) {
            if (f.axis <= prev)
                throw ValidationError("term factors must use strictly increasing axes");
            if (f.axis >= static_cast<int>(op.dims.size()))
                throw ValidationError("term factor axis outside layout");
            if (f.op.rows() != f.op.cols() ||
                f.op.rows() != op.dims[static_cast<size_t>(f.axis)])
                throw ValidationError("term factor shape does not match its axis");
            prev = f.axis;
        }
    }
}

Matrix StructuredOperator::dense() const {
    validate_structured(*this);
    const Index n = side();
    Matrix sum = Matrix::Zero(n, n);
    for (const StructuredTerm& term : terms) {
        Matrix acc = Matrix::Ones(1, 1);
        size_t next = 0;
        for (int axis = 0; axis < static_cast<int>(dims.size()); ++axis) {
            const Index d = dims[static_cast<size_t>(axis)];
            if (next < term.factors.size() && term.factors[next].axis == axis) {
                acc = Eigen::kroneckerProduct(acc, term.factors[next].op).eval();
                ++next;
            } else {
                acc = Eigen::kroneckerProduct(acc, Matrix::Identity(d, d)).eval();
            }
        }
        sum += term.weight * acc;
    }
    return sum;
}

void axis_accumulate_left(const Matrix& a, int axis, const std::vector<Index>& dims,
                          const Matrix& in, Matrix& out, Complex scale,
                          ExecutionPolicy policy) {
    const AxisSplit s = split_axis(dims, axis);
    check_shapes(a, s, in, out);
    const long long outer = s.outer;
    const long long d = s.dim;
    const Index block = s.inner;

    if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel for collapse(2) schedule(static)
        for (long long o = 0; o < outer; ++o)
            for (long long jp = 0; jp < d; ++jp) {
                auto dst = out.middleRows((o * d + jp) * block, block);
                for (long long j = 0; j < d; ++j)
                    dst.noalias() +=
                        (scale * a(jp, j)) * in.middleRows((o * d + j) * block, block);
            }
        return;
    }
    for (long long o = 0; o < outer; ++o)
        for (long long jp = 0; jp < d; ++jp) {
            auto dst = out.middleRows((o * d + jp) * block, block);
            for (long long j = 0; j < d; ++j)
                dst.noalias() +=
                    (scale * a(jp, j)) * in.middleRows((o * d + j) * block, block);
        }
}

void axis_accumulate_right(const Matrix& a, int axis, const std::vector<Index>& dims,
                           const Matrix& in, Matrix& out, Complex scale,
                           ExecutionPolicy policy) {
    const AxisSplit s = split_axis(dims, axis);
    check_shapes(a, s, in, out);
    const long long rows = in.rows();
    const long long outer = s.outer;
    const long long d = s.dim;
    const Index block = s.inner;

    if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel for schedule(static)
        for (long long r = 0; r < rows; ++r)
            for (long long o = 0; o < outer; ++o)
                for (long long jp = 0; jp < d; ++jp) {
                    auto dst = out.row(r).segment((o * d + jp) * block, block);
                    for (long long j = 0; j < d; ++j)
                        dst += (scale * a(j, jp)) *
                               in.row(r).segment((o * d + j) * block, block);
                }
        return;
    }
    for (long long r = 0; r < rows; ++r)
        for (long long o = 0; o < outer; ++o)
            for (long long jp = 0; jp < d; ++jp) {
                auto dst = out.row(r).segment((o * d + jp) * block, block);
                for (long long j = 0; j < d; ++j)
                    dst += (scale * a(j, jp)) *
                           in.row(r).segment((o * d + j) * block, block);
            }
}

namespace {

Matrix apply_term(const StructuredTerm& term, const std::vector<Index>& dims,
                  const Matrix& in, Complex scale, ExecutionPolicy policy, bool left) {
    const Complex total = term.weight * scale;
    if (term.factors.empty()) return total * in;
    Matrix current = in;
    Matrix next(in.rows(), in.cols());
    for (size_t k = 0; k < term.factors.size(); ++k) {
        const FactorOp& f = term.factors[k];
        const Complex w = (k + 1 == term.factors.size()) ? total : Complex(1.0, 0.0);
        next.setZero();
        if (left)
            axis_accumulate_left(f.op, f.axis, dims, current, next, w, policy);
        else
            axis_accumulate_right(f.op, f.axis, dims, current, next, w, policy);
        std::swap(current, next);
    }
    return current;
}

} // namespace

Matrix apply_term_left(const StructuredTerm& term, const std::vector<Index>& dims,
                       const Matrix& in, Complex scale, ExecutionPolicy policy) {
    return apply_term(term, dims, in, scale, policy, true);
}

Matrix apply_term_right(const StructuredTerm& term, const std::vector<Index>& dims,
                        const Matrix& in, Complex scale, ExecutionPolicy policy) {
    return apply_term(term, dims, in, scale, policy, false);
}

void accumulate_left(const StructuredOperator& op, const Matrix& in, Matrix& out,
                     Complex scale, ExecutionPolicy policy) {
    for (const StructuredTerm& term : op.terms) {
        if (term.factors.size() == 1) {
            const FactorOp& f = term.factors.front();
            axis_accumulate_left(f.op, f.axis, op.dims, in, out, scale * term.weight,
                                 policy);
        } else {
            out.noalias() += apply_term_left(term, op.dims, in, scale, policy);
        }
    }
}

void accumulate_right(const StructuredOperator& op, const Matrix& in, Matrix& out,
                      Complex scale, ExecutionPolicy policy) {
    for (const StructuredTerm& term : op.terms) {
        if (term.factors.size() == 1) {
            const FactorOp& f = term.factors.front();
            axis_accumulate_right(f.op, f.axis, op.dims, in, out, scale * term.weight,
                                  policy);
        } else {
            out.noalias() += apply_term_right(term, op.dims, in, scale, policy);
        }
    }
}

} // namespace qdd
