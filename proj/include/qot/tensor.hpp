#pragma once

#include "qot/hermitian.hpp"

namespace qot {

/// Factor dimensions of a bipartite system. The composite index convention is
/// row-major with subsystem 1 major: (i1, i2) -> i1 * d2 + i2. Every operation
/// in the library and the file formats share it.
struct BipartiteShape {
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;

    Eigen::Index dim() const { return d1 * d2; }
};

namespace detail {

inline void require_shape(const HermitianMatrix& g, const BipartiteShape& shape,
                          const char* op) {
    if (shape.d1 < 1 || shape.d2 < 1)
        throw DimensionError(std::string(op) + ": invalid shape (" +
                             std::to_string(shape.d1) + ", " + std::to_string(shape.d2) + ")");
    if (g.dim() != shape.dim())
        throw DimensionError(std::string(op) + ": matrix dimension " +
                             std::to_string(g.dim()) + " does not match d1*d2 = " +
                             std::to_string(shape.dim()));
}

} // namespace detail

inline HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
    const Eigen::Index d1 = a.dim();
    const Eigen::Index d2 = b.dim();
    Matrix out(d1 * d2, d1 * d2);
    for (Eigen::Index i1 = 0; i1 < d1; ++i1)
        for (Eigen::Index j1 = 0; j1 < d1; ++j1)
            for (Eigen::Index i2 = 0; i2 < d2; ++i2)
                for (Eigen::Index j2 = 0; j2 < d2; ++j2)
                    out(i1 * d2 + i2, j1 * d2 + j2) = a(i1, j1) * b(i2, j2);
    return HermitianMatrix::hermitize(out);
}

/// U (x) id + id (x) V.
inline HermitianMatrix tensor_sum(const HermitianMatrix& u, const HermitianMatrix& v) {
    return kron(u, HermitianMatrix::identity(v.dim())) +
           kron(HermitianMatrix::identity(u.dim()), v);
}

/// Trace over the second factor: (tr_2 G)(i1, j1) = sum_k G(i1*d2+k, j1*d2+k).
inline HermitianMatrix partial_trace_2(const HermitianMatrix& g, const BipartiteShape& shape) {
    detail::require_shape(g, shape, "partial_trace_2");
    Matrix out = Matrix::Zero(shape.d1, shape.d1);
    for (Eigen::Index i1 = 0; i1 < shape.d1; ++i1)
        for (Eigen::Index j1 = 0; j1 < shape.d1; ++j1)
            for (Eigen::Index k = 0; k < shape.d2; ++k)
                out(i1, j1) += g(i1 * shape.d2 + k, j1 * shape.d2 + k);
    return HermitianMatrix::hermitize(out);
}

/// Trace over the first factor: (tr_1 G)(i2, j2) = sum_k G(k*d2+i2, k*d2+j2).
inline HermitianMatrix partial_trace_1(const HermitianMatrix& g, const BipartiteShape& shape) {
    detail::require_shape(g, shape, "partial_trace_1");
    Matrix out = Matrix::Zero(shape.d2, shape.d2);
    for (Eigen::Index i2 = 0; i2 < shape.d2; ++i2)
        for (Eigen::Index j2 = 0; j2 < shape.d2; ++j2)
            for (Eigen::Index k = 0; k < shape.d1; ++k)
                out(i2, j2) += g(k * shape.d2 + i2, k * shape.d2 + j2);
    return HermitianMatrix::hermitize(out);
}

} // namespace qot
