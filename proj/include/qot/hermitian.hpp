#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <concepts>
#include <sstream>
#include <utility>

#include "qot/errors.hpp"

namespace qot {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace detail

/// Dense complex self-adjoint matrix. Stored entries satisfy
/// a(i,j) == conj(a(j,i)) exactly and diagonal imaginary parts are exactly
/// zero; values are only created through hermitize() or through arithmetic
/// that preserves those equalities bit for bit.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    /// Returns (a + a^dagger)/2 with diagonal imaginary parts zeroed.
    /// Idempotent on Hermitian input.
    static HermitianMatrix hermitize(const Matrix& a);

    static HermitianMatrix zero(Eigen::Index dim) {
        return HermitianMatrix(Matrix::Zero(dim, dim));
    }
    static HermitianMatrix identity(Eigen::Index dim) {
        return HermitianMatrix(Matrix::Identity(dim, dim));
    }

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& mat() const { return mat_; }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

    double trace() const { return mat_.trace().real(); }

    friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
        require_same_dim(a, b, "operator+");
        return HermitianMatrix(a.mat_ + b.mat_);
    }
    friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
        require_same_dim(a, b, "operator-");
        return HermitianMatrix(a.mat_ - b.mat_);
    }
    friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
        if (!std::isfinite(s))
            throw Error("HermitianMatrix: non-finite scalar factor");
        return HermitianMatrix(s * a.mat_);
    }
    friend HermitianMatrix operator-(const HermitianMatrix& a) { return -1.0 * a; }

private:
    explicit HermitianMatrix(Matrix m) : mat_(std::move(m)) {}

    static void require_same_dim(const HermitianMatrix& a, const HermitianMatrix& b,
                                 const char* op) {
        if (a.dim() != b.dim())
            throw DimensionError(std::string(op) + ": dimensions " +
                                 std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }

    Matrix mat_;
};

inline HermitianMatrix HermitianMatrix::hermitize(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("hermitize: matrix is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ", expected square");
    if (!a.allFinite())
        throw Error("hermitize: non-finite entry");
    Matrix h = 0.5 * (a + a.adjoint());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        h(i, i) = Complex(h(i, i).real(), 0.0);
    return HermitianMatrix(std::move(h));
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are ascending and
/// each eigenvector's phase is fixed: its largest-magnitude component is real
/// and positive, so the decomposition is deterministic for a fixed input.
struct EigenDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors; // column j pairs with eigenvalues[j]
};

namespace detail {

inline Matrix rebuild(const EigenDecomposition& dec, const RealVector& values) {
    return dec.eigenvectors * values.cast<Complex>().asDiagonal() *
           dec.eigenvectors.adjoint();
}

} // namespace detail

inline EigenDecomposition eig_hermitian(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.mat());
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eig_hermitian: iteration failed to converge (dim " << a.dim()
            << ", frobenius norm " << a.mat().norm() << ", max |entry| "
            << a.mat().cwiseAbs().maxCoeff() << ")";
        throw EigensolverError(msg.str());
    }
    EigenDecomposition dec{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < dec.eigenvectors.cols(); ++j) {
        Eigen::Index imax = 0;
        dec.eigenvectors.col(j).cwiseAbs().maxCoeff(&imax);
        const Complex pivot = dec.eigenvectors(imax, j);
        const double mag = std::abs(pivot);
        if (mag > 0.0)
            dec.eigenvectors.col(j) *= std::conj(pivot) / mag;
    }
    const Eigen::Index d = a.dim();
    const double unitarity =
        (dec.eigenvectors.adjoint() * dec.eigenvectors - Matrix::Identity(d, d)).norm();
    const double reconstruction =
        (detail::rebuild(dec, dec.eigenvalues) - a.mat()).norm();
    if (unitarity > 1e-10 * double(d) ||
        reconstruction > 1e-10 * (1.0 + a.mat().norm())) {
        std::ostringstream msg;
        msg << "eig_hermitian: invalid decomposition (unitarity defect " << unitarity
            << ", reconstruction defect " << reconstruction << ", dim " << d << ")";
        throw EigensolverError(msg.str());
    }
    return dec;
}

enum class ScalarFn { Exp, Log, XLogX };

/// Spectral lifting: applies f to the eigenvalues, keeping the eigenvectors.
/// Log requires strictly positive eigenvalues; XLogX admits eigenvalues down
/// to -domain_tol, which are clamped to zero with 0 log 0 = 0.
inline HermitianMatrix lift(ScalarFn f, const HermitianMatrix& a,
                            double domain_tol = 1e-12) {
    const EigenDecomposition dec = eig_hermitian(a);
    RealVector values(dec.eigenvalues.size());
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        const double k = dec.eigenvalues[j];
        switch (f) {
        case ScalarFn::Exp:
            values[j] = std::exp(k);
            break;
        case ScalarFn::Log:
            if (k <= 0.0)
                throw DomainError("lift(log): eigenvalue " + detail::fmt(k) +
                                  " outside (0, inf)");
            values[j] = std::log(k);
            break;
        case ScalarFn::XLogX:
            if (k < -domain_tol)
                throw DomainError("lift(x log x): eigenvalue " + detail::fmt(k) +
                                  " below 0 beyond tolerance " + detail::fmt(domain_tol));
            values[j] = k <= 0.0 ? 0.0 : k * std::log(k);
            break;
        }
    }
    return HermitianMatrix::hermitize(detail::rebuild(dec, values));
}

/// Lifting of an arbitrary real function; no domain checking.
template <class F>
    requires std::invocable<F&, double>
inline HermitianMatrix lift(F&& f, const HermitianMatrix& a) {
    const EigenDecomposition dec = eig_hermitian(a);
    RealVector values(dec.eigenvalues.size());
    for (Eigen::Index j = 0; j < values.size(); ++j)
        values[j] = f(dec.eigenvalues[j]);
    return HermitianMatrix::hermitize(detail::rebuild(dec, values));
}

/// Hilbert-Schmidt inner product tr(a^dagger b). Real for Hermitian inputs;
/// the rounding residue on the imaginary part is checked and discarded.
inline double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim())
        throw DimensionError("hs_inner: dimensions " + std::to_string(a.dim()) +
                             " and " + std::to_string(b.dim()));
    const Complex s = a.mat().conjugate().cwiseProduct(b.mat()).sum();
    const double scale = std::max(1.0, a.mat().norm() * b.mat().norm());
    if (std::abs(s.imag()) > 1e-12 * scale)
        throw Error("hs_inner: imaginary residue " + detail::fmt(s.imag()) +
                    " on Hermitian inputs");
    return s.real();
}

inline double frobenius_norm(const HermitianMatrix& a) {
    return std::sqrt(hs_inner(a, a));
}

/// Derivative of the matrix exponential at a, applied to b: in the eigenbasis
/// of a the (i,j) entry of the result is b_ij (e^{k_i} - e^{k_j})/(k_i - k_j),
/// with the limit e^{k_i} for nearly coincident eigenvalues.
inline HermitianMatrix frechet_exp(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim())
        throw DimensionError("frechet_exp: dimensions " + std::to_string(a.dim()) +
                             " and " + std::to_string(b.dim()));
    const EigenDecomposition dec = eig_hermitian(a);
    const Matrix btilde = dec.eigenvectors.adjoint() * b.mat() * dec.eigenvectors;
    Matrix out(a.dim(), a.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i) {
        for (Eigen::Index j = 0; j < a.dim(); ++j) {
            const double ki = dec.eigenvalues[i];
            const double kj = dec.eigenvalues[j];
            const double phi = std::abs(ki - kj) < 1e-8
                                   ? std::exp(ki)
                                   : (std::exp(ki) - std::exp(kj)) / (ki - kj);
            out(i, j) = btilde(i, j) * phi;
        }
    }
    return HermitianMatrix::hermitize(dec.eigenvectors * out * dec.eigenvectors.adjoint());
}

} // namespace qot
