#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "qot/hermitian.hpp"
#include "qot/tensor.hpp"

namespace qot {

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityFloor = 1e-10;
inline constexpr double kHermiticityTolerance = 1e-8;

/// Unit-trace, positive definite Hermitian matrix. Singular (or numerically
/// singular) states are rejected: the solver requires the smallest eigenvalue
/// of each marginal to stay above kPositivityFloor.
class DensityMatrix {
public:
    static DensityMatrix validated(const HermitianMatrix& m, const std::string& which) {
        const double tr = m.trace();
        if (std::abs(tr - 1.0) > kTraceTolerance)
            throw ValidationError(ValidationFailure::TraceNotOne, which, tr,
                                  which + ": trace is " + detail::fmt(tr));
        const EigenDecomposition dec = eig_hermitian(m);
        const double lmin = dec.eigenvalues[0];
        if (lmin < kPositivityFloor)
            throw ValidationError(ValidationFailure::NotPositiveDefinite, which, lmin,
                                  which + ": smallest eigenvalue " + detail::fmt(lmin) +
                                      " is below the strictness floor " +
                                      detail::fmt(kPositivityFloor) +
                                      "; restrict the problem to the support first");
        return DensityMatrix(m, lmin);
    }

    const HermitianMatrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.dim(); }
    double lambda_min() const { return lambda_min_; }

private:
    DensityMatrix(HermitianMatrix m, double lmin)
        : mat_(std::move(m)), lambda_min_(lmin) {}

    HermitianMatrix mat_;
    double lambda_min_ = 0.0;
};

/// Instance data as parsed, before any validation.
struct RawInstance {
    double epsilon = 0.0;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    Matrix rho;
    Matrix sigma;
    Matrix cost;
};

/// Validated problem data (C, rho, sigma, epsilon) with cached spectral
/// quantities. Immutable after validation.
class ProblemInstance {
public:
    static ProblemInstance validate(const RawInstance& raw);

    const HermitianMatrix& cost() const { return cost_; }
    const DensityMatrix& rho() const { return rho_; }
    const DensityMatrix& sigma() const { return sigma_; }
    double epsilon() const { return epsilon_; }
    const BipartiteShape& shape() const { return shape_; }

    /// Smallest eigenvalue of rho (x) sigma.
    double lambda_min_marg() const { return lambda_min_marg_; }

    /// tr((rho (x) sigma) C), cached at validation.
    double product_cost_expectation() const { return product_cost_expectation_; }

private:
    ProblemInstance(HermitianMatrix cost, DensityMatrix rho, DensityMatrix sigma,
                    double epsilon, BipartiteShape shape)
        : cost_(std::move(cost)), rho_(std::move(rho)), sigma_(std::move(sigma)),
          epsilon_(epsilon), shape_(shape),
          lambda_min_marg_(rho_.lambda_min() * sigma_.lambda_min()),
          product_cost_expectation_(
              hs_inner(kron(rho_.matrix(), sigma_.matrix()), cost_)) {}

    HermitianMatrix cost_;
    DensityMatrix rho_;
    DensityMatrix sigma_;
    double epsilon_;
    BipartiteShape shape_;
    double lambda_min_marg_;
    double product_cost_expectation_;
};

namespace detail {

inline HermitianMatrix check_hermitian(const Matrix& m, const std::string& which) {
    if (m.rows() != m.cols())
        throw ValidationError(ValidationFailure::DimensionMismatch, which,
                              double(m.rows()),
                              which + ": matrix is " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()));
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermiticityTolerance)
        throw ValidationError(ValidationFailure::NonHermitian, which, asym,
                              which + ": max asymmetry |a(i,j) - conj(a(j,i))| = " +
                                  fmt(asym));
    return HermitianMatrix::hermitize(m);
}

} // namespace detail

inline ProblemInstance ProblemInstance::validate(const RawInstance& raw) {
    if (raw.d1 < 1 || raw.d2 < 1)
        throw ValidationError(ValidationFailure::DimensionMismatch, "shape",
                              double(raw.d1 < 1 ? raw.d1 : raw.d2),
                              "shape: d1 and d2 must be positive, got (" +
                                  std::to_string(raw.d1) + ", " + std::to_string(raw.d2) + ")");
    if (!(raw.epsilon > 0.0) || !std::isfinite(raw.epsilon))
        throw ValidationError(ValidationFailure::NonPositiveEpsilon, "epsilon",
                              raw.epsilon,
                              "epsilon: must be a positive real, got " +
                                  detail::fmt(raw.epsilon));
    const BipartiteShape shape{raw.d1, raw.d2};
    if (raw.rho.rows() != raw.d1 || raw.rho.cols() != raw.d1)
        throw ValidationError(ValidationFailure::DimensionMismatch, "rho",
                              double(raw.rho.rows()),
                              "rho: expected " + std::to_string(raw.d1) + "x" +
                                  std::to_string(raw.d1));
    if (raw.sigma.rows() != raw.d2 || raw.sigma.cols() != raw.d2)
        throw ValidationError(ValidationFailure::DimensionMismatch, "sigma",
                              double(raw.sigma.rows()),
                              "sigma: expected " + std::to_string(raw.d2) + "x" +
                                  std::to_string(raw.d2));
    if (raw.cost.rows() != shape.dim() || raw.cost.cols() != shape.dim())
        throw ValidationError(ValidationFailure::DimensionMismatch, "C",
                              double(raw.cost.rows()),
                              "C: expected " + std::to_string(shape.dim()) + "x" +
                                  std::to_string(shape.dim()) + " for d1*d2");

    HermitianMatrix cost = detail::check_hermitian(raw.cost, "C");
    DensityMatrix rho = DensityMatrix::validated(detail::check_hermitian(raw.rho, "rho"), "rho");
    DensityMatrix sigma =
        DensityMatrix::validated(detail::check_hermitian(raw.sigma, "sigma"), "sigma");
    return ProblemInstance(std::move(cost), std::move(rho), std::move(sigma), raw.epsilon,
                           shape);
}

/// Positive semi-definite Hermitian matrix on the composite space. Trace-one
/// and marginal conditions are not construction invariants: solver iterates
/// are infeasible before convergence.
class Coupling {
public:
    static Coupling validated(const HermitianMatrix& m) {
        const EigenDecomposition dec = eig_hermitian(m);
        const double lmin = dec.eigenvalues[0];
        if (lmin < -kPositivityFloor)
            throw ValidationError(ValidationFailure::NotPositiveDefinite, "Gamma", lmin,
                                  "Gamma: smallest eigenvalue " + detail::fmt(lmin) +
                                      " below -" + detail::fmt(kPositivityFloor));
        return Coupling(m);
    }

    const HermitianMatrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.dim(); }

private:
    explicit Coupling(HermitianMatrix m) : mat_(std::move(m)) {}

    HermitianMatrix mat_;
};

/// S(G) = tr(G log G) with the convention 0 log 0 = 0, i.e. the negative of
/// the von Neumann entropy. In [-log d, 0] for unit-trace G.
inline double von_neumann_entropy_neg(const Coupling& g) {
    return lift(ScalarFn::XLogX, g.matrix(), kPositivityFloor).trace();
}

/// F(G) = tr(C G) + epsilon S(G).
inline double primal_value(const ProblemInstance& inst, const Coupling& g) {
    if (g.dim() != inst.shape().dim())
        throw DimensionError("primal_value: coupling dimension " + std::to_string(g.dim()) +
                             " does not match instance dimension " +
                             std::to_string(inst.shape().dim()));
    return hs_inner(inst.cost(), g.matrix()) + inst.epsilon() * von_neumann_entropy_neg(g);
}

namespace detail {

/// Standard normal stream over a fixed-width Mersenne Twister; Box-Muller on
/// the raw 53-bit output keeps the values identical across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double uniform01() { // in [0, 1)
        return double(rng_() >> 11) * 0x1.0p-53;
    }

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = double((rng_() >> 11) + 1) * 0x1.0p-53; // in (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    Complex next_complex() { // CN(0,1): E|z|^2 = 1
        const double inv_sqrt2 = 0.70710678118654752440084436210485;
        const double re = next();
        const double im = next();
        return Complex(re * inv_sqrt2, im * inv_sqrt2);
    }

    Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols) {
        Matrix g(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                g(i, j) = next_complex();
        return g;
    }

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline HermitianMatrix random_density(GaussianStream& gs, Eigen::Index d) {
    // G G^dagger / tr, redrawn while the smallest eigenvalue sits below 1e-6.
    for (;;) {
        const Matrix g = gs.complex_gaussian(d, d);
        Matrix w = g * g.adjoint();
        w /= w.trace().real();
        const HermitianMatrix rho = HermitianMatrix::hermitize(w);
        if (eig_hermitian(rho).eigenvalues[0] > 1e-6)
            return rho;
    }
}

} // namespace detail

/// Seeded random instance: Wishart-normalized marginals, Gaussian Hermitian
/// cost scaled by c_scale, epsilon uniform in [0.5, 3]. Deterministic per seed.
inline ProblemInstance random_instance(std::uint64_t seed, Eigen::Index d1,
                                       Eigen::Index d2, double c_scale) {
    if (d1 < 1 || d2 < 1)
        throw DomainError("random_instance: d1 and d2 must be >= 1");
    if (!(c_scale > 0.0) || !std::isfinite(c_scale))
        throw DomainError("random_instance: c_scale must be a positive real");
    detail::GaussianStream gs(seed);
    RawInstance raw;
    raw.d1 = d1;
    raw.d2 = d2;
    raw.rho = detail::random_density(gs, d1).mat();
    raw.sigma = detail::random_density(gs, d2).mat();
    raw.cost =
        (c_scale * HermitianMatrix::hermitize(gs.complex_gaussian(d1 * d2, d1 * d2))).mat();
    raw.epsilon = 0.5 + 2.5 * gs.uniform01();
    return ProblemInstance::validate(raw);
}

} // namespace qot
