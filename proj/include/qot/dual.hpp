#pragma once

#include <algorithm>
#include <utility>

#include "qot/problem.hpp"

namespace qot {

/// Pair of dual potentials on the two subsystems. D is constant along the
/// gauge direction (U + t id, V - t id), so only the tensor sum is unique.
struct DualPoint {
    HermitianMatrix U;
    HermitianMatrix V;

    static DualPoint zero(const BipartiteShape& shape) {
        return {HermitianMatrix::zero(shape.d1), HermitianMatrix::zero(shape.d2)};
    }
};

/// Computable bounds on the spectrum of tensor_sum(U,V) - C at a given dual
/// value: lower is the increasing envelope, upper the decreasing one.
struct SpectralEnvelope {
    double lower = 0.0;
    double upper = 0.0;
    double beta = 0.0; // upper / epsilon
};

/// Everything derived from one eigendecomposition of
/// (tensor_sum(U,V) - C)/epsilon at a single dual point.
struct DualEvaluation {
    double dual = 0.0;
    HermitianMatrix e1;       // rho - tr_2(coupling), the block gradient in U
    HermitianMatrix e2;       // sigma - tr_1(coupling), the block gradient in V
    HermitianMatrix coupling; // exp((tensor_sum(U,V) - C)/epsilon)
    double lambda_min = 0.0;  // of tensor_sum(U,V) - C
    double lambda_max = 0.0;
};

inline constexpr double kExpOverflowGuard = 700.0;

inline DualEvaluation evaluate_dual(const ProblemInstance& inst, const DualPoint& p) {
    const BipartiteShape& shape = inst.shape();
    if (p.U.dim() != shape.d1 || p.V.dim() != shape.d2)
        throw DimensionError("evaluate_dual: dual point dimensions (" +
                             std::to_string(p.U.dim()) + ", " + std::to_string(p.V.dim()) +
                             ") do not match shape (" + std::to_string(shape.d1) + ", " +
                             std::to_string(shape.d2) + ")");
    const double eps = inst.epsilon();
    const HermitianMatrix z = (1.0 / eps) * (tensor_sum(p.U, p.V) - inst.cost());
    const EigenDecomposition dec = eig_hermitian(z);
    const Eigen::Index d = shape.dim();
    const double kmin = dec.eigenvalues[0];
    const double kmax = dec.eigenvalues[d - 1];
    if (kmax > kExpOverflowGuard)
        throw DivergedDualError("evaluate_dual: exponent " + detail::fmt(kmax) +
                                " exceeds the overflow guard " +
                                detail::fmt(kExpOverflowGuard));

    const RealVector expvals = dec.eigenvalues.array().exp();
    DualEvaluation ev;
    ev.coupling = HermitianMatrix::hermitize(detail::rebuild(dec, expvals));
    ev.dual = hs_inner(inst.rho().matrix(), p.U) + hs_inner(inst.sigma().matrix(), p.V) -
              eps * expvals.sum() + eps;
    ev.e1 = inst.rho().matrix() - partial_trace_2(ev.coupling, shape);
    ev.e2 = inst.sigma().matrix() - partial_trace_1(ev.coupling, shape);
    ev.lambda_min = eps * kmin;
    ev.lambda_max = eps * kmax;
    return ev;
}

/// D(U,V) = tr(U rho) + tr(V sigma) - epsilon tr(exp((tensor_sum(U,V) - C)/epsilon)) + epsilon.
inline double dual_value(const ProblemInstance& inst, const DualPoint& p) {
    return evaluate_dual(inst, p).dual;
}

inline HermitianMatrix marginal_error_1(const ProblemInstance& inst, const DualPoint& p) {
    return evaluate_dual(inst, p).e1;
}

inline HermitianMatrix marginal_error_2(const ProblemInstance& inst, const DualPoint& p) {
    return evaluate_dual(inst, p).e2;
}

/// Gradient of D restricted to the tensor-sum subspace, returned as the pair
/// (E1/d2, E2/d1 - tr(E1) id/d) whose tensor sum is the subspace gradient.
inline std::pair<HermitianMatrix, HermitianMatrix>
projected_gradient(const ProblemInstance& inst, const DualPoint& p) {
    const DualEvaluation ev = evaluate_dual(inst, p);
    const BipartiteShape& shape = inst.shape();
    const double d = double(shape.dim());
    HermitianMatrix a = (1.0 / double(shape.d2)) * ev.e1;
    HermitianMatrix b = (1.0 / double(shape.d1)) * ev.e2 -
                        (ev.e1.trace() / d) * HermitianMatrix::identity(shape.d2);
    return {std::move(a), std::move(b)};
}

/// Inverse of x -> e^x - x - 1 on [0, inf).
inline double nu2(double y) {
    if (y < 0.0)
        throw DomainError("nu2: argument " + detail::fmt(y) + " is negative");
    if (y == 0.0)
        return 0.0;
    const auto f = [y](double x) { return std::expm1(x) - x - y; };
    double x;
    if (y < 1e-3) {
        // Bisection cannot resolve roots far below its absolute width; seed
        // with the leading term of the series instead. The seed sqrt(2y) lies
        // above the root, where Newton on this convex function is monotone.
        x = std::sqrt(2.0 * y);
    } else {
        double lo = 0.0;
        double hi = std::max(10.0, y + 2.0);
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break; // bracket narrower than one ulp
            (f(mid) <= 0.0 ? lo : hi) = mid;
        }
        x = 0.5 * (lo + hi);
    }
    for (int it = 0; it < 20; ++it) {
        const double deriv = std::expm1(x);
        if (deriv <= 0.0)
            break;
        const double step = f(x) / deriv;
        x -= step;
        if (x < 0.0)
            x = 0.0;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x)))
            break;
    }
    return x;
}

/// Inverse, on its increasing branch x <= log(lambda/d), of
/// x -> epsilon lambda x - d epsilon e^x with lambda = lambda_min(rho x sigma).
inline double nu1(const ProblemInstance& inst, double y) {
    const double eps = inst.epsilon();
    const double lambda = inst.lambda_min_marg();
    const double d = double(inst.shape().dim());
    const double xstar = std::log(lambda / d);
    const double ymax = eps * lambda * (std::log(lambda) - std::log(d) - 1.0);
    if (y > ymax) {
        if (y > ymax + 1e-12 * (1.0 + std::abs(ymax)))
            throw DomainError("nu1: argument " + detail::fmt(y) +
                              " above the domain endpoint " + detail::fmt(ymax));
        y = ymax;
    }
    const auto g = [&](double x) { return eps * lambda * x - d * eps * std::exp(x) - y; };
    double lo = xstar - (std::abs(y) + 1.0) / (eps * lambda);
    double hi = xstar;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break; // bracket narrower than one ulp
        (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double deriv = eps * lambda - d * eps * std::exp(x);
        if (deriv <= 0.0)
            break;
        const double next = x - g(x) / deriv;
        if (next < lo || next > hi)
            break;
        x = next;
    }
    return x;
}

namespace detail {

/// Argument of nu2 in the envelope and step-size formulas. Nonnegative in
/// exact arithmetic at every reachable dual value; tiny negatives are clamped
/// and anything beyond floating-point noise is rejected.
inline double nu2_argument(const ProblemInstance& inst, double dual_val) {
    const double arg = (inst.product_cost_expectation() - dual_val) / inst.epsilon();
    if (arg < -1e-10)
        throw InconsistentDualValueError(
            "dual value exceeds tr((rho x sigma) C) by " +
            fmt(-arg * inst.epsilon()) + "; no dual point attains it");
    return std::max(arg, 0.0);
}

} // namespace detail

/// Eigenvalue envelope of tensor_sum(U,V) - C at the given dual value:
///   upper = epsilon nu2((tr((rho x sigma) C) - dual)/epsilon),
///   lower = epsilon nu1(dual - epsilon - tr((rho x sigma) C)
///                        - upper (1 - lambda_min(rho x sigma))).
inline SpectralEnvelope spectral_envelope(const ProblemInstance& inst, double dual_val) {
    const double eps = inst.epsilon();
    SpectralEnvelope env;
    env.beta = nu2(detail::nu2_argument(inst, dual_val));
    env.upper = eps * env.beta;
    env.lower = eps * nu1(inst, dual_val - eps - inst.product_cost_expectation() -
                                    env.upper * (1.0 - inst.lambda_min_marg()));
    return env;
}

/// Strong-concavity constant of -D on the super-level set {D >= M}:
/// gamma(M) = epsilon^-1 exp(lower(M)/epsilon).
inline double strong_concavity_gamma(const ProblemInstance& inst, double level) {
    return std::exp(spectral_envelope(inst, level).lower / inst.epsilon()) / inst.epsilon();
}

/// Gamma(U,V) = exp((tensor_sum(U,V) - C)/epsilon); positive definite.
inline Coupling coupling_from_dual(const ProblemInstance& inst, const DualPoint& p) {
    return Coupling::validated(evaluate_dual(inst, p).coupling);
}

} // namespace qot
