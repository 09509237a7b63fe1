#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "qot/dual.hpp"

namespace qot {

enum class StepMode { Fixed, Adaptive };

struct SolverConfig {
    double delta = 1e-8;              // stopping tolerance on both marginal-error norms
    long max_iters = 1'000'000;
    StepMode step_mode = StepMode::Fixed;
    std::optional<DualPoint> start;   // default: zero matrices
    long trace_every = 1;             // record cadence in full iterations
};

/// eta1 = (epsilon/d2) exp(-beta), eta2 = (epsilon/d1) exp(-beta) with
/// beta = nu2((tr((rho x sigma) C) - D(U0,V0))/epsilon).
struct StepSizes {
    double eta1 = 0.0;
    double eta2 = 0.0;
    double beta = 0.0;
};

enum class Stage { AfterU, AfterV };

/// Diagnostics of the point reached after one half-step, all derived from
/// that half-step's single eigendecomposition.
struct IterationRecord {
    long n = 0;
    Stage stage = Stage::AfterU;
    double dual = 0.0;
    double err1_f = 0.0;
    double err2_f = 0.0;
    double env_lower = 0.0;
    double env_upper = 0.0;
};

enum class SolveStatus { Converged, MaxIters };

inline const char* to_string(SolveStatus status) {
    return status == SolveStatus::Converged ? "converged" : "max_iters";
}

struct Solution {
    DualPoint dual_point;
    Coupling coupling;
    long iterations = 0;
    SolveStatus status = SolveStatus::MaxIters;
    std::vector<IterationRecord> trace;
    double rate_estimate = std::numeric_limits<double>::quiet_NaN();
};

inline StepSizes compute_step_sizes(const ProblemInstance& inst, double initial_dual) {
    StepSizes s;
    s.beta = nu2(detail::nu2_argument(inst, initial_dual));
    const double damp = std::exp(-s.beta);
    s.eta1 = inst.epsilon() / double(inst.shape().d2) * damp;
    s.eta2 = inst.epsilon() / double(inst.shape().d1) * damp;
    return s;
}

/// Least-squares slope of log(err1_f + err2_f) against the iteration index,
/// after discarding the first 20% of records as burn-in. A negative slope is
/// the empirical linear convergence rate.
inline double estimate_linear_rate(const std::vector<IterationRecord>& trace) {
    const std::size_t burn = trace.size() / 5;
    if (trace.size() - burn < 50)
        throw InsufficientTraceError("estimate_linear_rate: " +
                                     std::to_string(trace.size() - burn) +
                                     " records after burn-in, need at least 50");
    double sx = 0.0, sy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = burn; i < trace.size(); ++i) {
        const double e = trace[i].err1_f + trace[i].err2_f;
        if (!(e > 0.0))
            continue;
        sx += double(trace[i].n);
        sy += std::log(e);
        ++count;
    }
    if (count < 2)
        throw InsufficientTraceError("estimate_linear_rate: fewer than 2 usable records");
    const double xbar = sx / double(count);
    const double ybar = sy / double(count);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = burn; i < trace.size(); ++i) {
        const double e = trace[i].err1_f + trace[i].err2_f;
        if (!(e > 0.0))
            continue;
        const double dx = double(trace[i].n) - xbar;
        sxy += dx * (std::log(e) - ybar);
        sxx += dx * dx;
    }
    if (sxx == 0.0)
        throw InsufficientTraceError("estimate_linear_rate: all records share one index");
    return sxy / sxx;
}

namespace detail {

inline void validate_config(const SolverConfig& cfg) {
    if (!(cfg.delta > 0.0))
        throw DomainError("solver config: delta must be positive");
    if (cfg.max_iters < 1)
        throw DomainError("solver config: max_iters must be >= 1");
    if (cfg.trace_every < 1)
        throw DomainError("solver config: trace_every must be >= 1");
}

inline DualPoint start_point(const ProblemInstance& inst, const SolverConfig& cfg) {
    if (!cfg.start)
        return DualPoint::zero(inst.shape());
    const DualPoint& p = *cfg.start;
    if (p.U.dim() != inst.shape().d1 || p.V.dim() != inst.shape().d2)
        throw DimensionError("solver config: start point does not match the instance shape");
    return p;
}

inline IterationRecord make_record(const ProblemInstance& inst, long n, Stage stage,
                                   const DualEvaluation& ev) {
    const SpectralEnvelope env = spectral_envelope(inst, ev.dual);
    return {n, stage, ev.dual, frobenius_norm(ev.e1), frobenius_norm(ev.e2),
            env.lower, env.upper};
}

inline void check_monotone(double previous, double current) {
    if (current < previous - 1e-10 * (1.0 + std::abs(previous)))
        throw Error("solver: dual value decreased from " + fmt(previous) + " to " +
                    fmt(current) + "; step sizes are not compliant");
}

inline double rate_or_nan(const std::vector<IterationRecord>& trace) {
    try {
        return estimate_linear_rate(trace);
    } catch (const InsufficientTraceError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace detail

/// Block gradient ascent on the dual functional:
///   U <- U + eta1 E1(U, V)
///   V <- V + eta2 E2(U', V)
/// with one eigendecomposition per half-step; the evaluation after the
/// V-update is reused both for the next U-step's gradient and for the
/// convergence check. The loop guard reads the error norms stored by the
/// previous iteration (the U error is one half-step staler than the V error,
/// as the updates themselves require); a run only reports convergence after
/// both norms, recomputed at the final point, pass the threshold as well.
inline Solution bga_solve(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
    detail::validate_config(cfg);
    DualPoint p = detail::start_point(inst, cfg);
    DualEvaluation cur = evaluate_dual(inst, p);
    StepSizes steps = compute_step_sizes(inst, cur.dual);

    std::vector<IterationRecord> trace;
    double stale_e1 = std::numeric_limits<double>::infinity();
    double stale_e2 = std::numeric_limits<double>::infinity();
    long n = 0;
    SolveStatus status = SolveStatus::MaxIters;
    while (true) {
        if (stale_e1 < cfg.delta && stale_e2 < cfg.delta &&
            frobenius_norm(cur.e1) < cfg.delta && frobenius_norm(cur.e2) < cfg.delta) {
            status = SolveStatus::Converged;
            break;
        }
        if (n >= cfg.max_iters)
            break;
        if (cfg.step_mode == StepMode::Adaptive && n > 0 && n % 25 == 0)
            steps = compute_step_sizes(inst, cur.dual);

        const double last_dual = cur.dual;
        const double e1_norm = frobenius_norm(cur.e1);
        p.U = p.U + steps.eta1 * cur.e1;
        const DualEvaluation half = evaluate_dual(inst, p);
        detail::check_monotone(last_dual, half.dual);

        const double e2_norm = frobenius_norm(half.e2);
        p.V = p.V + steps.eta2 * half.e2;
        cur = evaluate_dual(inst, p);
        detail::check_monotone(half.dual, cur.dual);

        if (n % cfg.trace_every == 0) {
            trace.push_back(detail::make_record(inst, n, Stage::AfterU, half));
            trace.push_back(detail::make_record(inst, n, Stage::AfterV, cur));
        }
        stale_e1 = e1_norm;
        stale_e2 = e2_norm;
        ++n;
    }
    const double rate = detail::rate_or_nan(trace);
    return Solution{std::move(p), Coupling::validated(cur.coupling), n, status,
                    std::move(trace), rate};
}

/// Plain gradient ascent on the tensor-sum subspace with the conservative
/// step min(eta1, eta2)/4; an independent cross-check for bga_solve. The
/// couplings of the two solvers agree within a small multiple of delta.
inline Solution oracle_solve(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
    detail::validate_config(cfg);
    DualPoint p = detail::start_point(inst, cfg);
    DualEvaluation cur = evaluate_dual(inst, p);
    const StepSizes steps = compute_step_sizes(inst, cur.dual);
    const double eta = std::min(steps.eta1, steps.eta2) / 4.0;
    const double d = double(inst.shape().dim());
    const HermitianMatrix id2 = HermitianMatrix::identity(inst.shape().d2);

    std::vector<IterationRecord> trace;
    long n = 0;
    SolveStatus status = SolveStatus::MaxIters;
    while (true) {
        if (frobenius_norm(cur.e1) < cfg.delta && frobenius_norm(cur.e2) < cfg.delta) {
            status = SolveStatus::Converged;
            break;
        }
        if (n >= cfg.max_iters)
            break;
        const double last_dual = cur.dual;
        p.U = p.U + eta * ((1.0 / double(inst.shape().d2)) * cur.e1);
        p.V = p.V + eta * ((1.0 / double(inst.shape().d1)) * cur.e2 -
                           (cur.e1.trace() / d) * id2);
        cur = evaluate_dual(inst, p);
        detail::check_monotone(last_dual, cur.dual);
        if (n % cfg.trace_every == 0)
            trace.push_back(detail::make_record(inst, n, Stage::AfterV, cur));
        ++n;
    }
    const double rate = detail::rate_or_nan(trace);
    return Solution{std::move(p), Coupling::validated(cur.coupling), n, status,
                    std::move(trace), rate};
}

} // namespace qot
