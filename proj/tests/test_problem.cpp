#include <catch2/catch.hpp>

#include <qot/dual.hpp>
#include <qot/problem.hpp>

#include "instances.hpp"
#include "reference_case.hpp"

using namespace qot;
using namespace qot_tests;

TEST_CASE("validate accepts the reference instance", "[problem]") {
    const ProblemInstance inst = reference_instance();
    REQUIRE(inst.shape().d1 == 2);
    REQUIRE(inst.shape().d2 == 2);
    REQUIRE(inst.shape().dim() == 4);
    REQUIRE(inst.epsilon() == 2.1440887263813604);

    // the cached value really is the smallest eigenvalue of rho (x) sigma
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        kron(inst.rho().matrix(), inst.sigma().matrix()).mat());
    REQUIRE(inst.lambda_min_marg() == Approx(es.eigenvalues()[0]).epsilon(1e-10));
}

TEST_CASE("validate rejects a singular marginal", "[problem]") {
    RawInstance raw = reference_raw_instance();
    raw.rho.setZero();
    raw.rho(0, 0) = 1.0;
    try {
        ProblemInstance::validate(raw);
        FAIL("expected NotPositiveDefinite");
    } catch (const ValidationError& e) {
        REQUIRE(e.kind() == ValidationFailure::NotPositiveDefinite);
        REQUIRE(e.which() == "rho");
        REQUIRE(e.value() <= 0.0);
    }
}

TEST_CASE("validate rejects non-positive epsilon", "[problem]") {
    RawInstance raw = reference_raw_instance();
    raw.epsilon = 0.0;
    try {
        ProblemInstance::validate(raw);
        FAIL("expected NonPositiveEpsilon");
    } catch (const ValidationError& e) {
        REQUIRE(e.kind() == ValidationFailure::NonPositiveEpsilon);
    }
}

TEST_CASE("validate rejects a wrong trace, asymmetry, and bad dimensions", "[problem]") {
    RawInstance raw = reference_raw_instance();
    raw.rho *= 0.9;
    try {
        ProblemInstance::validate(raw);
        FAIL("expected TraceNotOne");
    } catch (const ValidationError& e) {
        REQUIRE(e.kind() == ValidationFailure::TraceNotOne);
        REQUIRE(e.value() == Approx(0.9).margin(1e-12));
    }

    raw = reference_raw_instance();
    raw.cost(0, 1) += Complex(0.0, 1e-3);
    try {
        ProblemInstance::validate(raw);
        FAIL("expected NonHermitian");
    } catch (const ValidationError& e) {
        REQUIRE(e.kind() == ValidationFailure::NonHermitian);
        REQUIRE(e.which() == "C");
    }

    raw = reference_raw_instance();
    raw.d2 = 3;
    try {
        ProblemInstance::validate(raw);
        FAIL("expected DimensionMismatch");
    } catch (const ValidationError& e) {
        REQUIRE(e.kind() == ValidationFailure::DimensionMismatch);
    }
}

TEST_CASE("primal value at maximal entropy and at the product state", "[problem]") {
    const ProblemInstance inst = zero_cost_variant(random_instance(11, 2, 3, 1.0));
    const Eigen::Index d = inst.shape().dim();

    const Coupling uniform =
        Coupling::validated((1.0 / double(d)) * HermitianMatrix::identity(d));
    REQUIRE(primal_value(inst, uniform) ==
            Approx(-inst.epsilon() * std::log(double(d))).margin(1e-10));

    const Coupling product =
        Coupling::validated(kron(inst.rho().matrix(), inst.sigma().matrix()));
    const double s_rho =
        lift(ScalarFn::XLogX, inst.rho().matrix(), kPositivityFloor).trace();
    const double s_sigma =
        lift(ScalarFn::XLogX, inst.sigma().matrix(), kPositivityFloor).trace();
    REQUIRE(primal_value(inst, product) ==
            Approx(inst.epsilon() * (s_rho + s_sigma)).margin(1e-10));
}

TEST_CASE("negated von Neumann entropy", "[problem]") {
    Matrix pure = Matrix::Zero(3, 3);
    pure(0, 0) = 1.0;
    REQUIRE(von_neumann_entropy_neg(Coupling::validated(HermitianMatrix::hermitize(pure))) ==
            Approx(0.0).margin(1e-12));

    const Coupling uniform =
        Coupling::validated((1.0 / 3.0) * HermitianMatrix::identity(3));
    REQUIRE(von_neumann_entropy_neg(uniform) == Approx(-std::log(3.0)).margin(1e-12));

    // eigenvalue-sum oracle on a random 3x3 state
    const Matrix g = random_complex(3, 3);
    Matrix w = g * g.adjoint();
    w /= w.trace().real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(w);
    double expected = 0.0;
    for (int j = 0; j < 3; ++j)
        expected += es.eigenvalues()[j] * std::log(es.eigenvalues()[j]);
    REQUIRE(von_neumann_entropy_neg(Coupling::validated(HermitianMatrix::hermitize(w))) ==
            Approx(expected).margin(1e-10));

    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 0) = -1e-3;
    bad(1, 1) = 1.001;
    REQUIRE_THROWS_AS(von_neumann_entropy_neg(Coupling::validated(
                          HermitianMatrix::hermitize(bad))),
                      ValidationError);
}

TEST_CASE("entropy of a trace-one state lies in [-log d, 0]", "[problem]") {
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index d = 2 + trial % 3;
        const Matrix g = random_complex(d, d);
        Matrix w = g * g.adjoint();
        w /= w.trace().real();
        const double s =
            von_neumann_entropy_neg(Coupling::validated(HermitianMatrix::hermitize(w)));
        REQUIRE(s <= 1e-12);
        REQUIRE(s >= -std::log(double(d)) - 1e-12);
    }
}

TEST_CASE("random_instance validates and is deterministic", "[problem]") {
    const ProblemInstance a = random_instance(1, 2, 2, 1.0);
    const ProblemInstance b = random_instance(1, 2, 2, 1.0);
    REQUIRE(max_abs_diff(a.rho().matrix().mat(), b.rho().matrix().mat()) == 0.0);
    REQUIRE(max_abs_diff(a.sigma().matrix().mat(), b.sigma().matrix().mat()) == 0.0);
    REQUIRE(max_abs_diff(a.cost().mat(), b.cost().mat()) == 0.0);
    REQUIRE(a.epsilon() == b.epsilon());
    REQUIRE(a.epsilon() >= 0.5);
    REQUIRE(a.epsilon() <= 3.0);

    const ProblemInstance c = random_instance(2, 2, 2, 1.0);
    REQUIRE(max_abs_diff(a.cost().mat(), c.cost().mat()) > 0.0);

    REQUIRE_THROWS_AS(random_instance(1, 0, 2, 1.0), DomainError);
}

TEST_CASE("random_instance marginals stay above the sampling floor", "[problem]") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ProblemInstance inst = random_instance(seed, 2, 3, 1.0);
        REQUIRE(inst.rho().lambda_min() > 1e-6);
        REQUIRE(inst.sigma().lambda_min() > 1e-6);
    }
}

TEST_CASE("weak duality at the feasible product coupling", "[problem]") {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const ProblemInstance inst = random_instance(seed, 2, 2, 1.0);
        const Coupling product =
            Coupling::validated(kron(inst.rho().matrix(), inst.sigma().matrix()));
        const double primal = primal_value(inst, product);
        for (int trial = 0; trial < 5; ++trial)
            REQUIRE(primal >= dual_value(inst, random_dual_point(inst.shape())) - 1e-9);
    }
}

TEST_CASE("primal value is invariant under local unitary conjugation", "[problem]") {
    const ProblemInstance inst = random_instance(31, 2, 2, 1.0);
    const Matrix w1 = random_unitary(2);
    const Matrix w2 = random_unitary(2);
    Matrix w(4, 4);
    for (Eigen::Index i1 = 0; i1 < 2; ++i1)
        for (Eigen::Index j1 = 0; j1 < 2; ++j1)
            for (Eigen::Index i2 = 0; i2 < 2; ++i2)
                for (Eigen::Index j2 = 0; j2 < 2; ++j2)
                    w(i1 * 2 + i2, j1 * 2 + j2) = w1(i1, j1) * w2(i2, j2);

    const Coupling gamma = coupling_from_dual(inst, random_dual_point(inst.shape(), 0.3));

    RawInstance raw;
    raw.epsilon = inst.epsilon();
    raw.d1 = 2;
    raw.d2 = 2;
    raw.rho = inst.rho().matrix().mat();
    raw.sigma = inst.sigma().matrix().mat();
    raw.cost = w * inst.cost().mat() * w.adjoint();
    const ProblemInstance conjugated = ProblemInstance::validate(raw);
    const Coupling conj_gamma = Coupling::validated(
        HermitianMatrix::hermitize(w * gamma.matrix().mat() * w.adjoint()));

    REQUIRE(primal_value(conjugated, conj_gamma) ==
            Approx(primal_value(inst, gamma)).margin(1e-9));
}
