#include "pdeident/elliptic.hpp"
#include "pdeident/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pdeident;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("subcritical Dirichlet logistic problem has only the trivial steady state") {
    // a < d pi^2, so the linearization admits no unstable mode.
    const auto cls = shoot_count(0.2, Reaction::logistic(0.5, 1.0),
                                 BoundaryCondition::dirichlet(1.0), {-2.0, 2.0});
    CHECK(cls.regime == EllipticRegime::UniqueSolution);
    CHECK(cls.solutions.empty());
}

TEST_CASE("supercritical Dirichlet logistic problem has a nontrivial steady state") {
    const double d = 0.05, a = 1.0, b = 1.0; // a > d pi^2
    const auto cls = shoot_count(d, Reaction::logistic(a, b),
                                 BoundaryCondition::dirichlet(1.0), {0.1, 8.0});
    CHECK(cls.regime == EllipticRegime::DiscreteSolutions);
    REQUIRE(cls.solutions.size() >= 1);
    for (const auto &p : cls.solutions)
        CHECK(elliptic_residual(p, d, Reaction::logistic(a, b)) < 1e-8);

    // The count is stable under doubling the scan resolution.
    const auto cls2 = shoot_count(d, Reaction::logistic(a, b),
                                  BoundaryCondition::dirichlet(1.0), {0.1, 8.0}, 8000);
    CHECK(cls2.solutions.size() == cls.solutions.size());
    for (size_t k = 0; k < cls.solutions.size(); ++k)
        CHECK(cls2.solutions[k].shoot_param ==
              doctest::Approx(cls.solutions[k].shoot_param).epsilon(1e-8));
}

TEST_CASE("Neumann logistic shooting finds the carrying-capacity state") {
    const double d = 0.1, a = 1.0, b = 2.0; // constant steady state at a/b = 0.5
    const auto cls = shoot_count(d, Reaction::logistic(a, b),
                                 BoundaryCondition::neumann(1.0), {0.2, 0.8});
    CHECK(cls.regime == EllipticRegime::DiscreteSolutions);
    REQUIRE(cls.solutions.size() == 1);
    CHECK(cls.solutions[0].shoot_param == doctest::Approx(0.5).epsilon(1e-9));
    for (double v : cls.solutions[0].psi)
        CHECK(v == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("a continuum of steady states is detected") {
    // Linear reaction at the principal eigenvalue: every shot is a solution.
    const auto cls = shoot_count(1.0, Reaction::logistic(kPi * kPi, 0.0),
                                 BoundaryCondition::dirichlet(1.0), {-1.0, 1.0});
    CHECK(cls.regime == EllipticRegime::ContinuousSpectrum);
}

TEST_CASE("all-blowup scans are reported") {
    // f = 100 u^2 with tiny diffusion drives every positive shot to -infinity.
    CHECK_THROWS_AS(shoot_count(0.001, Reaction::logistic(0.0, -100.0),
                                BoundaryCondition::dirichlet(1.0), {10.0, 20.0}),
                    IntegratorBlowUp);
}

TEST_CASE("roots at the scan boundary are flagged") {
    CHECK_THROWS_AS(shoot_count(0.1, Reaction::logistic(1.0, 2.0),
                                BoundaryCondition::neumann(1.0), {0.4999, 0.6}, 100),
                    RangeTooNarrow);
}

TEST_CASE("shooting validation") {
    const auto bc = BoundaryCondition::dirichlet(1.0);
    CHECK_THROWS_AS(shoot_count(0.0, Reaction::logistic(1.0, 1.0), bc, {-1.0, 1.0}),
                    InvalidParameter);
    CHECK_THROWS_AS(shoot_count(0.1, Reaction::logistic(1.0, 1.0), bc, {1.0, -1.0}),
                    InvalidParameter);
    CHECK_THROWS_AS(shoot_count(0.1, Reaction::logistic(1.0, 1.0), bc, {-1.0, 1.0}, 5),
                    InvalidParameter);
    CHECK_THROWS_AS(shoot_count(0.1, Reaction::logistic(1.0, 1.0),
                                BoundaryCondition::periodic(), {-1.0, 1.0}),
                    InvalidParameter);
}

TEST_CASE("nonlinear pairs with distinct diffusion are identifiable") {
    const NonlinearParams p1{0.10, 2.0, 2.0};
    const NonlinearParams p2{0.05, 1.0, 1.0};
    const auto verdict =
        classify_nonlinear_pair(p1, p2, BoundaryCondition::dirichlet(1.0), {0.1, 8.0});
    CHECK(verdict.identifiable);
    CHECK(verdict.regime != EllipticRegime::ContinuousSpectrum);
}

TEST_CASE("nonlinear pairs with equal diffusion are resolved algebraically") {
    const NonlinearParams p1{0.1, 2.0, 2.0};
    const NonlinearParams p2{0.1, 1.0, 1.0};
    const auto verdict =
        classify_nonlinear_pair(p1, p2, BoundaryCondition::dirichlet(1.0), {-1.0, 1.0});
    CHECK(verdict.identifiable);
    CHECK(verdict.regime == EllipticRegime::DiscreteSolutions);

    const NonlinearParams p3{0.1, 2.0, 1.0};
    const auto v2 =
        classify_nonlinear_pair(p3, p2, BoundaryCondition::dirichlet(1.0), {-1.0, 1.0});
    CHECK(v2.identifiable);
    CHECK(v2.regime == EllipticRegime::UniqueSolution);

    CHECK_THROWS_AS(
        classify_nonlinear_pair(p2, p2, BoundaryCondition::dirichlet(1.0), {-1.0, 1.0}),
        SamePoint);
}
