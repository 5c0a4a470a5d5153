#include "pdeident/classify.hpp"
#include "pdeident/errors.hpp"
#include "pdeident/operators.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace pdeident;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("on-surface Dirichlet pair is indistinguishable") {
    // auxiliary point (0.1, 0, 0.1 pi^2): c equals lambda_1(0.1, 0).
    const OperatorParams a1{0.15, 0.0, 1.0 + 0.1 * kPi * kPi};
    const OperatorParams a2{0.05, 0.0, 1.0};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);
    REQUIRE(cls.witness.has_value());
    CHECK(cls.witness->n == 1);
    CHECK(cls.witness->positive);
    CHECK(cls.auxiliary.d == doctest::Approx(0.1));
    CHECK(cls.auxiliary.c == doctest::Approx(0.1 * kPi * kPi));
}

TEST_CASE("off-surface Dirichlet pair is distinguishable") {
    const OperatorParams a1{0.15, 0.0, 1.3};
    const OperatorParams a2{0.05, 0.0, 1.0};
    const auto cls = classify_pair(a1, a2, BoundaryCondition::dirichlet(1.0));
    CHECK(cls.verdict == Verdict::DistinguishableR);
    CHECK_FALSE(cls.witness.has_value());
}

TEST_CASE("matched eigenvalue with broken drift ratio is AI") {
    // auxiliary point (0.1, 0.2, lambda_1) but b1/d1 != b2/d2.
    const double lam1 = 0.2 * 0.2 / (4.0 * 0.1) + 0.1 * kPi * kPi;
    const OperatorParams a2{0.05, 0.3, 0.0};
    const OperatorParams a1{0.15, 0.5, lam1};
    const auto cls = classify_pair(a1, a2, BoundaryCondition::dirichlet(1.0));
    CHECK(cls.verdict == Verdict::DistinguishableAI);
    REQUIRE(cls.witness.has_value());
    bool found = false;
    for (const auto &note : cls.notes)
        found = found || note == "drift-ratio-violated";
    CHECK(found);
}

TEST_CASE("matched eigenvalue with shared drift ratio is ANI and constructible") {
    const double lam_aux = 0.2 * 0.2 / (4.0 * 0.1) + 0.1 * kPi * kPi;
    const OperatorParams a2{0.05, 0.1, 0.3};
    const OperatorParams a1{0.15, 0.3, 0.3 + lam_aux};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);

    const auto sol = construct_nonidentifiable(a1, a2, bc, 1.0);
    CHECK(nonidentifiable_residual(sol, a1) < 1e-6);
    CHECK(nonidentifiable_residual(sol, a2) < 1e-6);
}

TEST_CASE("identical points are rejected") {
    const OperatorParams a{0.1, 0.0, 0.5};
    CHECK_THROWS_AS(classify_pair(a, a, BoundaryCondition::dirichlet(1.0)), SamePoint);
}

TEST_CASE("Neumann pairs with equal c share the constant mode") {
    const OperatorParams a1{0.2, 0.1, 0.7};
    const OperatorParams a2{0.05, 0.4, 0.7};
    const auto bc = BoundaryCondition::neumann(1.0);
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);
    REQUIRE(cls.witness.has_value());
    CHECK(cls.witness->n == 0);

    const auto sol = construct_nonidentifiable(a1, a2, bc, 2.0);
    CHECK(sol.growth_rate == doctest::Approx(0.7));
    CHECK(sol.positive);
    CHECK(nonidentifiable_residual(sol, a1) < 1e-8);
    CHECK(nonidentifiable_residual(sol, a2) < 1e-8);
}

TEST_CASE("degenerate Robin pair rides the exponential mode") {
    // c1 - c2 = (b1 - b2) / sigma with equal diffusivities.
    const auto bc = BoundaryCondition::robin(0.5, 1.0);
    const OperatorParams a1{0.3, 1.0, 1.5};
    const OperatorParams a2{0.3, 0.5, 0.5};
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);
    REQUIRE(cls.witness.has_value());
    CHECK(cls.witness->n == 0);

    const auto sol = construct_nonidentifiable(a1, a2, bc, 1.0);
    // mu = d/sigma^2 - b/sigma + c for both points.
    CHECK(sol.growth_rate == doctest::Approx(0.3 / 0.25 - 1.0 / 0.5 + 1.5).epsilon(1e-12));
    CHECK(nonidentifiable_residual(sol, a1) < 1e-6);
    CHECK(nonidentifiable_residual(sol, a2) < 1e-6);
}

TEST_CASE("Robin pair with matched scanned eigenvalue") {
    const auto bc = BoundaryCondition::robin(1.0, 1.0);
    const auto aux_pairs = robin_eigenpairs(0.1, 0.0, 1.0, 1.0, 2);
    const OperatorParams a2{0.05, 0.0, 0.2};
    const OperatorParams a1{0.15, 0.0, 0.2 + aux_pairs[0].lambda};
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);
    REQUIRE(cls.witness.has_value());
    CHECK(cls.witness->n == 1);
    const auto sol = construct_nonidentifiable(a1, a2, bc, 1.0);
    CHECK(nonidentifiable_residual(sol, a1) < 1e-6);
    CHECK(nonidentifiable_residual(sol, a2) < 1e-6);
}

TEST_CASE("periodic pair matches a multiplicity-two mode") {
    const auto bc = BoundaryCondition::periodic();
    const OperatorParams a1{0.5, 0.0, 2.0};
    const OperatorParams a2{0.25, 0.0, 1.0};
    const auto cls = classify_pair(a1, a2, bc);
    CHECK(cls.verdict == Verdict::IndistinguishableANI);
    REQUIRE(cls.witness.has_value());
    CHECK(cls.witness->n == 2); // 0.25 n^2 = 1
    CHECK(cls.witness->multiplicity == 2);

    const auto sol = construct_nonidentifiable(a1, a2, bc, 1.0);
    CHECK(sol.amplitude2 != 0.0); // two-dimensional family is exercised
    CHECK(nonidentifiable_residual(sol, a1) < 1e-6);
    CHECK(nonidentifiable_residual(sol, a2) < 1e-6);
}

TEST_CASE("periodic drift blocks nonconstant kernels") {
    const OperatorParams a1{0.5, 0.3, 2.0};
    const OperatorParams a2{0.25, 0.1, 1.0};
    const auto cls = classify_pair(a1, a2, BoundaryCondition::periodic());
    CHECK(cls.verdict == Verdict::DistinguishableR);
}

TEST_CASE("construction refuses distinguishable pairs and zero amplitude") {
    const OperatorParams a1{0.15, 0.0, 1.3};
    const OperatorParams a2{0.05, 0.0, 1.0};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    CHECK_THROWS_AS(construct_nonidentifiable(a1, a2, bc, 1.0), NotConstructible);
    const OperatorParams a3{0.15, 0.0, 1.0 + 0.1 * kPi * kPi};
    CHECK_THROWS_AS(construct_nonidentifiable(a3, a2, bc, 0.0), InvalidScale);
}

TEST_CASE("indistinguishable-set samples sit exactly on the eigenvalue surface") {
    const std::vector<double> d_grid{0.05, 0.1, 0.5};
    const std::vector<double> b_grid{0.0, 0.3};

    SUBCASE("dirichlet") {
        const auto bc = BoundaryCondition::dirichlet(1.0);
        const auto samples = indistinguishable_set(bc, 3, d_grid, b_grid);
        CHECK(samples.size() == 3 * 3 * 2);
        int positives = 0;
        for (const auto &s : samples) {
            const double w = static_cast<double>(s.n) * kPi / 1.0;
            const double lam = s.b * s.b / (4.0 * s.d) + s.d * w * w;
            CHECK(s.c == lam); // constructed identically, not approximately
            if (s.n == 1)
                ++positives;
            CHECK(s.positive == (s.n == 1));
        }
        CHECK(positives == 6);
    }
    SUBCASE("neumann includes the constant plane") {
        const auto bc = BoundaryCondition::neumann(1.0);
        const auto samples = indistinguishable_set(bc, 2, d_grid, b_grid);
        for (const auto &s : samples) {
            if (s.n == 0) {
                CHECK(s.c == 0.0);
                CHECK(s.positive);
            } else {
                const double w = static_cast<double>(s.n) * kPi / 1.0;
                CHECK(s.c == s.b * s.b / (4.0 * s.d) + s.d * w * w);
                CHECK_FALSE(s.positive);
            }
        }
    }
    SUBCASE("robin samples match the scanned spectrum") {
        const auto bc = BoundaryCondition::robin(0.7, 1.0);
        const auto samples = indistinguishable_set(bc, 2, d_grid, b_grid);
        for (const auto &s : samples) {
            if (s.d == 0.0)
                continue;
            const auto pairs = robin_eigenpairs(s.d, s.b, 0.7, 1.0, 2);
            CHECK(s.c == pairs[static_cast<size_t>(s.n - 1)].lambda);
        }
    }
    SUBCASE("periodic drops drifting nodes") {
        const auto bc = BoundaryCondition::periodic();
        const auto samples = indistinguishable_set(bc, 2, d_grid, b_grid);
        for (const auto &s : samples) {
            CHECK(s.b == 0.0);
            CHECK(s.c == s.d * s.n * s.n);
        }
    }
}

TEST_CASE("two-species construction satisfies the coupling identities") {
    const OperatorParams a1{0.15, 0.0, 1.0 + 0.1 * kPi * kPi};
    const OperatorParams a2{0.05, 0.0, 1.0};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    const auto sys = construct_system_nonidentifiable(a1, a2, bc, 2.0, 3.0, 0.5, 0.25);

    CHECK(sys.params.d_u == a1.d);
    CHECK(sys.params.d_v == a2.d);
    CHECK(sys.params.a11 == a1.c + 0.5);
    CHECK(sys.params.a22 == a2.c + 0.25);
    // (kappa_u u1, kappa_v u1) solves the system iff these identities hold.
    CHECK(sys.params.a11 * sys.kappa_u - sys.params.a12 * sys.kappa_v ==
          doctest::Approx(a1.c * sys.kappa_u).epsilon(1e-14));
    CHECK(-sys.params.a21 * sys.kappa_u + sys.params.a22 * sys.kappa_v ==
          doctest::Approx(a2.c * sys.kappa_v).epsilon(1e-14));
    CHECK_THROWS_AS(construct_system_nonidentifiable(a1, a2, bc, 0.0, 1.0, 0.5, 0.25),
                    InvalidScale);
}

TEST_CASE("singular commutant member yields identical kernel trajectories") {
    Eigen::Matrix2d m1;
    m1 << 2.0, 3.0, 1.0, 4.0;
    // alpha I + beta m1 is singular for alpha = -1, beta = 1.
    const Eigen::Matrix2d m = commutant_member(m1, -1.0, 1.0);
    CHECK(m(0, 0) == doctest::Approx(1.0));
    CHECK(m(0, 1) == doctest::Approx(3.0));
    CHECK(m(1, 0) == doctest::Approx(1.0));
    CHECK(m(1, 1) == doctest::Approx(3.0));

    const auto pair = ode_commutant_pair(m1, m);
    Eigen::Vector2d expect(-3.0, 1.0);
    expect.normalize();
    const double align = std::abs(pair.x0.dot(expect));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity base matrix with an explicit singular perturbation") {
    const Eigen::Matrix2d m1 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d m2;
    m2 << 2.0, -1.0, 1.0, 0.0;
    const auto pair = ode_commutant_pair(m1, m2 - m1);
    Eigen::Vector2d expect(1.0, 1.0);
    expect.normalize();
    CHECK(std::abs(pair.x0.dot(expect)) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> ts{0.0, 0.5, 1.0, 2.0};
    const auto traj1 = ode_trajectory(m1, pair.x0, ts);
    const auto traj2 = ode_trajectory(m2, pair.x0, ts);
    for (size_t i = 0; i < ts.size(); ++i)
        CHECK((traj1[i] - traj2[i]).norm() < 1e-9 * std::max(1.0, traj1[i].norm()));
}

TEST_CASE("commutant validation") {
    Eigen::Matrix2d m1;
    m1 << 2.0, 3.0, 1.0, 4.0;
    Eigen::Matrix2d nilpotent;
    nilpotent << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(ode_commutant_pair(m1, nilpotent), NonCommuting);
    CHECK_THROWS_AS(ode_commutant_pair(m1, m1), NonSingular);
    CHECK_THROWS_AS(ode_commutant_pair(m1, Eigen::Matrix2d::Zero()), NonSingular);
}
