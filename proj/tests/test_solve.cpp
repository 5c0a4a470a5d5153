#include "pdeident/errors.hpp"
#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace pdeident;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

} // namespace

TEST_CASE("spectral solver reproduces the single-mode closed form") {
    const OperatorParams A{0.05, 0.0, 1.0};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0};
    ic.bc = bc;
    const auto x = linspace(0.0, 1.0, 21);
    const auto t = linspace(0.0, 2.0, 11);
    const Field u = solve_linear_spectral(A, bc, ic, x, t);

    const double mu = 1.0 - 0.05 * kPi * kPi; // growth rate c - d pi^2
    for (int i = 0; i < 21; ++i)
        for (int j = 0; j < 11; ++j) {
            const double exact =
                std::exp(mu * t[static_cast<size_t>(j)]) * std::sin(kPi * x[static_cast<size_t>(i)]);
            CHECK(u.values(i, j) == doctest::Approx(exact).epsilon(1e-13));
        }
}

TEST_CASE("spectral solver superposes modes") {
    const OperatorParams A{0.2, 0.0, 0.3};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0, -0.5, 0.25};
    ic.bc = bc;
    const auto x = linspace(0.0, 1.0, 17);
    const auto t = linspace(0.0, 1.0, 5);
    const Field u = solve_linear_spectral(A, bc, ic, x, t);
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 5; ++j) {
            double exact = 0.0;
            for (int n = 1; n <= 3; ++n) {
                const double lam = 0.2 * n * n * kPi * kPi;
                exact += ic.coeffs[static_cast<size_t>(n - 1)] *
                         std::exp((0.3 - lam) * t[static_cast<size_t>(j)]) *
                         std::sin(n * kPi * x[static_cast<size_t>(i)]);
            }
            CHECK(u.values(i, j) == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("twin parameter points give identical spectral fields") {
    // Both points share the growth rate mu = c - d pi^2 and the sin(pi x) mode.
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0};
    ic.bc = bc;
    const auto x = linspace(0.0, 1.0, 101);
    const auto t = linspace(0.0, 2.0, 21);
    const Field u1 = solve_linear_spectral({0.05, 0.0, 1.0}, bc, ic, x, t);
    const Field u2 = solve_linear_spectral({0.15, 0.0, 1.0 + 0.1 * kPi * kPi}, bc, ic, x, t);
    CHECK(divergence_metric(u1, u2) < 1e-12);
}

TEST_CASE("finite-difference solver converges at second order to the spectral solution") {
    const OperatorParams A{0.1, 0.0, 0.5};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0, 0.3};
    ic.bc = bc;
    const auto t = linspace(0.0, 0.5, 6);
    const Reaction lin = Reaction::logistic(0.5, 0.0); // linear reaction c*u

    double err[2];
    int k = 0;
    for (int nx : {101, 201}) {
        const auto x = fd_grid(bc, nx);
        const Field ref = solve_linear_spectral(A, bc, ic, x, t);
        std::vector<double> u0(static_cast<size_t>(nx));
        for (int i = 0; i < nx; ++i)
            u0[static_cast<size_t>(i)] = ref.values(i, 0);
        const Field u = solve_nonlinear_fd(A.d, A.b, lin, bc, u0, t, nx);
        err[k++] = divergence_metric(u, ref);
    }
    CHECK(err[0] < 1e-3);
    const double order = std::log2(err[0] / err[1]);
    CHECK(order > 1.9);
}

TEST_CASE("finite-difference solver handles drift") {
    const OperatorParams A{0.1, 0.4, 0.2};
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0};
    ic.bc = bc;
    const auto t = linspace(0.0, 0.5, 6);
    const Reaction lin = Reaction::logistic(0.2, 0.0);
    const int nx = 201;
    const auto x = fd_grid(bc, nx);
    const Field ref = solve_linear_spectral(A, bc, ic, x, t);
    std::vector<double> u0(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i)
        u0[static_cast<size_t>(i)] = ref.values(i, 0);
    const Field u = solve_nonlinear_fd(A.d, A.b, lin, bc, u0, t, nx);
    CHECK(divergence_metric(u, ref) < 2e-4);
}

TEST_CASE("Neumann finite differences preserve the constant logistic dynamics") {
    // A spatially constant state follows the logistic ODE exactly.
    const auto bc = BoundaryCondition::neumann(1.0);
    const Reaction f = Reaction::logistic(1.5, 3.0);
    const double u_init = 0.1;
    const int nx = 101;
    std::vector<double> u0(static_cast<size_t>(nx), u_init);
    const auto t = linspace(0.0, 2.0, 9);
    const Field u = solve_nonlinear_fd(0.2, 0.0, f, bc, u0, t, nx);
    const double cap = 1.5 / 3.0;
    for (int j = 0; j < 9; ++j) {
        const double tt = t[static_cast<size_t>(j)];
        const double exact = cap / (1.0 + (cap / u_init - 1.0) * std::exp(-1.5 * tt));
        for (int i = 0; i < nx; ++i)
            CHECK(u.values(i, j) == doctest::Approx(exact).epsilon(5e-5));
    }
}

TEST_CASE("periodic finite differences track the spectral solution") {
    const OperatorParams A{0.3, 0.0, 0.1};
    const auto bc = BoundaryCondition::periodic();
    EigenExpansionIC ic;
    ic.coeffs = {0.5, 1.0}; // constant + first cosine/sine pair
    ic.bc = bc;
    const auto t = linspace(0.0, 0.5, 6);
    const int nx = 256;
    const auto x = fd_grid(bc, nx);
    const Field ref = solve_linear_spectral(A, bc, ic, x, t);
    std::vector<double> u0(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i)
        u0[static_cast<size_t>(i)] = ref.values(i, 0);
    const Reaction lin = Reaction::logistic(0.1, 0.0);
    const Field u = solve_nonlinear_fd(A.d, A.b, lin, bc, u0, t, nx);
    CHECK(divergence_metric(u, ref) < 2e-3);
}

TEST_CASE("Robin finite differences track the spectral solution") {
    const OperatorParams A{0.2, 0.0, 0.0};
    const auto bc = BoundaryCondition::robin(1.0, 1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0};
    ic.bc = bc;
    const auto t = linspace(0.0, 0.5, 6);
    const int nx = 201;
    const auto x = fd_grid(bc, nx);
    const Field ref = solve_linear_spectral(A, bc, ic, x, t);
    std::vector<double> u0(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i)
        u0[static_cast<size_t>(i)] = ref.values(i, 0);
    const Reaction lin = Reaction::logistic(0.0, 0.0);
    const Field u = solve_nonlinear_fd(A.d, A.b, lin, bc, u0, t, nx);
    CHECK(divergence_metric(u, ref) < 1e-3);
}

TEST_CASE("blow-up is reported instead of silently returning garbage") {
    const auto bc = BoundaryCondition::neumann(1.0);
    const Reaction f = Reaction::logistic(0.0, -5.0); // f = 5 u^2
    const int nx = 51;
    std::vector<double> u0(static_cast<size_t>(nx), 1.0);
    const auto t = linspace(0.0, 1.0, 3);
    CHECK_THROWS_AS(solve_nonlinear_fd(0.1, 0.0, f, bc, u0, t, nx), BlowUp);
}

TEST_CASE("grid mismatch in the divergence metric is rejected") {
    Field a, b;
    a.x = {0.0, 1.0};
    a.t = {0.0};
    a.values.setZero(2, 1);
    b = a;
    b.x = {0.0, 0.5};
    CHECK_THROWS_AS(divergence_metric(a, b), GridMismatch);
}

TEST_CASE("two-species solver reduces to scalar solves when decoupled") {
    SystemParams p;
    p.d_u = 0.1;
    p.d_v = 0.25;
    p.a11 = 0.4;
    p.a12 = 0.0;
    p.a21 = 0.0;
    p.a22 = -0.2;
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {1.0};
    ic.bc = bc;
    const auto t = linspace(0.0, 0.5, 6);
    const int nx = 201;
    const auto x = fd_grid(bc, nx);
    const Field ref_u = solve_linear_spectral({p.d_u, 0.0, p.a11}, bc, ic, x, t);
    const Field ref_v = solve_linear_spectral({p.d_v, 0.0, p.a22}, bc, ic, x, t);
    std::vector<double> u0(static_cast<size_t>(nx)), v0(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        u0[static_cast<size_t>(i)] = ref_u.values(i, 0);
        v0[static_cast<size_t>(i)] = ref_v.values(i, 0);
    }
    const auto [u, v] = solve_system_fd(p, bc, u0, v0, t, nx);
    CHECK(divergence_metric(u, ref_u) < 1e-3);
    CHECK(divergence_metric(v, ref_v) < 1e-3);
}

TEST_CASE("initial condition validation") {
    const auto bc = BoundaryCondition::dirichlet(1.0);
    EigenExpansionIC ic;
    ic.coeffs = {};
    ic.bc = bc;
    CHECK_THROWS_AS(ic.validate(), InvalidParameter);
}
