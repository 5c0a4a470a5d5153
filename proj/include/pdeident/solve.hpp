#ifndef PDEIDENT_SOLVE_HPP
#define PDEIDENT_SOLVE_HPP

#include "pdeident/operators.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace pdeident {

/// Initial condition expressed in the eigenbasis of the forward operator
/// under a fixed boundary condition: u0 = sum_n C_n phi_n.
struct EigenExpansionIC {
    std::vector<double> coeffs; ///< C_1..C_N (first entry = lowest mode)
    BoundaryCondition bc;

    void validate() const;
};

/// A space-time field u(x_i, t_j).
struct Field {
    std::vector<double> x;
    std::vector<double> t;
    Eigen::MatrixXd values; ///< values(i, j) = u(x_i, t_j)
    std::string meta;
};

/// Quadratic reaction f(x, u) = a(x) u - b u^2 with a(x) either the
/// constant `a` or the heterogeneous profile `m`.
struct Reaction {
    double a = 0.0;
    double b = 0.0;
    std::function<double(double)> m; ///< optional spatially varying growth

    double growth(double x) const { return m ? m(x) : a; }
    double f(double x, double u) const { return growth(x) * u - b * u * u; }
    double dfdu(double x, double u) const { return growth(x) - 2.0 * b * u; }

    static Reaction logistic(double a, double b) { return Reaction{a, b, nullptr}; }
    static Reaction hetero_logistic(std::function<double(double)> m, double b);
};

/// Parameters of the linear two-species cell-motility system
///   u_t - d_u u_xx =  a11 u - a12 v
///   v_t - d_v v_xx = -a21 u + a22 v.
struct SystemParams {
    double d_u = 0.0, d_v = 0.0;
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
};

/// Exact spectral solution u(x,t) = sum_n C_n e^{(c - lambda_n(d,b)) t} phi_n(x)
/// where lambda_n are the eigenvalues of -L1[A] under bc. No time-stepping
/// error; exact to machine precision at every node.
Field solve_linear_spectral(const OperatorParams &A, const BoundaryCondition &bc,
                            const EigenExpansionIC &ic, std::span<const double> x_grid,
                            std::span<const double> t_grid);

/// Second-order finite differences in space, Strang-split Crank-Nicolson in
/// time (implicit diffusion/drift via tridiagonal solves, explicit reaction).
/// u0 holds nx samples on the uniform grid of the bc domain.
Field solve_nonlinear_fd(double d, double b_drift, const Reaction &reaction,
                         const BoundaryCondition &bc, std::span<const double> u0,
                         std::span<const double> t_grid, int nx);

/// Coupled linear system, implicit diffusion per component, explicit coupling.
std::pair<Field, Field> solve_system_fd(const SystemParams &params,
                                        const BoundaryCondition &bc,
                                        std::span<const double> u0,
                                        std::span<const double> v0,
                                        std::span<const double> t_grid, int nx);

/// max over grid nodes of |f1 - f2|; throws GridMismatch on different grids.
double divergence_metric(const Field &f1, const Field &f2);

/// Uniform spatial grid of the bc domain: nx nodes over [0, l] for interval
/// conditions, nx nodes over [0, 2pi) for the torus.
std::vector<double> fd_grid(const BoundaryCondition &bc, int nx);

} // namespace pdeident

#endif // PDEIDENT_SOLVE_HPP
