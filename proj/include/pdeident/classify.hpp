#ifndef PDEIDENT_CLASSIFY_HPP
#define PDEIDENT_CLASSIFY_HPP

#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pdeident {

enum class Verdict {
    DistinguishableR,     ///< auxiliary point lies in R: no nontrivial kernel
    DistinguishableAI,    ///< kernel exists but no simultaneous solution
    IndistinguishableANI, ///< constructed non-identifiable solution exists
};

std::string to_string(Verdict v);

/// Outcome of the pair test for (A1, A2) under a boundary condition.
/// a1/a2 are stored in role-swapped order so that a1.d >= a2.d.
struct PairClassification {
    Verdict verdict = Verdict::DistinguishableR;
    std::optional<EigenPair> witness; ///< auxiliary eigenpair whose eigenvalue matches c
    OperatorParams auxiliary;         ///< A = a1 - a2
    OperatorParams a1, a2;
    std::vector<std::string> notes; ///< machine-readable reason codes
};

/// Classify a pair of parameter points by forming the auxiliary point
/// A = A1 - A2 (roles swapped so d >= 0) and testing c against the
/// spectrum of -L1[A] under bc, then attempting the explicit construction.
PairClassification classify_pair(const OperatorParams &A1, const OperatorParams &A2,
                                 const BoundaryCondition &bc, int n_max = 32);

/// One sample of the indistinguishable surface c = lambda_n(d, b).
struct ASetSample {
    int n = 0;
    double d = 0.0, b = 0.0, c = 0.0;
    bool positive = false;
};

std::vector<ASetSample> indistinguishable_set(const BoundaryCondition &bc, int n_max,
                                              std::span<const double> d_grid,
                                              std::span<const double> b_grid);

/// Closed-form non-identifiable solution u(x,t) = c0 e^{mu t} phi_n(x)
/// solving u_t - L[A1] u = u_t - L[A2] u = 0. On the torus the family is
/// two-dimensional: amplitude scales phi, amplitude2 scales phi2.
struct NonIdentifiableSolution {
    EigenPair mode;
    double growth_rate = 0.0; ///< mu = c_i - lambda_n(d_i, b_i)
    double amplitude = 0.0;
    double amplitude2 = 0.0;
    std::pair<OperatorParams, OperatorParams> params_pair;
    bool positive = false;

    double value(double x, double t) const;
};

NonIdentifiableSolution construct_nonidentifiable(const OperatorParams &A1,
                                                  const OperatorParams &A2,
                                                  const BoundaryCondition &bc, double c0);

/// Max-norm of the residual u_t - L[A] u evaluated by fourth-order central
/// differences on an n_space x n_time grid over [0, l] x [0, t_max].
double nonidentifiable_residual(const NonIdentifiableSolution &sol, const OperatorParams &A,
                                double t_max = 1.0, int n_space = 201, int n_time = 201);

/// Two-species cell-motility parameter set built from a scalar
/// indistinguishable pair; the solution is (kappa_u u1, kappa_v u1).
struct TwoSpeciesConstruction {
    SystemParams params;
    double kappa_u = 1.0, kappa_v = 1.0;
    double delta1 = 1.0, delta2 = 1.0;
    NonIdentifiableSolution scalar;
};

TwoSpeciesConstruction construct_system_nonidentifiable(const OperatorParams &A1,
                                                        const OperatorParams &A2,
                                                        const BoundaryCondition &bc,
                                                        double kappa_u, double kappa_v,
                                                        double delta1, double delta2);

/// Singular commuting perturbation demo for 2x2 linear ODE systems.
struct CommutantPair {
    Eigen::Matrix2d m;  ///< singular member of the commutant of m1
    Eigen::Vector2d x0; ///< unit kernel vector of m
};

/// Validates that m commutes with m1, is singular and nontrivial, extracts
/// a unit kernel vector, and verifies e^{m1 t} x0 = e^{(m1+m) t} x0 on
/// t in [0,2] at 21 points to 1e-9.
CommutantPair ode_commutant_pair(const Eigen::Matrix2d &m1, const Eigen::Matrix2d &m);

/// Commutant member alpha*I + beta*m1 (the generic two-dimensional case).
Eigen::Matrix2d commutant_member(const Eigen::Matrix2d &m1, double alpha, double beta);

/// Trajectory x(t) = e^{m t} x0 sampled at the given times.
std::vector<Eigen::Vector2d> ode_trajectory(const Eigen::Matrix2d &m,
                                            const Eigen::Vector2d &x0,
                                            std::span<const double> ts);

} // namespace pdeident

#endif // PDEIDENT_CLASSIFY_HPP
