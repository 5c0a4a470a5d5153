#ifndef PDEIDENT_OPERATORS_HPP
#define PDEIDENT_OPERATORS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdeident {

/// Parameter point A = (d, b, c) of the elliptic operator
/// L[A] u = d u'' + b u' + c u on an interval or the torus.
struct OperatorParams {
    double d = 0.0; ///< diffusion, length^2/time, >= 0
    double b = 0.0; ///< drift, length/time
    double c = 0.0; ///< low-order rate, 1/time

    /// Throws InvalidParameter unless all fields are finite and d >= 0.
    void validate() const;

    friend bool operator==(const OperatorParams &, const OperatorParams &) = default;
};

OperatorParams operator-(const OperatorParams &a, const OperatorParams &b);

enum class BcKind { Dirichlet, Neumann, Robin, Periodic };

std::string to_string(BcKind kind);

/// Boundary condition fixing the domain of L. Interval kinds live on
/// (0, length); Periodic is the torus of circumference 2*pi.
struct BoundaryCondition {
    BcKind kind = BcKind::Dirichlet;
    double sigma = 0.0;  ///< Robin only, finite and nonzero
    double length = 1.0; ///< interval length; 2*pi for Periodic

    static BoundaryCondition dirichlet(double length = 1.0);
    static BoundaryCondition neumann(double length = 1.0);
    static BoundaryCondition robin(double sigma, double length = 1.0);
    static BoundaryCondition periodic();

    void validate() const;

    friend bool operator==(const BoundaryCondition &, const BoundaryCondition &) = default;
};

/// Closed-form eigenfunction descriptor
///   phi(x) = scale * exp(-beta x) * (a C(mu, x) + b S(mu, x)),
/// where C, S are the normalized solutions of w'' + mu w = 0 with
/// C(0) = 1, C'(0) = 0, S(0) = 0, S'(0) = 1 (trig for mu > 0, hyperbolic
/// for mu < 0, polynomial at mu = 0). This single family covers every
/// eigenfunction produced here: sines, drift-damped sines, cosine
/// mixtures, constants and pure exponentials.
struct EigenfunctionForm {
    double beta = 0.0;
    double mu = 0.0;
    double coef_c = 0.0;
    double coef_s = 0.0;
    double scale = 1.0;

    double value(double x) const;
    double deriv(double x) const;
    double deriv2(double x) const;
};

/// One eigenvalue/eigenfunction pair of -L1[A] = -(d Delta + b grad)
/// under a boundary condition.
struct EigenPair {
    int n = 0;            ///< mode index (>= 0)
    double lambda = 0.0;  ///< eigenvalue, 1/time
    EigenfunctionForm phi;
    std::optional<EigenfunctionForm> phi2; ///< second basis function (Periodic, n >= 1)
    int multiplicity = 1;
    bool positive = false; ///< an everywhere-nonnegative representative exists
    BoundaryCondition bc;
};

/// Dirichlet spectrum, closed form:
///   phi_n = e^{-bx/2d} sin(n pi x / l), lambda_n = b^2/4d + d n^2 pi^2 / l^2.
std::vector<EigenPair> dirichlet_eigenpairs(double d, double b, double length, int n_max);

/// Neumann spectrum. Always contains the constant mode lambda_0 = 0.
/// For d > 0 the remaining eigenvalues come from a bracketed root scan of
/// the characteristic determinant; for d = 0 only the constant survives.
std::vector<EigenPair> neumann_eigenpairs(double d, double b, double length, int n_max);

/// Robin spectrum with endpoint conditions u - sigma u_x = 0 at x = 0 and
/// u + sigma u_x = 0 at x = l. For d = 0 returns the single degenerate
/// pair (e^{-x/sigma}, b/sigma).
std::vector<EigenPair> robin_eigenpairs(double d, double b, double sigma, double length,
                                        int n_max);

/// Periodic spectrum on the torus R/2piZ. Drift-free only: lambda_0 = 0
/// (multiplicity 1) and lambda_n = d n^2 with multiplicity 2.
/// Throws UnsupportedDrift for b != 0 with n_max >= 1.
std::vector<EigenPair> periodic_eigenpairs(double d, double b, int n_max);

/// Dispatch on bc.kind. Robin reads sigma from bc.
std::vector<EigenPair> eigenpairs(double d, double b, const BoundaryCondition &bc, int n_max);

/// Evaluate the (normalized) eigenfunction at the given points.
/// Throws OutOfDomain for x outside [0, l] (or [0, 2pi) on the torus).
std::vector<double> eigenfunction_sample(const EigenPair &pair, std::span<const double> xs);

/// Strong-form residual max_x |-d phi'' - b phi' - lambda phi| evaluated
/// from the closed-form derivatives on a uniform grid.
double eigen_residual(const EigenPair &pair, double d, double b, int n_nodes = 1001);

/// Same residual with phi'' and phi' replaced by second-order central
/// differences on n_nodes uniform nodes (independent of the closed-form
/// derivative expressions).
double eigen_residual_fd(const EigenPair &pair, double d, double b, int n_nodes = 1001);

/// Uniform grid of n nodes over [0, length].
std::vector<double> uniform_grid(double length, int n);

} // namespace pdeident

#endif // PDEIDENT_OPERATORS_HPP
