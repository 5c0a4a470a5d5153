#ifndef PDEIDENT_ELLIPTIC_HPP
#define PDEIDENT_ELLIPTIC_HPP

#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <string>
#include <vector>

namespace pdeident {

enum class EllipticRegime {
    UniqueSolution,     ///< only the trivial steady state
    DiscreteSolutions,  ///< finitely many nontrivial steady states found
    ContinuousSpectrum, ///< endpoint map vanishes over an interval of shots
};

std::string to_string(EllipticRegime r);

/// One nontrivial steady-state profile of d psi'' + f(x, psi) = 0.
struct EllipticProfile {
    std::vector<double> x;
    std::vector<double> psi;
    double shoot_param = 0.0; ///< refined shooting parameter
};

struct EllipticClassification {
    EllipticRegime regime = EllipticRegime::UniqueSolution;
    std::vector<EllipticProfile> solutions; ///< nontrivial profiles, ascending shoot_param
    std::vector<std::string> notes;
};

/// Count the steady states of d psi'' + f(x, psi) = 0 under bc by a
/// shooting scan: fixed-step RK4 (step length/2000), sign-change bracketing
/// over n_scan cells of shoot_range, bisection refinement. Trajectories
/// exceeding 1e6 carry their sign into the scan; IntegratorBlowUp is raised
/// only if every scan point blows up. RangeTooNarrow is raised when a root
/// sits in the first or last scan cell.
EllipticClassification shoot_count(double d, const Reaction &reaction,
                                   const BoundaryCondition &bc,
                                   std::pair<double, double> shoot_range, int n_scan = 4000);

/// Nonlinear logistic parameter point f(u) = a u - b u^2.
struct NonlinearParams {
    double d = 0.0, a = 0.0, b = 0.0;
    void validate() const;
};

struct NonlinearPairVerdict {
    bool identifiable = false; ///< true when the steady-state sets distinguish the points
    EllipticRegime regime = EllipticRegime::UniqueSolution;
    EllipticClassification difference; ///< classification of the difference problem
    std::vector<std::string> notes;
};

/// Decide whether two logistic parameter points can share a common
/// time-dependent solution: any shared solution of both problems must make
/// w = (d1-d2) u_xx + (a1-a2) u - (b1-b2) u^2 vanish, so the difference
/// coefficients are classified through the steady-state problem.
NonlinearPairVerdict classify_nonlinear_pair(const NonlinearParams &p1,
                                             const NonlinearParams &p2,
                                             const BoundaryCondition &bc,
                                             std::pair<double, double> shoot_range,
                                             int n_scan = 4000);

/// Default symmetric shooting range scaled to the logistic carrying state.
std::pair<double, double> default_shoot_range(const NonlinearParams &p);

/// Max-norm residual of d psi'' + f(x, psi) over interior nodes of the
/// profile grid, re-evaluated by fourth-order central differences.
double elliptic_residual(const EllipticProfile &profile, double d, const Reaction &reaction);

} // namespace pdeident

#endif // PDEIDENT_ELLIPTIC_HPP
