#include "pdeident/classify.hpp"

#include "pdeident/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdeident {

namespace {

constexpr double kMatchRelTol = 1e-9;
constexpr double kRatioTol = 1e-12;

bool eigenvalue_match(double c, double lambda) {
    return std::abs(c - lambda) <= kMatchRelTol * std::max(1.0, std::abs(lambda));
}

/// True when b1/d1 == b2/d2 in cross-multiplied form (covers zero cases).
bool drift_ratio_ok(const OperatorParams &p1, const OperatorParams &p2) {
    const double lhs = p1.d * p2.b;
    const double rhs = p2.d * p1.b;
    return std::abs(lhs - rhs) <= kRatioTol * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

double closed_form_lambda(double d, double b, double length, int n) {
    const double w = static_cast<double>(n) * std::numbers::pi / length;
    return b * b / (4.0 * d) + d * w * w;
}

/// Eigenvalue of mode n of -L1[(d,b)] under bc, for a parameter point that
/// shares the witness mode shape (same b/d ratio as the auxiliary point).
double operator_mode_lambda(const OperatorParams &p, const BoundaryCondition &bc, int n) {
    if (n == 0)
        return 0.0; // constant mode
    if (p.d == 0.0)
        return 0.0; // ratio forces b == 0 as well; operator is multiplication only
    switch (bc.kind) {
    case BcKind::Dirichlet:
    case BcKind::Neumann:
        return closed_form_lambda(p.d, p.b, bc.length, n);
    case BcKind::Robin:
        return robin_eigenpairs(p.d, p.b, bc.sigma, bc.length, n).back().lambda;
    case BcKind::Periodic:
        return p.d * static_cast<double>(n) * static_cast<double>(n);
    }
    throw InvalidParameter("unknown boundary condition kind");
}

/// Growth rate mu_i = c_i - lambda_n(d_i, b_i) for parameter point i, with
/// the degenerate Robin mode handled by its explicit formula.
double growth_rate_for(const OperatorParams &p, const BoundaryCondition &bc,
                       const EigenPair &witness) {
    if (bc.kind == BcKind::Robin && witness.n == 0)
        return p.d / (bc.sigma * bc.sigma) - p.b / bc.sigma + p.c;
    if (witness.n == 0)
        return p.c; // constant mode, lambda = 0
    return p.c - operator_mode_lambda(p, bc, witness.n);
}

} // namespace

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::DistinguishableR: return "distinguishable-R";
    case Verdict::DistinguishableAI: return "distinguishable-AI";
    case Verdict::IndistinguishableANI: return "indistinguishable-ANI";
    }
    return "unknown";
}

PairClassification classify_pair(const OperatorParams &A1, const OperatorParams &A2,
                                 const BoundaryCondition &bc, int n_max) {
    A1.validate();
    A2.validate();
    bc.validate();
    if (n_max < 1)
        throw InvalidParameter("n_max must be >= 1");
    if (A1.d == A2.d && A1.b == A2.b && A1.c == A2.c)
        throw SamePoint("parameter points coincide");

    PairClassification res;
    res.a1 = A1;
    res.a2 = A2;
    if (res.a1.d < res.a2.d)
        std::swap(res.a1, res.a2); // auxiliary point then has d >= 0
    const OperatorParams aux = res.a1 - res.a2;
    res.auxiliary = aux;

    // Step 1: locate a mode of the auxiliary operator with c = lambda_n.
    std::optional<EigenPair> witness;
    switch (bc.kind) {
    case BcKind::Dirichlet: {
        if (aux.d == 0.0) {
            res.notes.push_back("no-kernel:degenerate-zero-diffusion");
            break;
        }
        for (int n = 1; n <= n_max; ++n) {
            const double lam = closed_form_lambda(aux.d, aux.b, bc.length, n);
            if (eigenvalue_match(aux.c, lam)) {
                witness = dirichlet_eigenpairs(aux.d, aux.b, bc.length, n).back();
                break;
            }
        }
        if (!witness && aux.c > closed_form_lambda(aux.d, aux.b, bc.length, n_max))
            res.notes.push_back("search-depth-exceeded");
        break;
    }
    case BcKind::Neumann: {
        if (eigenvalue_match(aux.c, 0.0)) {
            witness = neumann_eigenpairs(aux.d, aux.b, bc.length, 1).front();
            res.notes.push_back("constant-mode");
            break;
        }
        if (aux.d == 0.0) {
            res.notes.push_back("no-kernel:degenerate-zero-diffusion");
            break;
        }
        for (int n = 1; n <= n_max; ++n) {
            const double lam = closed_form_lambda(aux.d, aux.b, bc.length, n);
            if (eigenvalue_match(aux.c, lam)) {
                witness = neumann_eigenpairs(aux.d, aux.b, bc.length, n + 1).back();
                break;
            }
        }
        if (!witness && aux.c > closed_form_lambda(aux.d, aux.b, bc.length, n_max))
            res.notes.push_back("search-depth-exceeded");
        break;
    }
    case BcKind::Robin: {
        if (aux.d == 0.0) {
            if (aux.b == 0.0) {
                res.notes.push_back("no-kernel:degenerate-zero-diffusion");
                break;
            }
            const double lam0 = aux.b / bc.sigma;
            if (eigenvalue_match(aux.c, lam0)) {
                witness = robin_eigenpairs(0.0, aux.b, bc.sigma, bc.length, 1).front();
                res.notes.push_back("degenerate-robin-mode");
            }
            break;
        }
        const auto pairs = robin_eigenpairs(aux.d, aux.b, bc.sigma, bc.length, n_max);
        for (const auto &p : pairs) {
            if (eigenvalue_match(aux.c, p.lambda)) {
                witness = p;
                break;
            }
        }
        if (!witness && !pairs.empty() && aux.c > pairs.back().lambda)
            res.notes.push_back("search-depth-exceeded");
        break;
    }
    case BcKind::Periodic: {
        if (eigenvalue_match(aux.c, 0.0)) {
            witness = periodic_eigenpairs(aux.d, 0.0, 0).front();
            res.notes.push_back("constant-mode");
            break;
        }
        if (aux.b != 0.0) {
            // Characteristic roots have nonzero real part, so no periodic kernel.
            res.notes.push_back("no-kernel:periodic-drift");
            break;
        }
        if (aux.d == 0.0) {
            res.notes.push_back("no-kernel:degenerate-zero-diffusion");
            break;
        }
        for (int n = 1; n <= n_max; ++n) {
            const double lam = aux.d * static_cast<double>(n) * static_cast<double>(n);
            if (eigenvalue_match(aux.c, lam)) {
                witness = periodic_eigenpairs(aux.d, 0.0, n).back();
                break;
            }
        }
        if (!witness && aux.c > aux.d * static_cast<double>(n_max) * static_cast<double>(n_max))
            res.notes.push_back("search-depth-exceeded");
        break;
    }
    }

    if (!witness) {
        res.verdict = Verdict::DistinguishableR;
        return res;
    }
    res.witness = witness;
    res.notes.push_back("matched-mode:n=" + std::to_string(witness->n));

    // Step 2: the matched mode yields a simultaneous solution only when
    // both points share the witness's drift-to-diffusion ratio (always true
    // for the constant and degenerate Robin modes, whose shape is fixed).
    const bool constructible = (witness->n == 0) || drift_ratio_ok(res.a1, res.a2);
    if (!constructible) {
        res.verdict = Verdict::DistinguishableAI;
        res.notes.push_back("drift-ratio-violated");
        return res;
    }
    const double mu1 = growth_rate_for(res.a1, bc, *witness);
    const double mu2 = growth_rate_for(res.a2, bc, *witness);
    const double scale = std::max({1.0, std::abs(res.a1.c), std::abs(res.a2.c),
                                   std::abs(mu1), std::abs(mu2)});
    if (std::abs(mu1 - mu2) > 1e-8 * scale) {
        res.verdict = Verdict::DistinguishableAI;
        res.notes.push_back("growth-rate-mismatch");
        return res;
    }
    res.verdict = Verdict::IndistinguishableANI;
    return res;
}

std::vector<ASetSample> indistinguishable_set(const BoundaryCondition &bc, int n_max,
                                              std::span<const double> d_grid,
                                              std::span<const double> b_grid) {
    bc.validate();
    if (n_max < 0)
        throw InvalidParameter("n_max must be >= 0");
    for (double d : d_grid)
        if (!(d >= 0.0))
            throw InvalidParameter("d grid entries must be >= 0");

    std::vector<ASetSample> out;
    const auto push = [&out](int n, double d, double b, double c, bool positive) {
        out.push_back({n, d, b, c, positive});
    };

    switch (bc.kind) {
    case BcKind::Dirichlet:
        for (int n = 1; n <= n_max; ++n)
            for (double d : d_grid)
                for (double b : b_grid) {
                    if (d == 0.0)
                        continue; // no Dirichlet kernel without diffusion
                    push(n, d, b, closed_form_lambda(d, b, bc.length, n), n == 1);
                }
        break;
    case BcKind::Neumann:
        for (int n = 0; n <= n_max; ++n)
            for (double d : d_grid)
                for (double b : b_grid) {
                    if (n == 0) {
                        push(0, d, b, 0.0, true);
                        continue;
                    }
                    if (d == 0.0)
                        continue;
                    push(n, d, b, closed_form_lambda(d, b, bc.length, n), false);
                }
        break;
    case BcKind::Robin:
        for (double d : d_grid)
            for (double b : b_grid) {
                if (d == 0.0) {
                    if (b != 0.0)
                        push(0, 0.0, b, b / bc.sigma, true);
                    continue;
                }
                const auto pairs = robin_eigenpairs(d, b, bc.sigma, bc.length, n_max);
                for (const auto &p : pairs)
                    push(p.n, d, b, p.lambda, p.positive);
            }
        break;
    case BcKind::Periodic:
        for (int n = 0; n <= n_max; ++n)
            for (double d : d_grid)
                for (double b : b_grid) {
                    if (b != 0.0)
                        continue; // no periodic kernel with drift
                    if (n == 0) {
                        push(0, d, 0.0, 0.0, true);
                        continue;
                    }
                    if (d == 0.0)
                        continue;
                    push(n, d, 0.0, d * static_cast<double>(n) * static_cast<double>(n), false);
                }
        break;
    }
    return out;
}

double NonIdentifiableSolution::value(double x, double t) const {
    const double g = std::exp(growth_rate * t);
    double v = amplitude * mode.phi.value(x);
    if (amplitude2 != 0.0 && mode.phi2)
        v += amplitude2 * mode.phi2->value(x);
    return g * v;
}

NonIdentifiableSolution construct_nonidentifiable(const OperatorParams &A1,
                                                  const OperatorParams &A2,
                                                  const BoundaryCondition &bc, double c0) {
    if (c0 == 0.0 || !std::isfinite(c0))
        throw InvalidScale("amplitude c0 must be finite and nonzero");
    const PairClassification cls = classify_pair(A1, A2, bc);
    if (cls.verdict != Verdict::IndistinguishableANI)
        throw NotConstructible("pair classified as " + to_string(cls.verdict));

    NonIdentifiableSolution sol;
    sol.mode = *cls.witness;
    sol.growth_rate = growth_rate_for(cls.a1, bc, sol.mode);
    sol.amplitude = c0;
    sol.amplitude2 = (sol.mode.multiplicity == 2 && sol.mode.phi2) ? 0.5 * c0 : 0.0;
    sol.params_pair = {cls.a1, cls.a2};
    sol.positive = sol.mode.positive && c0 > 0.0 && sol.amplitude2 == 0.0;
    return sol;
}

double nonidentifiable_residual(const NonIdentifiableSolution &sol, const OperatorParams &A,
                                double t_max, int n_space, int n_time) {
    if (n_space < 5 || n_time < 5 || !(t_max > 0.0))
        throw InvalidParameter("residual grid must have >= 5 nodes and t_max > 0");
    const double length = sol.mode.bc.length;
    const double h = length / static_cast<double>(n_space - 1);
    const double k = t_max / static_cast<double>(n_time - 1);

    Eigen::MatrixXd u(n_space, n_time);
    for (int i = 0; i < n_space; ++i)
        for (int j = 0; j < n_time; ++j)
            u(i, j) = sol.value(i * h, j * k);

    const double umax = std::max(1.0, u.cwiseAbs().maxCoeff());
    double worst = 0.0;
    // Fourth-order central differences on interior nodes.
    for (int i = 2; i < n_space - 2; ++i) {
        for (int j = 2; j < n_time - 2; ++j) {
            const double ut = (-u(i, j + 2) + 8.0 * u(i, j + 1) - 8.0 * u(i, j - 1) + u(i, j - 2)) /
                              (12.0 * k);
            const double ux = (-u(i + 2, j) + 8.0 * u(i + 1, j) - 8.0 * u(i - 1, j) + u(i - 2, j)) /
                              (12.0 * h);
            const double uxx = (-u(i + 2, j) + 16.0 * u(i + 1, j) - 30.0 * u(i, j) +
                                16.0 * u(i - 1, j) - u(i - 2, j)) /
                               (12.0 * h * h);
            const double r = ut - A.d * uxx - A.b * ux - A.c * u(i, j);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst / umax;
}

TwoSpeciesConstruction construct_system_nonidentifiable(const OperatorParams &A1,
                                                        const OperatorParams &A2,
                                                        const BoundaryCondition &bc,
                                                        double kappa_u, double kappa_v,
                                                        double delta1, double delta2) {
    if (kappa_u == 0.0 || kappa_v == 0.0 || !std::isfinite(kappa_u) || !std::isfinite(kappa_v))
        throw InvalidScale("component scales must be finite and nonzero");
    if (!std::isfinite(delta1) || !std::isfinite(delta2))
        throw InvalidParameter("coupling shifts must be finite");
    if (A1.b != 0.0 || A2.b != 0.0)
        throw UnsupportedDrift("two-species construction requires zero drift");

    TwoSpeciesConstruction out;
    out.scalar = construct_nonidentifiable(A1, A2, bc, 1.0);
    const OperatorParams p1 = out.scalar.params_pair.first;
    const OperatorParams p2 = out.scalar.params_pair.second;
    out.kappa_u = kappa_u;
    out.kappa_v = kappa_v;
    out.delta1 = delta1;
    out.delta2 = delta2;
    out.params.d_u = p1.d;
    out.params.d_v = p2.d;
    out.params.a11 = p1.c + delta1;
    out.params.a12 = delta1 * kappa_u / kappa_v;
    out.params.a21 = delta2 * kappa_v / kappa_u;
    out.params.a22 = p2.c + delta2;
    return out;
}

Eigen::Matrix2d commutant_member(const Eigen::Matrix2d &m1, double alpha, double beta) {
    return alpha * Eigen::Matrix2d::Identity() + beta * m1;
}

std::vector<Eigen::Vector2d> ode_trajectory(const Eigen::Matrix2d &m,
                                            const Eigen::Vector2d &x0,
                                            std::span<const double> ts) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(ts.size());
    for (double t : ts) {
        const Eigen::Matrix2d e = (t * m).exp();
        out.push_back(e * x0);
    }
    return out;
}

CommutantPair ode_commutant_pair(const Eigen::Matrix2d &m1, const Eigen::Matrix2d &m) {
    const double scale = std::max({1.0, m1.cwiseAbs().maxCoeff(), m.cwiseAbs().maxCoeff()});
    const Eigen::Matrix2d comm = m1 * m - m * m1;
    if (comm.cwiseAbs().maxCoeff() > 1e-10 * scale * scale)
        throw NonCommuting("perturbation does not commute with the base matrix");
    if (m.cwiseAbs().maxCoeff() <= 1e-14 * scale)
        throw NonSingular("perturbation is the zero matrix");
    if (std::abs(m.determinant()) > 1e-12 * scale * scale)
        throw NonSingular("perturbation is not singular");

    Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullV);
    CommutantPair out;
    out.m = m;
    out.x0 = svd.matrixV().col(1).normalized();

    // The kernel vector must see identical dynamics under m1 and m1 + m.
    const Eigen::Matrix2d m2 = m1 + m;
    for (int i = 0; i <= 20; ++i) {
        const double t = 0.1 * static_cast<double>(i);
        const Eigen::Vector2d a = ((t * m1).exp() * out.x0).eval();
        const Eigen::Vector2d b = ((t * m2).exp() * out.x0).eval();
        if ((a - b).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()))
            throw NonCommuting("trajectories through the kernel vector disagree");
    }
    return out;
}

} // namespace pdeident
