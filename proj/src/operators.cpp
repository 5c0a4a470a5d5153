#include "pdeident/operators.hpp"
#include "pdeident/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdeident {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Normalized fundamental solutions of w'' + mu w = 0:
//   C(mu, 0) = 1, C'(mu, 0) = 0;  S(mu, 0) = 0, S'(mu, 0) = 1.
// Entire in mu, so characteristic determinants built from them are smooth
// across the oscillatory/hyperbolic transition mu = 0.
double fund_c(double mu, double x) {
    if (mu > 1e-12) return std::cos(std::sqrt(mu) * x);
    if (mu < -1e-12) return std::cosh(std::sqrt(-mu) * x);
    const double z = mu * x * x;
    return 1.0 - z / 2.0 + z * z / 24.0;
}

double fund_s(double mu, double x) {
    if (mu > 1e-12) {
        const double k = std::sqrt(mu);
        return std::sin(k * x) / k;
    }
    if (mu < -1e-12) {
        const double k = std::sqrt(-mu);
        return std::sinh(k * x) / k;
    }
    const double z = mu * x * x;
    return x * (1.0 - z / 6.0 + z * z / 120.0);
}

} // namespace

void OperatorParams::validate() const {
    if (!std::isfinite(d) || !std::isfinite(b) || !std::isfinite(c))
        throw InvalidParameter("operator parameters must be finite");
    if (d < 0.0) throw InvalidParameter("diffusion coefficient must be nonnegative");
}

OperatorParams operator-(const OperatorParams &a, const OperatorParams &b) {
    return {a.d - b.d, a.b - b.b, a.c - b.c};
}

std::string to_string(BcKind kind) {
    switch (kind) {
        case BcKind::Dirichlet: return "dirichlet";
        case BcKind::Neumann: return "neumann";
        case BcKind::Robin: return "robin";
        case BcKind::Periodic: return "periodic";
    }
    return "unknown";
}

BoundaryCondition BoundaryCondition::dirichlet(double length) {
    BoundaryCondition bc{BcKind::Dirichlet, 0.0, length};
    bc.validate();
    return bc;
}
BoundaryCondition BoundaryCondition::neumann(double length) {
    BoundaryCondition bc{BcKind::Neumann, 0.0, length};
    bc.validate();
    return bc;
}
BoundaryCondition BoundaryCondition::robin(double sigma, double length) {
    BoundaryCondition bc{BcKind::Robin, sigma, length};
    bc.validate();
    return bc;
}
BoundaryCondition BoundaryCondition::periodic() {
    return BoundaryCondition{BcKind::Periodic, 0.0, 2.0 * kPi};
}

void BoundaryCondition::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidDomain("domain length must be positive and finite");
    if (kind == BcKind::Robin) {
        if (!std::isfinite(sigma) || sigma == 0.0)
            throw InvalidSigma("Robin sigma must be finite and nonzero; use the Dirichlet "
                               "kind for sigma = 0");
    }
    if (kind == BcKind::Periodic && std::abs(length - 2.0 * kPi) > 1e-12)
        throw InvalidDomain("periodic domain is fixed to circumference 2*pi");
}

double EigenfunctionForm::value(double x) const {
    const double w = coef_c * fund_c(mu, x) + coef_s * fund_s(mu, x);
    return scale * std::exp(-beta * x) * w;
}

double EigenfunctionForm::deriv(double x) const {
    const double w = coef_c * fund_c(mu, x) + coef_s * fund_s(mu, x);
    const double wp = -coef_c * mu * fund_s(mu, x) + coef_s * fund_c(mu, x);
    return scale * std::exp(-beta * x) * (wp - beta * w);
}

double EigenfunctionForm::deriv2(double x) const {
    const double w = coef_c * fund_c(mu, x) + coef_s * fund_s(mu, x);
    const double wp = -coef_c * mu * fund_s(mu, x) + coef_s * fund_c(mu, x);
    return scale * std::exp(-beta * x) * ((beta * beta - mu) * w - 2.0 * beta * wp);
}

std::vector<double> uniform_grid(double length, int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = length * i / (n - 1);
    return xs;
}

namespace {

// Unnormalized |phi| on [x_lo, x_hi], refined by ternary search.
double refine_abs_max(const EigenfunctionForm &f, double x_lo, double x_hi) {
    double a = x_lo, b = x_hi;
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (std::abs(f.value(m1)) < std::abs(f.value(m2)))
            a = m1;
        else
            b = m2;
    }
    return std::abs(f.value(0.5 * (a + b)));
}

// Fix the convention max|phi| = 1 with phi > 0 at its first extremum.
void normalize(EigenfunctionForm &f, double length) {
    constexpr int kNodes = 2001;
    double vmax = 0.0;
    int argmax = 0;
    std::vector<double> vals(kNodes);
    for (int i = 0; i < kNodes; ++i) {
        const double x = length * i / (kNodes - 1);
        vals[static_cast<std::size_t>(i)] = f.value(x);
        const double a = std::abs(vals[static_cast<std::size_t>(i)]);
        if (a > vmax) {
            vmax = a;
            argmax = i;
        }
    }
    if (vmax == 0.0) throw InvalidParameter("cannot normalize a vanishing eigenfunction");

    const double h = length / (kNodes - 1);
    const double lo = std::max(0.0, (argmax - 1) * h);
    const double hi = std::min(length, (argmax + 1) * h);
    const double peak = std::max(vmax, refine_abs_max(f, lo, hi));

    // First extremum of |phi| (endpoints included); ties to the left.
    int first = argmax;
    for (int i = 0; i < kNodes; ++i) {
        const double a = std::abs(vals[static_cast<std::size_t>(i)]);
        if (a < 1e-3 * vmax) continue;
        const double left = (i > 0) ? std::abs(vals[static_cast<std::size_t>(i - 1)]) : 0.0;
        const double right =
            (i + 1 < kNodes) ? std::abs(vals[static_cast<std::size_t>(i + 1)]) : 0.0;
        if (a >= left && a >= right) {
            first = i;
            break;
        }
    }
    const double sign = (vals[static_cast<std::size_t>(first)] < 0.0) ? -1.0 : 1.0;
    f.scale *= sign / peak;
}

bool is_nonnegative(const EigenfunctionForm &f, double length) {
    constexpr int kNodes = 2001;
    for (int i = 0; i < kNodes; ++i) {
        const double x = length * i / (kNodes - 1);
        if (f.value(x) < -1e-9) return false;
    }
    return true;
}

EigenPair make_pair(int n, double lambda, EigenfunctionForm phi, const BoundaryCondition &bc) {
    normalize(phi, bc.length);
    EigenPair p;
    p.n = n;
    p.lambda = lambda;
    p.phi = phi;
    p.multiplicity = 1;
    p.positive = is_nonnegative(phi, bc.length);
    p.bc = bc;
    return p;
}

// Characteristic determinant of the Neumann problem for -d phi'' - b phi' =
// lambda phi on (0, l): after phi = e^{-beta x} w, the two flux conditions
// reduce to (lambda / d) * S(mu, l) with mu = lambda/d - beta^2.
double neumann_det(double lambda, double d, double beta, double length) {
    const double mu = lambda / d - beta * beta;
    return (mu + beta * beta) * fund_s(mu, length);
}

// Robin determinant for u - sigma u_x = 0 at x = 0, u + sigma u_x = 0 at l:
//   (1 - sigma^2 beta^2 - sigma^2 mu) S(mu, l) + 2 sigma C(mu, l).
double robin_det(double lambda, double d, double beta, double sigma, double length) {
    const double mu = lambda / d - beta * beta;
    return (1.0 - sigma * sigma * (beta * beta + mu)) * fund_s(mu, length) +
           2.0 * sigma * fund_c(mu, length);
}

// Sign-change scan over (lambda_lo, lambda_lo + span] followed by bisection
// to relative width 1e-12. Eigenvalues of these 1D problems are simple, so
// bracketing at this density (1e4 cells per span unit) is complete for
// n_max <= 32.
template <typename F>
std::vector<double> scan_roots(F &&f, double lambda_lo, double span, int n_want) {
    const int base_cells = 10000;
    const int cells = base_cells;
    std::vector<double> roots;
    double prev_x = lambda_lo;
    double prev_f = f(prev_x);
    for (int i = 1; i <= cells && static_cast<int>(roots.size()) < n_want; ++i) {
        const double x = lambda_lo + span * i / cells;
        const double fx = f(x);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if (fx == 0.0) {
            roots.push_back(x);
        } else if ((prev_f < 0.0) != (fx < 0.0)) {
            double a = prev_x, b = x, fa = prev_f;
            while ((b - a) > 1e-12 * std::max(1.0, std::abs(b))) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fa < 0.0) != (fm < 0.0))
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

} // namespace

std::vector<EigenPair> dirichlet_eigenpairs(double d, double b, double length, int n_max) {
    if (d == 0.0)
        throw DegenerateOperator("Dirichlet with d = 0 admits no nontrivial kernel "
                                 "unless b = c = 0");
    if (d < 0.0) throw InvalidParameter("diffusion coefficient must be nonnegative");
    if (!(length > 0.0)) throw InvalidDomain("domain length must be positive");
    if (n_max < 1) throw InvalidParameter("n_max must be >= 1");

    const auto bc = BoundaryCondition::dirichlet(length);
    const double beta = b / (2.0 * d);
    std::vector<EigenPair> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double k = n * kPi / length;
        const double lambda = b * b / (4.0 * d) + d * k * k;
        EigenfunctionForm phi{beta, k * k, 0.0, 1.0, 1.0};
        out.push_back(make_pair(n, lambda, phi, bc));
    }
    return out;
}

std::vector<EigenPair> neumann_eigenpairs(double d, double b, double length, int n_max) {
    if (!(length > 0.0)) throw InvalidDomain("domain length must be positive");
    if (d < 0.0) throw InvalidParameter("diffusion coefficient must be nonnegative");
    if (n_max < 1) throw InvalidParameter("n_max must be >= 1");

    const auto bc = BoundaryCondition::neumann(length);
    std::vector<EigenPair> out;
    out.push_back(make_pair(0, 0.0, EigenfunctionForm{0.0, 0.0, 1.0, 0.0, 1.0}, bc));
    if (d == 0.0 || n_max == 1) return out; // constant mode only

    const double beta = b / (2.0 * d);
    const int n_scan = n_max - 1;
    const double span = 4.0 * d * (n_scan + 2) * (n_scan + 2) * kPi * kPi / (length * length) +
                        b * b / (4.0 * d);
    const double lambda_lo = span * 1e-9; // exclude the known root at lambda = 0
    auto roots = scan_roots([&](double lam) { return neumann_det(lam, d, beta, length); },
                            lambda_lo, span, n_scan);
    if (static_cast<int>(roots.size()) < n_scan)
        throw RootScanExhausted("Neumann root scan found too few eigenvalues in window");
    for (int i = 0; i < n_scan; ++i) {
        const double lambda = roots[static_cast<std::size_t>(i)];
        const double mu = lambda / d - beta * beta;
        // First flux condition: w'(0) - beta w(0) = 0 => (A, B) = (1, beta).
        EigenfunctionForm phi{beta, mu, 1.0, beta, 1.0};
        out.push_back(make_pair(i + 1, lambda, phi, bc));
    }
    return out;
}

std::vector<EigenPair> robin_eigenpairs(double d, double b, double sigma, double length,
                                        int n_max) {
    const auto bc = BoundaryCondition::robin(sigma, length);
    if (d < 0.0) throw InvalidParameter("diffusion coefficient must be nonnegative");
    if (n_max < 1) throw InvalidParameter("n_max must be >= 1");

    std::vector<EigenPair> out;
    if (d == 0.0) {
        // Degenerate pair (e^{-x/sigma}, b/sigma), taken as stated.
        EigenfunctionForm phi{1.0 / sigma, 0.0, 1.0, 0.0, 1.0};
        out.push_back(make_pair(0, b / sigma, phi, bc));
        return out;
    }

    const double beta = b / (2.0 * d);
    const double span = 4.0 * d * (n_max + 2) * (n_max + 2) * kPi * kPi / (length * length) +
                        b * b / (4.0 * d);
    // Negative boundary-layer modes exist for sigma < 0; open the window
    // below zero far enough to capture them.
    const double lambda_lo =
        (sigma < 0.0) ? -(8.0 * d * (beta * beta + 1.0 / (sigma * sigma)) + 1.0) : span * 1e-9;
    auto roots = scan_roots([&](double lam) { return robin_det(lam, d, beta, sigma, length); },
                            lambda_lo, span - lambda_lo, n_max);
    if (static_cast<int>(roots.size()) < n_max)
        throw RootScanExhausted("Robin root scan found too few eigenvalues in window");
    for (int i = 0; i < n_max; ++i) {
        const double lambda = roots[static_cast<std::size_t>(i)];
        const double mu = lambda / d - beta * beta;
        // Left condition (1 + sigma beta) A - sigma B = 0 => (A, B) = (sigma, 1 + sigma beta).
        EigenfunctionForm phi{beta, mu, sigma, 1.0 + sigma * beta, 1.0};
        out.push_back(make_pair(i + 1, lambda, phi, bc));
    }
    return out;
}

std::vector<EigenPair> periodic_eigenpairs(double d, double b, int n_max) {
    if (!(d > 0.0)) throw InvalidParameter("periodic spectrum requires d > 0");
    if (n_max < 0) throw InvalidParameter("n_max must be >= 0");
    const auto bc = BoundaryCondition::periodic();

    std::vector<EigenPair> out;
    out.push_back(make_pair(0, 0.0, EigenfunctionForm{0.0, 0.0, 1.0, 0.0, 1.0}, bc));
    if (n_max == 0) return out;
    if (b != 0.0)
        throw UnsupportedDrift("periodic eigenpairs with drift are not supported beyond "
                               "the constant mode");
    for (int n = 1; n <= n_max; ++n) {
        const double mu = static_cast<double>(n) * n;
        EigenPair p = make_pair(n, d * mu, EigenfunctionForm{0.0, mu, 1.0, 0.0, 1.0}, bc);
        EigenfunctionForm phi2{0.0, mu, 0.0, 1.0, 1.0};
        normalize(phi2, bc.length);
        p.phi2 = phi2;
        p.multiplicity = 2;
        out.push_back(p);
    }
    return out;
}

std::vector<EigenPair> eigenpairs(double d, double b, const BoundaryCondition &bc, int n_max) {
    bc.validate();
    switch (bc.kind) {
        case BcKind::Dirichlet: return dirichlet_eigenpairs(d, b, bc.length, n_max);
        case BcKind::Neumann: return neumann_eigenpairs(d, b, bc.length, n_max);
        case BcKind::Robin: return robin_eigenpairs(d, b, bc.sigma, bc.length, n_max);
        case BcKind::Periodic: return periodic_eigenpairs(d, b, n_max);
    }
    throw InvalidParameter("unknown boundary condition kind");
}

std::vector<double> eigenfunction_sample(const EigenPair &pair, std::span<const double> xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    const double length = pair.bc.length;
    for (double x : xs) {
        if (x < -1e-14 || x > length * (1.0 + 1e-14))
            throw OutOfDomain("sample point outside the operator domain");
        out.push_back(pair.phi.value(x));
    }
    return out;
}

double eigen_residual(const EigenPair &pair, double d, double b, int n_nodes) {
    double worst = 0.0;
    const double length = pair.bc.length;
    for (int i = 0; i < n_nodes; ++i) {
        const double x = length * i / (n_nodes - 1);
        const double r =
            -d * pair.phi.deriv2(x) - b * pair.phi.deriv(x) - pair.lambda * pair.phi.value(x);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double eigen_residual_fd(const EigenPair &pair, double d, double b, int n_nodes) {
    const double length = pair.bc.length;
    const double h = length / (n_nodes - 1);
    double worst = 0.0;
    for (int i = 1; i + 1 < n_nodes; ++i) {
        const double x = i * h;
        const double um = pair.phi.value(x - h);
        const double u0 = pair.phi.value(x);
        const double up = pair.phi.value(x + h);
        const double d2 = (up - 2.0 * u0 + um) / (h * h);
        const double d1 = (up - um) / (2.0 * h);
        worst = std::max(worst, std::abs(-d * d2 - b * d1 - pair.lambda * u0));
    }
    return worst;
}

} // namespace pdeident
