#include "pdeident/elliptic.hpp"

#include "pdeident/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdeident {

namespace {

constexpr double kBlowup = 1e6;
constexpr double kSentinel = 1e12;
constexpr double kZeroBand = 1e-10;
constexpr int kSteps = 2000;

struct Shot {
    double endpoint = 0.0;   ///< boundary defect at x = length (sentinel if blown)
    bool blown = false;
    double max_abs = 0.0;    ///< max |psi| along the trajectory
    std::vector<double> psi; ///< kSteps + 1 samples (only kept when requested)
};

struct ShotProblem {
    double d;
    const Reaction *reaction;
    const BoundaryCondition *bc;
};

void rhs(const ShotProblem &prob, double x, double psi, double dpsi, double &f1, double &f2) {
    f1 = dpsi;
    f2 = -prob.reaction->f(x, psi) / prob.d;
}

Shot integrate(const ShotProblem &prob, double s, bool keep_profile) {
    const double length = prob.bc->length;
    const double h = length / static_cast<double>(kSteps);

    double psi = 0.0, dpsi = 0.0;
    switch (prob.bc->kind) {
    case BcKind::Dirichlet: psi = 0.0; dpsi = s; break;
    case BcKind::Neumann: psi = s; dpsi = 0.0; break;
    case BcKind::Robin: psi = prob.bc->sigma * s; dpsi = s; break;
    case BcKind::Periodic:
        throw InvalidParameter("shooting scan is not defined on the torus");
    }

    Shot shot;
    if (keep_profile) {
        shot.psi.reserve(kSteps + 1);
        shot.psi.push_back(psi);
    }
    shot.max_abs = std::abs(psi);

    for (int i = 0; i < kSteps; ++i) {
        const double x = static_cast<double>(i) * h;
        double k1p, k1q, k2p, k2q, k3p, k3q, k4p, k4q;
        rhs(prob, x, psi, dpsi, k1p, k1q);
        rhs(prob, x + 0.5 * h, psi + 0.5 * h * k1p, dpsi + 0.5 * h * k1q, k2p, k2q);
        rhs(prob, x + 0.5 * h, psi + 0.5 * h * k2p, dpsi + 0.5 * h * k2q, k3p, k3q);
        rhs(prob, x + h, psi + h * k3p, dpsi + h * k3q, k4p, k4q);
        psi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        dpsi += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);

        if (!std::isfinite(psi) || !std::isfinite(dpsi) || std::abs(psi) > kBlowup) {
            shot.blown = true;
            double sgn = psi > 0.0 ? 1.0 : (psi < 0.0 ? -1.0 : (dpsi >= 0.0 ? 1.0 : -1.0));
            if (!std::isfinite(psi))
                sgn = dpsi >= 0.0 ? 1.0 : -1.0;
            shot.endpoint = sgn * kSentinel;
            return shot;
        }
        shot.max_abs = std::max(shot.max_abs, std::abs(psi));
        if (keep_profile)
            shot.psi.push_back(psi);
    }

    switch (prob.bc->kind) {
    case BcKind::Dirichlet: shot.endpoint = psi; break;
    case BcKind::Neumann: shot.endpoint = dpsi; break;
    case BcKind::Robin: shot.endpoint = psi + prob.bc->sigma * dpsi; break;
    case BcKind::Periodic: break;
    }
    return shot;
}

} // namespace

std::string to_string(EllipticRegime r) {
    switch (r) {
    case EllipticRegime::UniqueSolution: return "unique-solution";
    case EllipticRegime::DiscreteSolutions: return "discrete-solutions";
    case EllipticRegime::ContinuousSpectrum: return "continuous-spectrum";
    }
    return "unknown";
}

void NonlinearParams::validate() const {
    if (!std::isfinite(d) || !std::isfinite(a) || !std::isfinite(b))
        throw InvalidParameter("nonlinear parameters must be finite");
    if (d < 0.0)
        throw InvalidParameter("diffusivity must be >= 0");
}

EllipticClassification shoot_count(double d, const Reaction &reaction,
                                   const BoundaryCondition &bc,
                                   std::pair<double, double> shoot_range, int n_scan) {
    bc.validate();
    if (!(d > 0.0) || !std::isfinite(d))
        throw InvalidParameter("shooting requires d > 0");
    if (!(shoot_range.first < shoot_range.second))
        throw InvalidParameter("shooting range must be nonempty");
    if (n_scan < 10)
        throw InvalidParameter("n_scan must be >= 10");

    const ShotProblem prob{d, &reaction, &bc};
    const double lo = shoot_range.first, hi = shoot_range.second;
    const double cell = (hi - lo) / static_cast<double>(n_scan);

    std::vector<Shot> shots(static_cast<size_t>(n_scan) + 1);
    int blown_count = 0;
    int zero_run = 0, best_zero_run = 0;
    for (int i = 0; i <= n_scan; ++i) {
        const double s = lo + cell * static_cast<double>(i);
        shots[static_cast<size_t>(i)] = integrate(prob, s, false);
        const Shot &sh = shots[static_cast<size_t>(i)];
        if (sh.blown)
            ++blown_count;
        // A run of near-zero endpoints from nontrivial trajectories marks a
        // continuum of steady states.
        if (!sh.blown && std::abs(sh.endpoint) < kZeroBand && sh.max_abs > 1e-8)
            ++zero_run;
        else
            zero_run = 0;
        best_zero_run = std::max(best_zero_run, zero_run);
    }
    if (blown_count == n_scan + 1)
        throw IntegratorBlowUp("every trajectory in the shooting range blew up");

    EllipticClassification out;
    if (best_zero_run >= 3) {
        out.regime = EllipticRegime::ContinuousSpectrum;
        out.notes.push_back("zero-run:" + std::to_string(best_zero_run));
        return out;
    }

    std::vector<double> roots;
    // A scan point can land on a root exactly (killing the sign change in
    // both adjacent cells), or touch it tangentially; collect those first.
    bool prev_zero = false;
    for (int i = 0; i <= n_scan; ++i) {
        const Shot &sh = shots[static_cast<size_t>(i)];
        const bool zero = !sh.blown && std::abs(sh.endpoint) < kZeroBand && sh.max_abs > 1e-8;
        if (zero && !prev_zero)
            roots.push_back(lo + cell * static_cast<double>(i));
        prev_zero = zero;
    }
    for (int i = 0; i < n_scan; ++i) {
        const double fl = shots[static_cast<size_t>(i)].endpoint;
        const double fr = shots[static_cast<size_t>(i + 1)].endpoint;
        if (!(fl * fr < 0.0))
            continue;
        double a = lo + cell * static_cast<double>(i);
        double b = a + cell;
        double fa = fl;
        Shot mid_shot;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            mid_shot = integrate(prob, m, false);
            const double fm = mid_shot.endpoint;
            if (fa * fm <= 0.0)
                b = m;
            else {
                a = m;
                fa = fm;
            }
            if (b - a < 1e-13 * std::max(1.0, std::abs(m)))
                break;
        }
        const double root = 0.5 * (a + b);
        const Shot final_shot = integrate(prob, root, false);
        if (final_shot.blown)
            continue; // sign change caused by the blowup boundary, not a root
        if (std::abs(final_shot.endpoint) > 1e-6 * std::max(1.0, final_shot.max_abs))
            continue;
        if (final_shot.max_abs < 1e-8)
            continue; // trivial branch
        roots.push_back(root);
    }

    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double x, double y) {
                                return std::abs(x - y) <= 1e-8 * std::max(1.0, std::abs(x));
                            }),
                roots.end());

    for (double r : roots)
        if (r < lo + cell || r > hi - cell)
            throw RangeTooNarrow("nontrivial root lies in an edge cell of the shooting range");

    const double h = bc.length / static_cast<double>(kSteps);
    for (double r : roots) {
        const Shot sh = integrate(prob, r, true);
        EllipticProfile prof;
        prof.shoot_param = r;
        prof.x.resize(sh.psi.size());
        for (size_t i = 0; i < sh.psi.size(); ++i)
            prof.x[i] = h * static_cast<double>(i);
        prof.psi = sh.psi;
        out.solutions.push_back(std::move(prof));
    }
    out.regime = out.solutions.empty() ? EllipticRegime::UniqueSolution
                                       : EllipticRegime::DiscreteSolutions;
    return out;
}

double elliptic_residual(const EllipticProfile &profile, double d, const Reaction &reaction) {
    const size_t n = profile.x.size();
    if (n < 5 || profile.psi.size() != n)
        throw GridMismatch("profile grid must have >= 5 matching nodes");
    const double h = profile.x[1] - profile.x[0];
    double worst = 0.0;
    for (size_t i = 2; i + 2 < n; ++i) {
        const double uxx = (-profile.psi[i + 2] + 16.0 * profile.psi[i + 1] -
                            30.0 * profile.psi[i] + 16.0 * profile.psi[i - 1] -
                            profile.psi[i - 2]) /
                           (12.0 * h * h);
        const double r = d * uxx + reaction.f(profile.x[i], profile.psi[i]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

std::pair<double, double> default_shoot_range(const NonlinearParams &p) {
    const double amp = std::abs(p.a) / std::max(std::abs(p.b), 1e-12);
    const double slope = amp * std::sqrt(std::max(std::abs(p.a), 1.0) / std::max(p.d, 1e-12));
    const double r = 4.0 * std::max({1.0, amp, slope});
    return {-r, r};
}

NonlinearPairVerdict classify_nonlinear_pair(const NonlinearParams &p1,
                                             const NonlinearParams &p2,
                                             const BoundaryCondition &bc,
                                             std::pair<double, double> shoot_range, int n_scan) {
    p1.validate();
    p2.validate();
    bc.validate();
    const double dd = p1.d - p2.d;
    const double da = p1.a - p2.a;
    const double db = p1.b - p2.b;
    if (dd == 0.0 && da == 0.0 && db == 0.0)
        throw SamePoint("nonlinear parameter points coincide");

    NonlinearPairVerdict out;
    // Any solution shared by both problems satisfies
    // dd * u_xx + da * u - db * u^2 = 0 pointwise.
    if (dd == 0.0) {
        if (da == 0.0 || db == 0.0) {
            out.regime = EllipticRegime::UniqueSolution;
            out.notes.push_back("algebraic:only-trivial");
        } else {
            out.regime = EllipticRegime::DiscreteSolutions;
            out.notes.push_back("algebraic:constant-candidate");
        }
        out.difference.regime = out.regime;
        out.identifiable = true;
        return out;
    }

    const double sgn = dd > 0.0 ? 1.0 : -1.0;
    const Reaction diff = Reaction::logistic(sgn * da, sgn * db);
    out.difference = shoot_count(std::abs(dd), diff, bc, shoot_range, n_scan);
    out.regime = out.difference.regime;
    out.identifiable = out.regime != EllipticRegime::ContinuousSpectrum;
    if (out.regime == EllipticRegime::DiscreteSolutions)
        out.notes.push_back("discrete-steady-set:" + std::to_string(out.difference.solutions.size()));
    return out;
}

} // namespace pdeident
