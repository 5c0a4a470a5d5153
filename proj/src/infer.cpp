#include "pdeident/infer.hpp"

#include "pdeident/errors.hpp"
#include "pdeident/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace pdeident {

namespace {

constexpr double kThreshold = 2.9957; // chi^2_2(0.95) / 2
constexpr double kCondLimit = 1e12;

double adaptive_simpson(const std::function<double(double)> &f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)> &f, double a, double b, double rel_tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = rel_tol * std::max(1.0, std::abs(whole));
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

Eigen::MatrixXd noise_correlation(std::span<const double> x, double eta) {
    const int n = static_cast<int>(x.size());
    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            k(i, j) = std::exp(-eta * std::abs(x[static_cast<size_t>(i)] -
                                               x[static_cast<size_t>(j)]));
    return k;
}

/// Quantities independent of (c, d), precomputed once per surface.
struct GlsContext {
    int nx = 0, nt = 0, n_modes = 0;
    Eigen::MatrixXd phi;  ///< nx x N basis matrix sin(n pi x / l)
    Eigen::VectorXd lam;  ///< decay rates n^2 pi^2 / l^2
    Eigen::MatrixXd g;    ///< Phi^T W Phi
    Eigen::MatrixXd h;    ///< N x nt, columns Phi^T W y_j
    Eigen::VectorXd q;    ///< y_j^T W y_j
    double const_term = 0.0;
};

Eigen::MatrixXd basis_matrix(std::span<const double> x, int n_modes, double length) {
    Eigen::MatrixXd phi(static_cast<int>(x.size()), n_modes);
    for (int i = 0; i < phi.rows(); ++i)
        for (int n = 1; n <= n_modes; ++n)
            phi(i, n - 1) = std::sin(static_cast<double>(n) * std::numbers::pi *
                                     x[static_cast<size_t>(i)] / length);
    return phi;
}

GlsContext make_context(const Dataset &data, double sigma, double eta, int n_modes) {
    GlsContext ctx;
    ctx.nx = static_cast<int>(data.x_obs.size());
    ctx.nt = static_cast<int>(data.t_obs.size());
    ctx.n_modes = n_modes;
    ctx.phi = basis_matrix(data.x_obs, n_modes, data.length);
    ctx.lam.resize(n_modes);
    for (int n = 1; n <= n_modes; ++n)
        ctx.lam(n - 1) = std::pow(static_cast<double>(n) * std::numbers::pi / data.length, 2);

    Eigen::MatrixXd cov = sigma * sigma * noise_correlation(data.x_obs, eta);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw CholeskyFailure("noise covariance is not positive definite");

    const Eigen::MatrixXd w_phi = llt.solve(ctx.phi);
    ctx.g = ctx.phi.transpose() * w_phi;
    ctx.h = w_phi.transpose() * data.y; // N x nt
    ctx.q.resize(ctx.nt);
    for (int j = 0; j < ctx.nt; ++j)
        ctx.q(j) = data.y.col(j).dot(llt.solve(data.y.col(j)).eval());

    double logdet = 0.0;
    for (int i = 0; i < ctx.nx; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
    ctx.const_term = static_cast<double>(ctx.nt) *
                     (-0.5 * static_cast<double>(ctx.nx) * std::log(2.0 * std::numbers::pi) -
                      0.5 * logdet);
    return ctx;
}

/// Profile the IC coefficients out at one (c, d) node; returns the maximized
/// log-likelihood and the GLS coefficients.
double gls_value(const GlsContext &ctx, const Dataset &data, double c, double d,
                 Eigen::VectorXd &coeffs, bool &ill_conditioned) {
    const int n = ctx.n_modes;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < ctx.nt; ++j) {
        const double t = data.t_obs[static_cast<size_t>(j)];
        Eigen::VectorXd e(n);
        for (int k = 0; k < n; ++k)
            e(k) = std::exp((c - d * ctx.lam(k)) * t);
        m += (e * e.transpose()).cwiseProduct(ctx.g);
        rhs += e.cwiseProduct(ctx.h.col(j));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double emax = es.eigenvalues().maxCoeff();
    const double emin = es.eigenvalues().minCoeff();
    Eigen::MatrixXd m_solve = m;
    ill_conditioned = !(emin > 0.0) || emax / emin > kCondLimit;
    if (ill_conditioned)
        m_solve += (std::max(emax, 1.0) / kCondLimit) * Eigen::MatrixXd::Identity(n, n);
    coeffs = m_solve.ldlt().solve(rhs);

    return ctx.const_term - 0.5 * ctx.q.sum() + coeffs.dot(rhs) -
           0.5 * coeffs.dot(m * coeffs);
}

/// Profile IC coefficients and (eta, sigma) jointly at one (c, d) node.
double gls_value_noise(const Dataset &data, double c, double d, int n_modes,
                       Eigen::VectorXd &coeffs, double &sigma_hat, double &eta_hat) {
    const int nx = static_cast<int>(data.x_obs.size());
    const int nt = static_cast<int>(data.t_obs.size());
    const Eigen::MatrixXd phi = basis_matrix(data.x_obs, n_modes, data.length);

    const auto value_at_eta = [&](double eta, Eigen::VectorXd *c_out,
                                  double *s2_out) -> double {
        const Eigen::MatrixXd k = noise_correlation(data.x_obs, eta);
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() != Eigen::Success)
            throw CholeskyFailure("noise correlation is not positive definite");
        const Eigen::MatrixXd w_phi = llt.solve(phi);
        const Eigen::MatrixXd g = phi.transpose() * w_phi;
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_modes, n_modes);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_modes);
        std::vector<Eigen::VectorXd> es(static_cast<size_t>(nt));
        for (int j = 0; j < nt; ++j) {
            const double t = data.t_obs[static_cast<size_t>(j)];
            Eigen::VectorXd e(n_modes);
            for (int kk = 1; kk <= n_modes; ++kk)
                e(kk - 1) = std::exp(
                    (c - d * std::pow(static_cast<double>(kk) * std::numbers::pi / data.length,
                                      2)) *
                    t);
            es[static_cast<size_t>(j)] = e;
            m += (e * e.transpose()).cwiseProduct(g);
            rhs += e.cwiseProduct((w_phi.transpose() * data.y.col(j)).eval());
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esolve(m);
        const double emax = esolve.eigenvalues().maxCoeff();
        const double emin = esolve.eigenvalues().minCoeff();
        Eigen::MatrixXd m_solve = m;
        if (!(emin > 0.0) || emax / emin > kCondLimit)
            m_solve += (std::max(emax, 1.0) / kCondLimit) *
                       Eigen::MatrixXd::Identity(n_modes, n_modes);
        const Eigen::VectorXd cc = m_solve.ldlt().solve(rhs);

        double s = 0.0; // sum of r_j^T K^{-1} r_j at the GLS optimum
        for (int j = 0; j < nt; ++j) {
            const Eigen::VectorXd r =
                data.y.col(j) - phi * es[static_cast<size_t>(j)].cwiseProduct(cc);
            s += r.dot(llt.solve(r).eval());
        }
        double logdet_k = 0.0;
        for (int i = 0; i < nx; ++i)
            logdet_k += 2.0 * std::log(llt.matrixL()(i, i));
        const double ntot = static_cast<double>(nt) * static_cast<double>(nx);
        const double s2 = std::max(s / ntot, 1e-300);
        const double val = -0.5 * ntot * (std::log(2.0 * std::numbers::pi) + std::log(s2) + 1.0) -
                           0.5 * static_cast<double>(nt) * logdet_k;
        if (c_out)
            *c_out = cc;
        if (s2_out)
            *s2_out = s2;
        return val;
    };

    // Golden-section search for eta on a log scale.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(0.1), hi = std::log(100.0);
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = value_at_eta(std::exp(x1), nullptr, nullptr);
    double f2 = value_at_eta(std::exp(x2), nullptr, nullptr);
    for (int it = 0; it < 60 && hi - lo > 1e-8; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = value_at_eta(std::exp(x2), nullptr, nullptr);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = value_at_eta(std::exp(x1), nullptr, nullptr);
        }
    }
    eta_hat = std::exp(0.5 * (lo + hi));
    double s2 = 0.0;
    const double val = value_at_eta(eta_hat, &coeffs, &s2);
    sigma_hat = std::sqrt(s2);
    return val;
}

} // namespace

void NoiseModel::validate() const {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw InvalidParameter("noise sigma must be finite and >= 0");
    if (!std::isfinite(eta) || eta <= 0.0)
        throw InvalidParameter("noise eta must be finite and > 0");
}

EigenExpansionIC gaussian_ic_coefficients(double omega, int n_modes, double length) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw InvalidParameter("omega must be finite and > 0");
    if (n_modes < 1)
        throw InvalidParameter("n_modes must be >= 1");
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidDomain("length must be finite and > 0");

    const double mid = 0.5 * length;
    const auto bump = [&](double x) { return std::exp(-(x - mid) * (x - mid) / (2.0 * omega * omega)); };
    const double g0 = bump(0.0);
    const double denom = bump(mid) - g0; // = 1 - g0 > 0
    EigenExpansionIC ic;
    ic.bc = BoundaryCondition::dirichlet(length);
    ic.coeffs.resize(static_cast<size_t>(n_modes));
    for (int n = 1; n <= n_modes; ++n) {
        const auto f = [&](double x) {
            return (bump(x) - g0) / denom *
                   std::sin(static_cast<double>(n) * std::numbers::pi * x / length);
        };
        ic.coeffs[static_cast<size_t>(n - 1)] = 2.0 / length * integrate(f, 0.0, length, 1e-10);
    }
    return ic;
}

Dataset generate_dataset(const OperatorParams &A, const EigenExpansionIC &ic,
                         const NoiseModel &noise, std::span<const double> x_obs,
                         std::span<const double> t_obs, std::uint64_t seed) {
    A.validate();
    ic.validate();
    noise.validate();
    if (ic.bc.kind != BcKind::Dirichlet)
        throw InvalidParameter("dataset generation requires Dirichlet conditions");
    if (A.b != 0.0)
        throw UnsupportedDrift("dataset generation requires zero drift");
    if (x_obs.size() < 2 || t_obs.empty())
        throw InvalidParameter("observation grids must be nonempty");
    for (size_t i = 1; i < x_obs.size(); ++i)
        if (!(x_obs[i] > x_obs[i - 1]))
            throw InvalidParameter("x_obs must be strictly increasing");

    Dataset data;
    data.x_obs.assign(x_obs.begin(), x_obs.end());
    data.t_obs.assign(t_obs.begin(), t_obs.end());
    data.seed = seed;
    data.length = ic.bc.length;
    data.truth = A;
    data.truth_coeffs = ic.coeffs;
    data.noise = noise;

    const int nx = static_cast<int>(x_obs.size());
    const int nt = static_cast<int>(t_obs.size());
    const int n_modes = static_cast<int>(ic.coeffs.size());
    data.y.resize(nx, nt);
    for (int j = 0; j < nt; ++j) {
        const double t = t_obs[static_cast<size_t>(j)];
        for (int i = 0; i < nx; ++i) {
            double u = 0.0;
            for (int n = 1; n <= n_modes; ++n) {
                const double lam =
                    A.d * std::pow(static_cast<double>(n) * std::numbers::pi / data.length, 2);
                u += ic.coeffs[static_cast<size_t>(n - 1)] * std::exp((A.c - lam) * t) *
                     std::sin(static_cast<double>(n) * std::numbers::pi *
                              x_obs[static_cast<size_t>(i)] / data.length);
            }
            data.y(i, j) = u;
        }
    }

    if (noise.sigma > 0.0) {
        Eigen::MatrixXd cov = noise.sigma * noise.sigma * noise_correlation(x_obs, noise.eta);
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw CholeskyFailure("noise covariance is not positive definite");
        const Eigen::MatrixXd l = llt.matrixL();
        const CounterRng rng{seed};
        for (int j = 0; j < nt; ++j) {
            Eigen::VectorXd z(nx);
            for (int i = 0; i < nx; ++i)
                z(i) = rng.normal(static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
            data.y.col(j) += l * z;
        }
    }
    return data;
}

double log_likelihood(const Dataset &data, double c, double d, const Eigen::VectorXd &coeffs,
                      const NoiseModel &noise) {
    noise.validate();
    if (!(noise.sigma > 0.0))
        throw InvalidParameter("likelihood evaluation requires sigma > 0");
    const int nx = static_cast<int>(data.x_obs.size());
    const int nt = static_cast<int>(data.t_obs.size());
    const int n_modes = static_cast<int>(coeffs.size());
    if (data.y.rows() != nx || data.y.cols() != nt)
        throw GridMismatch("dataset matrix does not match observation grids");

    const Eigen::MatrixXd phi = basis_matrix(data.x_obs, n_modes, data.length);
    Eigen::MatrixXd cov = noise.sigma * noise.sigma * noise_correlation(data.x_obs, noise.eta);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw CholeskyFailure("noise covariance is not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < nx; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));

    double ll = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double t = data.t_obs[static_cast<size_t>(j)];
        Eigen::VectorXd e(n_modes);
        for (int n = 1; n <= n_modes; ++n)
            e(n - 1) = std::exp(
                (c - d * std::pow(static_cast<double>(n) * std::numbers::pi / data.length, 2)) *
                t);
        const Eigen::VectorXd r = data.y.col(j) - phi * e.cwiseProduct(coeffs);
        ll += -0.5 * static_cast<double>(nx) * std::log(2.0 * std::numbers::pi) - 0.5 * logdet -
              0.5 * r.dot(llt.solve(r).eval());
    }
    return ll;
}

ProfileSurface profile_likelihood(const Dataset &data, std::span<const double> c_grid,
                                  std::span<const double> d_grid, const NoiseModel &noise,
                                  int n_modes, bool profile_noise) {
    noise.validate();
    if (!(noise.sigma > 0.0))
        throw InvalidParameter("likelihood evaluation requires sigma > 0");
    if (c_grid.empty() || d_grid.empty())
        throw InvalidParameter("profile grids must be nonempty");
    if (n_modes < 1)
        throw InvalidParameter("n_modes must be >= 1");
    for (double d : d_grid)
        if (!(d > 0.0))
            throw InvalidParameter("d grid entries must be > 0");

    ProfileSurface surf;
    surf.c_grid.assign(c_grid.begin(), c_grid.end());
    surf.d_grid.assign(d_grid.begin(), d_grid.end());
    surf.threshold = kThreshold;
    const int nc = static_cast<int>(c_grid.size());
    const int nd = static_cast<int>(d_grid.size());
    surf.loglik.resize(nc, nd);
    surf.in95.resize(nc, nd);

    GlsContext ctx;
    if (!profile_noise)
        ctx = make_context(data, noise.sigma, noise.eta, n_modes);

    const auto eval = [&](double c, double d, Eigen::VectorXd &coeffs, double &sigma_hat,
                          double &eta_hat, bool &ill) -> double {
        if (profile_noise) {
            ill = false;
            return gls_value_noise(data, c, d, n_modes, coeffs, sigma_hat, eta_hat);
        }
        sigma_hat = noise.sigma;
        eta_hat = noise.eta;
        return gls_value(ctx, data, c, d, coeffs, ill);
    };

    int best_i = 0, best_j = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nd; ++j) {
            Eigen::VectorXd coeffs;
            double sh = 0.0, eh = 0.0;
            bool ill = false;
            const double v = eval(c_grid[static_cast<size_t>(i)], d_grid[static_cast<size_t>(j)],
                                  coeffs, sh, eh, ill);
            surf.loglik(i, j) = v;
            if (ill)
                surf.ill_conditioned.emplace_back(i, j);
            if (v > best) {
                best = v;
                best_i = i;
                best_j = j;
            }
        }
    }

    // Refine the maximizer inside the bracketing grid cells by alternating
    // golden-section sweeps in c and log d.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double c_lo = surf.c_grid[static_cast<size_t>(std::max(0, best_i - 1))];
    double c_hi = surf.c_grid[static_cast<size_t>(std::min(nc - 1, best_i + 1))];
    double ld_lo = std::log(surf.d_grid[static_cast<size_t>(std::max(0, best_j - 1))]);
    double ld_hi = std::log(surf.d_grid[static_cast<size_t>(std::min(nd - 1, best_j + 1))]);
    double c_star = surf.c_grid[static_cast<size_t>(best_i)];
    double ld_star = std::log(surf.d_grid[static_cast<size_t>(best_j)]);
    const auto value_at = [&](double c, double ld) {
        Eigen::VectorXd coeffs;
        double sh = 0.0, eh = 0.0;
        bool ill = false;
        return eval(c, std::exp(ld), coeffs, sh, eh, ill);
    };
    for (int sweep = 0; sweep < 6; ++sweep) {
        // c direction
        double lo = c_lo, hi = c_hi;
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = value_at(x1, ld_star), f2 = value_at(x2, ld_star);
        for (int it = 0; it < 40 && hi - lo > 1e-10 * std::max(1.0, std::abs(hi)); ++it) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = value_at(x2, ld_star);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = value_at(x1, ld_star);
            }
        }
        c_star = 0.5 * (lo + hi);
        // log d direction
        lo = ld_lo; hi = ld_hi;
        x1 = hi - golden * (hi - lo); x2 = lo + golden * (hi - lo);
        f1 = value_at(c_star, x1); f2 = value_at(c_star, x2);
        for (int it = 0; it < 40 && hi - lo > 1e-10; ++it) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = value_at(c_star, x2);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = value_at(c_star, x1);
            }
        }
        ld_star = 0.5 * (lo + hi);
    }

    Eigen::VectorXd mle_coeffs;
    double mle_sigma = 0.0, mle_eta = 0.0;
    bool ill = false;
    const double refined = eval(c_star, std::exp(ld_star), mle_coeffs, mle_sigma, mle_eta, ill);
    if (refined >= best) {
        best = refined;
        surf.mle.c = c_star;
        surf.mle.d = std::exp(ld_star);
    } else {
        surf.mle.c = surf.c_grid[static_cast<size_t>(best_i)];
        surf.mle.d = surf.d_grid[static_cast<size_t>(best_j)];
        double sh = 0.0, eh = 0.0;
        eval(surf.mle.c, surf.mle.d, mle_coeffs, sh, eh, ill);
        mle_sigma = sh;
        mle_eta = eh;
    }
    surf.mle.coeffs = mle_coeffs;
    surf.mle.loglik = best;
    surf.mle.sigma = mle_sigma;
    surf.mle.eta = mle_eta;

    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nd; ++j) {
            surf.loglik(i, j) -= best;
            surf.in95(i, j) = surf.loglik(i, j) >= -surf.threshold ? 1 : 0;
        }
    return surf;
}

std::vector<double> default_c_grid() {
    std::vector<double> g(81);
    for (int i = 0; i < 81; ++i)
        g[static_cast<size_t>(i)] = 4.0 * static_cast<double>(i) / 80.0;
    return g;
}

std::vector<double> default_d_grid() {
    std::vector<double> g(81);
    for (int i = 0; i < 81; ++i)
        g[static_cast<size_t>(i)] = std::pow(10.0, -3.0 + 3.0 * static_cast<double>(i) / 80.0);
    return g;
}

std::vector<double> default_x_obs() {
    std::vector<double> g(11);
    for (int i = 0; i < 11; ++i)
        g[static_cast<size_t>(i)] = static_cast<double>(i) / 10.0;
    return g;
}

std::vector<double> default_t_obs() {
    std::vector<double> g(21);
    for (int i = 0; i < 21; ++i)
        g[static_cast<size_t>(i)] = static_cast<double>(i) / 10.0;
    return g;
}

} // namespace pdeident
