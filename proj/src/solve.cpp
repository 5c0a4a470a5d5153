#include "pdeident/solve.hpp"
#include "pdeident/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdeident {

namespace {

constexpr double kBlowUpLimit = 1e6;

// Tridiagonal spatial operator d*D2 + b*D1 with boundary closure baked into
// the first/last rows; `corner` carries the periodic wraparound entries.
struct TriOperator {
    std::vector<double> lower, diag, upper;
    double corner_lo = 0.0; // entry (0, n-1)
    double corner_hi = 0.0; // entry (n-1, 0)
    bool periodic = false;

    int size() const { return static_cast<int>(diag.size()); }

    void apply(std::span<const double> u, std::vector<double> &out) const {
        const int n = size();
        out.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double acc = diag[i] * u[i];
            if (i > 0) acc += lower[i] * u[i - 1];
            if (i + 1 < n) acc += upper[i] * u[i + 1];
            out[static_cast<std::size_t>(i)] = acc;
        }
        if (periodic) {
            out[0] += corner_lo * u[static_cast<std::size_t>(n - 1)];
            out[static_cast<std::size_t>(n - 1)] += corner_hi * u[0];
        }
    }
};

TriOperator build_operator(double d, double b, const BoundaryCondition &bc, int nx) {
    TriOperator op;
    const bool periodic = bc.kind == BcKind::Periodic;
    const double h = periodic ? bc.length / nx : bc.length / (nx - 1);
    const double h2 = h * h;
    op.lower.assign(static_cast<std::size_t>(nx), d / h2 - b / (2.0 * h));
    op.diag.assign(static_cast<std::size_t>(nx), -2.0 * d / h2);
    op.upper.assign(static_cast<std::size_t>(nx), d / h2 + b / (2.0 * h));
    op.periodic = periodic;

    switch (bc.kind) {
        case BcKind::Dirichlet:
            // boundary values are pinned at zero
            op.diag.front() = op.diag.back() = 0.0;
            op.upper.front() = op.lower.back() = 0.0;
            op.lower.front() = op.upper.back() = 0.0;
            break;
        case BcKind::Neumann:
            // ghost closure u_{-1} = u_1, drift vanishes at the wall
            op.diag.front() = -2.0 * d / h2;
            op.upper.front() = 2.0 * d / h2;
            op.lower.front() = 0.0;
            op.diag.back() = -2.0 * d / h2;
            op.lower.back() = 2.0 * d / h2;
            op.upper.back() = 0.0;
            break;
        case BcKind::Robin: {
            // u_x(0) = u0/sigma and u_x(l) = -u_{n-1}/sigma from the
            // endpoint conditions; second-order ghost closure.
            const double s = bc.sigma;
            op.diag.front() = -d * (2.0 + 2.0 * h / s) / h2 + b / s;
            op.upper.front() = 2.0 * d / h2;
            op.lower.front() = 0.0;
            op.diag.back() = -d * (2.0 + 2.0 * h / s) / h2 - b / s;
            op.lower.back() = 2.0 * d / h2;
            op.upper.back() = 0.0;
            break;
        }
        case BcKind::Periodic:
            op.corner_lo = d / h2 - b / (2.0 * h);
            op.corner_hi = d / h2 + b / (2.0 * h);
            op.lower.front() = 0.0;
            op.upper.back() = 0.0;
            break;
    }
    return op;
}

void thomas_solve(std::vector<double> lower, std::vector<double> diag,
                  std::vector<double> upper, std::vector<double> rhs,
                  std::vector<double> &out) {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) {
        const double w = lower[static_cast<std::size_t>(i)] / diag[static_cast<std::size_t>(i - 1)];
        diag[static_cast<std::size_t>(i)] -= w * upper[static_cast<std::size_t>(i - 1)];
        rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
    }
    out.resize(static_cast<std::size_t>(n));
    out[static_cast<std::size_t>(n - 1)] =
        rhs[static_cast<std::size_t>(n - 1)] / diag[static_cast<std::size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i)
        out[static_cast<std::size_t>(i)] =
            (rhs[static_cast<std::size_t>(i)] -
             upper[static_cast<std::size_t>(i)] * out[static_cast<std::size_t>(i + 1)]) /
            diag[static_cast<std::size_t>(i)];
}

// Crank-Nicolson stepper for u_t = Lu with L tridiagonal (plus periodic
// corners handled by Sherman-Morrison).
class CnStepper {
public:
    CnStepper(const TriOperator &op, double dt) : op_(op), dt_(dt) {
        const int n = op.size();
        const double g = dt / 2.0;
        a_.resize(static_cast<std::size_t>(n));
        d_.resize(static_cast<std::size_t>(n));
        c_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            a_[static_cast<std::size_t>(i)] = -g * op.lower[static_cast<std::size_t>(i)];
            d_[static_cast<std::size_t>(i)] = 1.0 - g * op.diag[static_cast<std::size_t>(i)];
            c_[static_cast<std::size_t>(i)] = -g * op.upper[static_cast<std::size_t>(i)];
        }
        if (op.periodic) {
            // Sherman-Morrison: A = T + alpha e0 e_{n-1}^T + beta e_{n-1} e0^T
            // folded into rank-one correction u v^T with u = gamma e0 + e_{n-1}.
            alpha_ = -g * op.corner_lo;
            beta_ = -g * op.corner_hi;
            gamma_ = -d_[0];
            d_mod_ = d_;
            d_mod_[0] -= gamma_;
            d_mod_[static_cast<std::size_t>(n - 1)] -= alpha_ * beta_ / gamma_;
        }
    }

    void step(std::vector<double> &u, std::vector<double> &scratch) const {
        const int n = op_.size();
        op_.apply(u, scratch);
        for (int i = 0; i < n; ++i)
            scratch[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>(i)] + dt_ / 2.0 * scratch[static_cast<std::size_t>(i)];
        if (!op_.periodic) {
            thomas_solve(a_, d_, c_, scratch, u);
            return;
        }
        // cyclic solve via Sherman-Morrison
        std::vector<double> y, q;
        thomas_solve(a_, d_mod_, c_, scratch, y);
        std::vector<double> rhs_q(static_cast<std::size_t>(n), 0.0);
        rhs_q[0] = gamma_;
        rhs_q[static_cast<std::size_t>(n - 1)] = beta_;
        thomas_solve(a_, d_mod_, c_, rhs_q, q);
        const double num = y[0] + (alpha_ / gamma_) * y[static_cast<std::size_t>(n - 1)];
        const double den = 1.0 + q[0] + (alpha_ / gamma_) * q[static_cast<std::size_t>(n - 1)];
        u.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            u[static_cast<std::size_t>(i)] =
                y[static_cast<std::size_t>(i)] - (num / den) * q[static_cast<std::size_t>(i)];
    }

private:
    TriOperator op_;
    double dt_;
    std::vector<double> a_, d_, c_;
    std::vector<double> d_mod_;
    double alpha_ = 0.0, beta_ = 0.0, gamma_ = 1.0;
};

void check_blowup(std::span<const double> u) {
    for (double v : u)
        if (!std::isfinite(v) || std::abs(v) > kBlowUpLimit)
            throw BlowUp("field magnitude exceeded 1e6");
}

} // namespace

void EigenExpansionIC::validate() const {
    if (coeffs.empty()) throw InvalidParameter("eigen expansion needs at least one mode");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw InvalidParameter("expansion coefficients must be finite");
    bc.validate();
}

Reaction Reaction::hetero_logistic(std::function<double(double)> m, double b) {
    Reaction r;
    r.b = b;
    r.m = std::move(m);
    return r;
}

std::vector<double> fd_grid(const BoundaryCondition &bc, int nx) {
    std::vector<double> xs(static_cast<std::size_t>(nx));
    if (bc.kind == BcKind::Periodic) {
        for (int i = 0; i < nx; ++i) xs[static_cast<std::size_t>(i)] = bc.length * i / nx;
    } else {
        for (int i = 0; i < nx; ++i) xs[static_cast<std::size_t>(i)] = bc.length * i / (nx - 1);
    }
    return xs;
}

Field solve_linear_spectral(const OperatorParams &A, const BoundaryCondition &bc,
                            const EigenExpansionIC &ic, std::span<const double> x_grid,
                            std::span<const double> t_grid) {
    A.validate();
    bc.validate();
    ic.validate();
    if (ic.bc != bc) throw BasisMismatch("initial-condition basis does not match bc");

    const int n_modes = static_cast<int>(ic.coeffs.size());
    std::vector<EigenPair> pairs;
    if (A.d == 0.0) {
        if (bc.kind != BcKind::Neumann || n_modes != 1)
            throw InvalidParameter("d = 0 is supported only for the Neumann constant mode");
        pairs = neumann_eigenpairs(0.0, A.b, bc.length, 1);
    } else {
        const int n_max = (bc.kind == BcKind::Neumann) ? n_modes
                          : (bc.kind == BcKind::Periodic) ? n_modes - 1
                                                          : n_modes;
        pairs = eigenpairs(A.d, A.b, bc, std::max(n_max, 1));
    }

    Field field;
    field.x.assign(x_grid.begin(), x_grid.end());
    field.t.assign(t_grid.begin(), t_grid.end());
    field.values.setZero(static_cast<Eigen::Index>(x_grid.size()),
                         static_cast<Eigen::Index>(t_grid.size()));

    for (int n = 0; n < n_modes; ++n) {
        const double C = ic.coeffs[static_cast<std::size_t>(n)];
        if (C == 0.0) continue;
        const auto &pair = pairs[static_cast<std::size_t>(n)];
        const double mu = A.c - pair.lambda;
        auto phi = eigenfunction_sample(pair, x_grid);
        for (Eigen::Index j = 0; j < field.values.cols(); ++j) {
            const double gain = C * std::exp(mu * t_grid[static_cast<std::size_t>(j)]);
            for (Eigen::Index i = 0; i < field.values.rows(); ++i)
                field.values(i, j) += gain * phi[static_cast<std::size_t>(i)];
        }
    }
    return field;
}

Field solve_nonlinear_fd(double d, double b_drift, const Reaction &reaction,
                         const BoundaryCondition &bc, std::span<const double> u0,
                         std::span<const double> t_grid, int nx) {
    bc.validate();
    if (!(d > 0.0)) throw InvalidParameter("FD solver requires d > 0");
    if (nx < 51) throw InvalidParameter("nx must be at least 51");
    if (static_cast<int>(u0.size()) != nx)
        throw GridMismatch("u0 must hold nx grid samples");
    if (t_grid.empty()) throw InvalidParameter("empty time grid");
    if (bc.kind == BcKind::Dirichlet) {
        if (std::abs(u0.front()) > 1e-8 || std::abs(u0.back()) > 1e-8)
            throw InvalidParameter("initial condition violates the Dirichlet boundary");
    }

    const auto xs = fd_grid(bc, nx);
    const double h = xs[1] - xs[0];
    const auto op = build_operator(d, b_drift, bc, nx);

    std::vector<double> u(u0.begin(), u0.end());
    Field field;
    field.x = xs;
    field.t.assign(t_grid.begin(), t_grid.end());
    field.values.setZero(nx, static_cast<Eigen::Index>(t_grid.size()));

    auto record = [&](Eigen::Index j) {
        for (int i = 0; i < nx; ++i) field.values(i, j) = u[static_cast<std::size_t>(i)];
    };

    auto max_dfdu = [&]() {
        double m = 0.0;
        for (int i = 0; i < nx; ++i)
            m = std::max(m, std::abs(reaction.dfdu(xs[static_cast<std::size_t>(i)],
                                                   u[static_cast<std::size_t>(i)])));
        return m;
    };

    auto reaction_half = [&](double dt_half) {
        const double m = max_dfdu();
        if (2.0 * dt_half * m > 2.0)
            throw StepSizeRejected("explicit reaction step violates the stability bound");
        std::vector<double> k1(static_cast<std::size_t>(nx)), mid(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i)
            k1[static_cast<std::size_t>(i)] =
                reaction.f(xs[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)]);
        for (int i = 0; i < nx; ++i)
            mid[static_cast<std::size_t>(i)] =
                u[static_cast<std::size_t>(i)] + dt_half * k1[static_cast<std::size_t>(i)];
        for (int i = 0; i < nx; ++i) {
            const double k2 =
                reaction.f(xs[static_cast<std::size_t>(i)], mid[static_cast<std::size_t>(i)]);
            u[static_cast<std::size_t>(i)] +=
                dt_half / 2.0 * (k1[static_cast<std::size_t>(i)] + k2);
        }
        if (bc.kind == BcKind::Dirichlet) u.front() = u.back() = 0.0;
    };

    double t = t_grid[0];
    Eigen::Index out_j = 0;
    record(out_j++);

    std::vector<double> scratch;
    for (std::size_t j = 1; j < t_grid.size(); ++j) {
        const double t_next = t_grid[j];
        if (!(t_next > t)) throw InvalidParameter("time grid must be strictly increasing");
        // The step size adapts to the current reaction stiffness, so growing
        // solutions shrink dt until blow-up is detected instead of tripping
        // the stability bound mid-interval.
        double remaining = t_next - t;
        while (remaining > 1e-14 * std::max(1.0, std::abs(t_next))) {
            const double m = max_dfdu();
            double dt = std::min(h, remaining);
            if (m > 0.0) dt = std::min(dt, 0.5 / m);
            if (dt < 1e-12 * std::max(1.0, std::abs(t_next)))
                throw StepSizeRejected("time step collapsed below resolution");
            const CnStepper stepper(op, dt);
            reaction_half(dt / 2.0);
            stepper.step(u, scratch);
            reaction_half(dt / 2.0);
            check_blowup(u);
            remaining -= dt;
        }
        t = t_next;
        record(out_j++);
    }
    return field;
}

std::pair<Field, Field> solve_system_fd(const SystemParams &params,
                                        const BoundaryCondition &bc,
                                        std::span<const double> u0,
                                        std::span<const double> v0,
                                        std::span<const double> t_grid, int nx) {
    bc.validate();
    if (!(params.d_u > 0.0) || !(params.d_v > 0.0))
        throw InvalidParameter("system solver requires positive diffusivities");
    if (nx < 51) throw InvalidParameter("nx must be at least 51");
    if (static_cast<int>(u0.size()) != nx || static_cast<int>(v0.size()) != nx)
        throw GridMismatch("initial fields must hold nx grid samples");

    const auto xs = fd_grid(bc, nx);
    const double h = xs[1] - xs[0];
    const auto op_u = build_operator(params.d_u, 0.0, bc, nx);
    const auto op_v = build_operator(params.d_v, 0.0, bc, nx);

    std::vector<double> u(u0.begin(), u0.end()), v(v0.begin(), v0.end());

    Field fu, fv;
    fu.x = fv.x = xs;
    fu.t.assign(t_grid.begin(), t_grid.end());
    fv.t = fu.t;
    fu.values.setZero(nx, static_cast<Eigen::Index>(t_grid.size()));
    fv.values.setZero(nx, static_cast<Eigen::Index>(t_grid.size()));

    auto record = [&](Eigen::Index j) {
        for (int i = 0; i < nx; ++i) {
            fu.values(i, j) = u[static_cast<std::size_t>(i)];
            fv.values(i, j) = v[static_cast<std::size_t>(i)];
        }
    };

    const double coupling =
        std::max(std::abs(params.a11) + std::abs(params.a12),
                 std::abs(params.a21) + std::abs(params.a22));

    auto coupling_half = [&](double dt_half) {
        if (2.0 * dt_half * coupling > 1.0)
            throw StepSizeRejected("explicit coupling step violates the stability bound");
        std::vector<double> ku(static_cast<std::size_t>(nx)), kv(static_cast<std::size_t>(nx));
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            ku[k] = params.a11 * u[k] - params.a12 * v[k];
            kv[k] = -params.a21 * u[k] + params.a22 * v[k];
        }
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = static_cast<std::size_t>(i);
            const double um = u[k] + dt_half * ku[k];
            const double vm = v[k] + dt_half * kv[k];
            const double ku2 = params.a11 * um - params.a12 * vm;
            const double kv2 = -params.a21 * um + params.a22 * vm;
            u[k] += dt_half / 2.0 * (ku[k] + ku2);
            v[k] += dt_half / 2.0 * (kv[k] + kv2);
        }
        if (bc.kind == BcKind::Dirichlet) {
            u.front() = u.back() = 0.0;
            v.front() = v.back() = 0.0;
        }
    };

    double t = t_grid[0];
    Eigen::Index out_j = 0;
    record(out_j++);
    std::vector<double> scratch;
    for (std::size_t j = 1; j < t_grid.size(); ++j) {
        const double span = t_grid[j] - t;
        if (!(span > 0.0)) throw InvalidParameter("time grid must be strictly increasing");
        double dt_target = h;
        if (coupling > 0.0) dt_target = std::min(dt_target, 0.5 / coupling);
        const int n_sub = std::max(1, static_cast<int>(std::ceil(span / dt_target)));
        const double dt = span / n_sub;
        const CnStepper step_u(op_u, dt), step_v(op_v, dt);
        for (int s = 0; s < n_sub; ++s) {
            coupling_half(dt / 2.0);
            step_u.step(u, scratch);
            step_v.step(v, scratch);
            coupling_half(dt / 2.0);
            check_blowup(u);
            check_blowup(v);
        }
        t = t_grid[j];
        record(out_j++);
    }
    return {fu, fv};
}

double divergence_metric(const Field &f1, const Field &f2) {
    if (f1.x.size() != f2.x.size() || f1.t.size() != f2.t.size())
        throw GridMismatch("field grids differ in size");
    for (std::size_t i = 0; i < f1.x.size(); ++i)
        if (f1.x[i] != f2.x[i]) throw GridMismatch("field x grids differ");
    for (std::size_t j = 0; j < f1.t.size(); ++j)
        if (f1.t[j] != f2.t[j]) throw GridMismatch("field t grids differ");
    return (f1.values - f2.values).cwiseAbs().maxCoeff();
}

} // namespace pdeident
