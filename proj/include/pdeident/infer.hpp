#ifndef PDEIDENT_INFER_HPP
#define PDEIDENT_INFER_HPP

#include "pdeident/operators.hpp"
#include "pdeident/solve.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace pdeident {

/// Spatially correlated Gaussian observation noise: within each time slice
/// Cov(y_i, y_j) = sigma^2 exp(-eta |x_i - x_j|); slices are independent.
struct NoiseModel {
    double sigma = 0.3;
    double eta = 10.0;

    void validate() const;
};

/// Synthetic observations y(x_i, t_j) of a Dirichlet reaction-diffusion
/// solution plus correlated noise.
struct Dataset {
    std::vector<double> x_obs;
    std::vector<double> t_obs;
    Eigen::MatrixXd y; ///< y(i, j) = observation at (x_obs[i], t_obs[j])
    std::uint64_t seed = 0;
    double length = 1.0; ///< domain length of the underlying Dirichlet problem
    OperatorParams truth;
    std::vector<double> truth_coeffs;
    NoiseModel noise;
};

/// Eigenbasis coefficients C_1..C_N of the normalized off-center Gaussian
/// bump  g(x) = (G(x) - G(0)) / (G(l/2) - G(0)),  G(x) = e^{-(x-l/2)^2/(2 w^2)},
/// via adaptive Simpson quadrature to 1e-10 relative accuracy.
EigenExpansionIC gaussian_ic_coefficients(double omega, int n_modes, double length);

/// Sample the exact spectral solution on (x_obs, t_obs) and add one
/// correlated noise draw per time slice, keyed by (seed, slice index).
Dataset generate_dataset(const OperatorParams &A, const EigenExpansionIC &ic,
                         const NoiseModel &noise, std::span<const double> x_obs,
                         std::span<const double> t_obs, std::uint64_t seed);

/// Exact Gaussian log-likelihood of the dataset under parameters (c, d) and
/// initial-condition coefficients C, with the given noise model.
double log_likelihood(const Dataset &data, double c, double d,
                      const Eigen::VectorXd &coeffs, const NoiseModel &noise);

/// Profile log-likelihood surface over a (c, d) grid. The initial-condition
/// coefficients are profiled out in closed form (generalized least squares);
/// optionally (eta, sigma) are profiled as well. Values are normalized so
/// the maximum is 0; in95 marks the 95% confidence region
/// (max - loglik <= threshold, threshold = chi^2_2(0.95) / 2 = 2.9957).
struct ProfileSurface {
    std::vector<double> c_grid;
    std::vector<double> d_grid;
    Eigen::MatrixXd loglik; ///< (nc, nd), normalized so max = 0
    Eigen::MatrixXi in95;   ///< 1 inside the confidence region
    double threshold = 2.9957;

    struct Mle {
        double c = 0.0;
        double d = 0.0;
        Eigen::VectorXd coeffs;
        double loglik = 0.0; ///< unnormalized maximum
        double sigma = 0.0, eta = 0.0;
    } mle;

    std::vector<std::pair<int, int>> ill_conditioned; ///< ridge-stabilized nodes
};

ProfileSurface profile_likelihood(const Dataset &data, std::span<const double> c_grid,
                                  std::span<const double> d_grid, const NoiseModel &noise,
                                  int n_modes, bool profile_noise = false);

/// Default grids: c linear in [0, 4] (81 nodes), d log-spaced in [1e-3, 1]
/// (81 nodes).
std::vector<double> default_c_grid();
std::vector<double> default_d_grid();

/// Default observation grids on the unit domain: x in {0, 0.1, ..., 1},
/// t in {0, 0.1, ..., 2}.
std::vector<double> default_x_obs();
std::vector<double> default_t_obs();

} // namespace pdeident

#endif // PDEIDENT_INFER_HPP
