#pragma once

#include <Eigen/Dense>

#include "spectune/errors.hpp"

namespace spectune {

using Point = Eigen::VectorXd;
/// A set of points, one per row.
using Points = Eigen::MatrixXd;

enum class KernelFamily { Gaussian, Matern };

/// Radial positive definite kernel with shape parameter epsilon.
///   Gaussian:  k(x, y) = exp(-(eps * |x - y|)^2)
///   Matern:    k(x, y) = exp(-eps * |x - y|)
/// Both families have unit diagonal: k(x, x) = 1.
struct Kernel {
    KernelFamily family = KernelFamily::Matern;
    double epsilon = 0.1;

    Kernel() = default;
    Kernel(KernelFamily f, double eps);

    /// Kernel value from the distance r = |x - y| alone.
    double from_distance(double r) const;
};

/// Scattered data: sites (one per row) with one value per site.
struct SampleSet {
    Points sites;
    Eigen::VectorXd values;
};

/// Throws input_error unless sites are pairwise distinct and the value count
/// matches the site count.
void validate(const SampleSet& data);

/// Kernel expansion f(x) = sum_i coefficients[i] * k(x, centers.row(i)).
struct Interpolant {
    Kernel kernel;
    Points centers;               // may have zero rows (the zero function)
    Eigen::VectorXd coefficients;
};

double eval_kernel(const Kernel& kernel, const Point& x, const Point& y);

/// Full kernel matrix K_ij = k(x_i, x_j). Throws input_error on duplicate sites.
Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Points& sites);

/// Solves (K + jitter*I) c = values. With jitter = 0 this is exact
/// interpolation. If the factorization fails, the diagonal jitter is escalated
/// through 1e-12, 1e-10, 1e-8 before a conditioning_error is thrown.
Interpolant fit_interpolant(const Kernel& kernel, const SampleSet& data, double jitter = 0.0);

/// Weighted kernel sum at the query point; 0 for an empty interpolant.
double eval_interpolant(const Interpolant& model, const Point& query);

/// Power function P_{k,X}(x): worst-case pointwise error factor at the query.
/// Equals sqrt(k(x,x)) for empty sites and 0 at the sites themselves.
double power_function(const Kernel& kernel, const Points& sites, const Point& query);

/// Squared power function (the radicand), clamped to 0 when it dips below
/// zero by no more than 1e-10; beyond that a conditioning_error is thrown.
double power_function_squared(const Kernel& kernel, const Points& sites, const Point& query);

/// Native-space norm of the interpolant: sqrt(c^T K c) over its centers.
double rkhs_norm_estimate(const Interpolant& model);

/// Largest hole: max over domain_samples of the distance to the nearest site.
double fill_distance(const Points& sites, const Points& domain_samples);

/// Half the minimum pairwise distance between sites (at least two required).
double separation_distance(const Points& sites);

namespace detail {

/// Lower Cholesky factor of K + jitter*I, where jitter walked up the ladder
/// {requested, 1e-12, 1e-10, 1e-8} until the factorization succeeded.
struct CholeskyFactor {
    Eigen::MatrixXd lower;
    double jitter_used = 0.0;
};

CholeskyFactor factor_spd(const Eigen::MatrixXd& matrix, double requested_jitter);

/// Squared power function evaluated through an existing factor of the site
/// kernel matrix. kx is the kernel column (k(query, x_i))_i.
double power_squared_from_factor(const CholeskyFactor& factor, const Eigen::VectorXd& kx,
                                 double k_query_query);

} // namespace detail

} // namespace spectune
