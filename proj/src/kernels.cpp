#include "spectune/kernels.hpp"

#include <cmath>
#include <limits>

namespace spectune {

Kernel::Kernel(KernelFamily f, double eps) : family(f), epsilon(eps) {
    if (!(eps > 0.0))
        throw input_error("kernel shape parameter must be positive");
}

double Kernel::from_distance(double r) const {
    if (family == KernelFamily::Gaussian) {
        const double t = epsilon * r;
        return std::exp(-t * t);
    }
    return std::exp(-epsilon * r);
}

void validate(const SampleSet& data) {
    if (data.sites.rows() != data.values.size())
        throw input_error("sample set: site count and value count differ");
    const Eigen::Index n = data.sites.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if ((data.sites.row(i) - data.sites.row(j)).norm() == 0.0)
                throw input_error("sample set: duplicate sites");
}

double eval_kernel(const Kernel& kernel, const Point& x, const Point& y) {
    if (x.size() != y.size())
        throw input_error("eval_kernel: dimension mismatch");
    return kernel.from_distance((x - y).norm());
}

Eigen::MatrixXd kernel_matrix(const Kernel& kernel, const Points& sites) {
    const Eigen::Index n = sites.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = (sites.row(i) - sites.row(j)).norm();
            if (r == 0.0)
                throw input_error("kernel_matrix: duplicate sites make the matrix singular");
            const double v = kernel.from_distance(r);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

namespace detail {

namespace {

double condition_estimate(const Eigen::MatrixXd& matrix) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        return std::numeric_limits<double>::infinity();
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0)
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

} // namespace

CholeskyFactor factor_spd(const Eigen::MatrixXd& matrix, double requested_jitter) {
    if (requested_jitter < 0.0)
        throw input_error("jitter must be nonnegative");
    const double ladder[] = {requested_jitter, 1e-12, 1e-10, 1e-8};
    for (double jitter : ladder) {
        if (jitter < requested_jitter)
            continue;
        Eigen::MatrixXd shifted = matrix;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success)
            return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
    throw conditioning_error("kernel matrix not positive definite after jitter ladder",
                             condition_estimate(matrix));
}

double power_squared_from_factor(const CholeskyFactor& factor, const Eigen::VectorXd& kx,
                                 double k_query_query) {
    const Eigen::VectorXd y =
        factor.lower.triangularView<Eigen::Lower>().solve(kx);
    double radicand = k_query_query - y.squaredNorm();
    if (radicand < -1e-10)
        throw conditioning_error("power function radicand below tolerance", -radicand);
    if (radicand < 0.0)
        radicand = 0.0;
    return radicand;
}

} // namespace detail

Interpolant fit_interpolant(const Kernel& kernel, const SampleSet& data, double jitter) {
    validate(data);
    if (data.sites.rows() == 0)
        return Interpolant{kernel, Points(0, 0), Eigen::VectorXd(0)};
    const Eigen::MatrixXd k = kernel_matrix(kernel, data.sites);
    const detail::CholeskyFactor factor = detail::factor_spd(k, jitter);
    const auto lower = factor.lower.triangularView<Eigen::Lower>();
    Eigen::VectorXd c = lower.solve(data.values);
    lower.transpose().solveInPlace(c);
    return Interpolant{kernel, data.sites, std::move(c)};
}

double eval_interpolant(const Interpolant& model, const Point& query) {
    if (model.centers.rows() == 0)
        return 0.0;
    if (model.centers.cols() != query.size())
        throw input_error("eval_interpolant: dimension mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < model.centers.rows(); ++i) {
        const double r = (model.centers.row(i).transpose() - query).norm();
        sum += model.coefficients[i] * model.kernel.from_distance(r);
    }
    return sum;
}

double power_function_squared(const Kernel& kernel, const Points& sites, const Point& query) {
    const double kqq = kernel.from_distance(0.0);
    if (sites.rows() == 0)
        return kqq;
    if (sites.cols() != query.size())
        throw input_error("power_function: dimension mismatch");
    const Eigen::MatrixXd k = kernel_matrix(kernel, sites);
    const detail::CholeskyFactor factor = detail::factor_spd(k, 0.0);
    Eigen::VectorXd kx(sites.rows());
    for (Eigen::Index i = 0; i < sites.rows(); ++i)
        kx[i] = kernel.from_distance((sites.row(i).transpose() - query).norm());
    return detail::power_squared_from_factor(factor, kx, kqq);
}

double power_function(const Kernel& kernel, const Points& sites, const Point& query) {
    return std::sqrt(power_function_squared(kernel, sites, query));
}

double rkhs_norm_estimate(const Interpolant& model) {
    if (model.centers.rows() == 0)
        return 0.0;
    const Eigen::MatrixXd k = kernel_matrix(model.kernel, model.centers);
    const double sq = model.coefficients.dot(k * model.coefficients);
    return std::sqrt(std::max(0.0, sq));
}

double fill_distance(const Points& sites, const Points& domain_samples) {
    if (sites.rows() == 0)
        throw input_error("fill_distance: empty site set");
    if (domain_samples.rows() == 0)
        throw input_error("fill_distance: empty domain sample");
    if (sites.cols() != domain_samples.cols())
        throw input_error("fill_distance: dimension mismatch");
    double worst = 0.0;
    for (Eigen::Index s = 0; s < domain_samples.rows(); ++s) {
        double nearest = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < sites.rows(); ++i)
            nearest = std::min(nearest, (domain_samples.row(s) - sites.row(i)).norm());
        worst = std::max(worst, nearest);
    }
    return worst;
}

double separation_distance(const Points& sites) {
    if (sites.rows() < 2)
        throw input_error("separation_distance: needs at least two sites");
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sites.rows(); ++i)
        for (Eigen::Index j = i + 1; j < sites.rows(); ++j)
            smallest = std::min(smallest, (sites.row(i) - sites.row(j)).norm());
    return 0.5 * smallest;
}

} // namespace spectune
