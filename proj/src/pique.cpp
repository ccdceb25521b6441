#include "spectune/pique.hpp"

#include <cmath>

namespace spectune {

void validate(const PiqueConfig& config) {
    if (config.block_size < 4)
        throw input_error("pique config: block size must be at least 4");
    if (config.segment_length < 1 || config.segment_length >= config.block_size)
        throw input_error("pique config: segment length must be in [1, block_size)");
    if (!(config.uniform_threshold > 0.0))
        throw input_error("pique config: uniform threshold must be positive");
    if (!(config.segment_std_threshold > 0.0))
        throw input_error("pique config: segment std threshold must be positive");
    if (!(config.mscn_stability > 0.0) || !(config.score_stability > 0.0))
        throw input_error("pique config: stability constants must be positive");
    if (config.window_half_extent < 1)
        throw input_error("pique config: window half extent must be at least 1");
}

Eigen::MatrixXd gaussian_window(int half_extent) {
    if (half_extent < 1)
        throw input_error("gaussian_window: half extent must be at least 1");
    const int size = 2 * half_extent + 1;
    const double sigma = half_extent / 3.0;
    Eigen::MatrixXd w(size, size);
    for (int k = -half_extent; k <= half_extent; ++k)
        for (int l = -half_extent; l <= half_extent; ++l)
            w(k + half_extent, l + half_extent) =
                std::exp(-(k * k + l * l) / (2.0 * sigma * sigma));
    w /= w.sum();
    return w;
}

namespace {

// Mirror reflection that repeats the edge pixel (index -1 maps back to 0).
inline int mirror(int idx, int size) {
    if (idx < 0)
        return -idx - 1;
    if (idx >= size)
        return 2 * size - 1 - idx;
    return idx;
}

double stddev_of(const std::vector<double>& values) {
    if (values.empty())
        return 0.0;
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

} // namespace

Eigen::MatrixXd mscn(const GrayImage& image, const PiqueConfig& config) {
    validate(config);
    const int rows = static_cast<int>(image.rows());
    const int cols = static_cast<int>(image.cols());
    const int half = config.window_half_extent;
    if (rows < 2 * half + 1 || cols < 2 * half + 1)
        throw input_error("mscn: image smaller than the weighting window");
    if (!image.allFinite())
        throw input_error("mscn: image contains non-finite values");

    const Eigen::MatrixXd w = gaussian_window(half);
    Eigen::MatrixXd out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            double mu = 0.0;
            for (int k = -half; k <= half; ++k)
                for (int l = -half; l <= half; ++l)
                    mu += w(k + half, l + half) * image(mirror(i + k, rows), mirror(j + l, cols));
            double var = 0.0;
            for (int k = -half; k <= half; ++k)
                for (int l = -half; l <= half; ++l) {
                    const double d = image(mirror(i + k, rows), mirror(j + l, cols)) - mu;
                    var += w(k + half, l + half) * d * d;
                }
            out(i, j) = (image(i, j) - mu) / (std::sqrt(var) + config.mscn_stability);
        }
    }
    return out;
}

double block_variance(const Eigen::MatrixXd& mscn_block) {
    const double n2 = static_cast<double>(mscn_block.size());
    const double mean = mscn_block.sum() / n2;
    double ss = 0.0;
    for (Eigen::Index j = 0; j < mscn_block.cols(); ++j)
        for (Eigen::Index i = 0; i < mscn_block.rows(); ++i) {
            const double d = mscn_block(i, j) - mean;
            ss += d * d;
        }
    return ss / n2;
}

bool noticeable_distortion(const Eigen::MatrixXd& block, int m_seg, double t_std) {
    const int n = static_cast<int>(block.rows());
    if (block.cols() != n)
        throw input_error("noticeable_distortion: block must be square");
    if (m_seg > n)
        throw input_error("noticeable_distortion: segment longer than the edge");

    std::vector<Eigen::VectorXd> edges;
    edges.push_back(block.row(0).transpose());
    edges.push_back(block.row(n - 1).transpose());
    edges.push_back(block.col(0));
    edges.push_back(block.col(n - 1));

    std::vector<double> segment(static_cast<std::size_t>(m_seg));
    for (const auto& edge : edges) {
        for (int q = 0; q + m_seg < n; ++q) { // n - m_seg starting positions
            for (int t = 0; t < m_seg; ++t)
                segment[static_cast<std::size_t>(t)] = edge[q + t];
            if (stddev_of(segment) < t_std)
                return true;
        }
    }
    return false;
}

bool noise_criterion(const Eigen::MatrixXd& block) {
    const int n = static_cast<int>(block.rows());
    if (block.cols() != n)
        throw input_error("noise_criterion: block must be square");
    if (n < 4)
        throw input_error("noise_criterion: block too small for a center/surround split");

    const int cen_lo = n / 2 - 1;
    const int cen_hi = n / 2;
    std::vector<double> center, surround, all;
    all.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double v = block(i, j);
            all.push_back(v);
            if (j == cen_lo || j == cen_hi)
                center.push_back(v);
            else
                surround.push_back(v);
        }
    const double sigma_k = stddev_of(all);
    const double sigma_sur = stddev_of(surround);
    if (sigma_sur == 0.0)
        return false;
    const double ratio = stddev_of(center) / sigma_sur;
    const double denom = std::max(ratio, sigma_k);
    if (denom == 0.0)
        return false;
    const double beta = std::abs(ratio - sigma_k) / denom;
    return sigma_k > 2.0 * beta;
}

double block_score(bool distorted, bool noisy, double nu_k) {
    if (nu_k < 0.0)
        throw input_error("block_score: variance must be nonnegative");
    const double nu = std::min(nu_k, 1.0);
    if (distorted && noisy)
        return 1.0;
    if (noisy)
        return nu;
    if (distorted)
        return 1.0 - nu;
    return 0.0;
}

PiqueBreakdown pique_breakdown(const GrayImage& image, const PiqueConfig& config) {
    validate(config);
    if (!image.allFinite())
        throw input_error("pique: image contains non-finite values");

    // Affine rescale to [0,255]; a constant image maps to all zeros.
    const double lo = image.minCoeff();
    const double hi = image.maxCoeff();
    GrayImage scaled;
    if (hi > lo)
        scaled = (image.array() - lo) * (255.0 / (hi - lo));
    else
        scaled = GrayImage::Zero(image.rows(), image.cols());

    const Eigen::MatrixXd field = mscn(scaled, config);

    const int trim = 2 * config.window_half_extent + 1;
    const int n = config.block_size;
    const int usable_rows = static_cast<int>(field.rows()) - 2 * trim;
    const int usable_cols = static_cast<int>(field.cols()) - 2 * trim;
    const int blocks_down = usable_rows / n;
    const int blocks_across = usable_cols / n;
    if (blocks_down < 1 || blocks_across < 1)
        throw input_error("pique: no complete block fits after boundary trimming");

    PiqueBreakdown result;
    for (int bi = 0; bi < blocks_down; ++bi) {
        for (int bj = 0; bj < blocks_across; ++bj) {
            BlockAnalysis block;
            block.row0 = trim + bi * n;
            block.col0 = trim + bj * n;
            const Eigen::MatrixXd view = field.block(block.row0, block.col0, n, n);
            block.mscn_variance = block_variance(view);
            if (block.mscn_variance < config.uniform_threshold) {
                block.label = BlockLabel::Uniform;
                ++result.uniform_count;
            } else {
                block.label = BlockLabel::SpatiallyActive;
                ++result.active_count;
                block.distorted = noticeable_distortion(view, config.segment_length,
                                                        config.segment_std_threshold);
                block.noisy = noise_criterion(view);
                block.score = block_score(block.distorted, block.noisy, block.mscn_variance);
                result.score_sum += block.score;
            }
            result.blocks.push_back(block);
        }
    }
    result.score = 100.0 * (result.score_sum + config.score_stability) /
                   (static_cast<double>(result.active_count) + config.score_stability);
    return result;
}

double pique_score(const GrayImage& image, const PiqueConfig& config) {
    return pique_breakdown(image, config).score;
}

} // namespace spectune
