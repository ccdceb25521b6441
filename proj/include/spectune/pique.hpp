#pragma once

#include "spectune/errors.hpp"
#include "spectune/image.hpp"

#include <vector>

namespace spectune {

struct PiqueConfig {
    int block_size = 16;                // n
    int segment_length = 6;             // edge segment length, must stay below block_size
    double uniform_threshold = 0.1;     // variance split between uniform and active blocks
    double segment_std_threshold = 0.1; // flat-segment threshold for the distortion test
    double mscn_stability = 1.0;        // denominator constant on the [0,255] scale
    double score_stability = 1.0;       // additive constant in the final ratio
    int window_half_extent = 3;         // K = L, window spans 2K+1 pixels
};

void validate(const PiqueConfig& config);

enum class BlockLabel { Uniform, SpatiallyActive };

struct BlockAnalysis {
    BlockLabel label = BlockLabel::Uniform;
    double mscn_variance = 0.0;
    bool distorted = false;
    bool noisy = false;
    double score = 0.0; // D_k, only nonzero for active blocks
    int row0 = 0;       // top-left pixel of the block inside the full image
    int col0 = 0;
};

struct PiqueBreakdown {
    std::vector<BlockAnalysis> blocks; // row-major block order
    int uniform_count = 0;
    int active_count = 0;
    double score_sum = 0.0; // sum of D_k over active blocks
    double score = 100.0;   // final value on the 0..100 scale
};

// Circularly symmetric Gaussian weights on a (2K+1)^2 stencil, unit sum,
// reaching three standard deviations at the boundary.
Eigen::MatrixXd gaussian_window(int half_extent);

// Mean-subtracted contrast-normalized field of the image as given (no
// rescaling here); boundaries are handled by mirror reflection.
Eigen::MatrixXd mscn(const GrayImage& image, const PiqueConfig& config = {});

// Population variance over all entries of a block.
double block_variance(const Eigen::MatrixXd& mscn_block);

// True when any length-m_seg run on one of the four block edges is flatter
// than t_std.
bool noticeable_distortion(const Eigen::MatrixXd& block, int m_seg, double t_std);

// Compares the spread of the two central columns against the surround.
bool noise_criterion(const Eigen::MatrixXd& block);

// Piecewise per-block score from the two criteria.
double block_score(bool distorted, bool noisy, double nu_k);

// Full score: min-max rescale to [0,255], MSCN, boundary-trimmed complete
// blocks, per-block evidence, final ratio scaled to 0..100 (lower is better).
double pique_score(const GrayImage& image, const PiqueConfig& config = {});

// Same computation with per-block bookkeeping exposed.
PiqueBreakdown pique_breakdown(const GrayImage& image, const PiqueConfig& config = {});

} // namespace spectune
