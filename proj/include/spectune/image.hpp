#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spectune/errors.hpp"

namespace spectune {

/// 2D luminance field. Rows are image rows (height M), columns are image
/// columns (width N); element (i, j) is the pixel at row i, column j.
using GrayImage = Eigen::MatrixXd;

/// Stack of equally sized z-slices.
struct Volume {
    std::vector<GrayImage> slices;

    int nx() const { return slices.empty() ? 0 : static_cast<int>(slices.front().cols()); }
    int ny() const { return slices.empty() ? 0 : static_cast<int>(slices.front().rows()); }
    int nz() const { return static_cast<int>(slices.size()); }

    void validate() const {
        for (const auto& s : slices) {
            if (s.rows() != slices.front().rows() || s.cols() != slices.front().cols())
                throw input_error("volume slices must share dimensions");
            if (!s.allFinite())
                throw input_error("volume contains non-finite voxels");
        }
    }
};

} // namespace spectune
