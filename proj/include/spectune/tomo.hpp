#pragma once

#include "spectune/errors.hpp"
#include "spectune/image.hpp"

#include <complex>
#include <vector>

namespace spectune {

struct Sinogram {
    Eigen::VectorXd angles;  // radians, strictly increasing within [0, pi)
    Eigen::VectorXd offsets; // equispaced detector positions in pixel units, centered on 0
    Eigen::MatrixXd data;    // one row per angle, one column per offset
};

void validate(const Sinogram& sino);

struct FilterParams {
    double rho = 1.0;    // Butterworth order, in [1, 10]
    double omega0 = 1.0; // critical frequency as a fraction of Nyquist, in (0, 1]
};

void validate(const FilterParams& params);

// Standard head phantom on a size x size canvas, intensities in [0, 1].
GrayImage shepp_logan(int size);

struct Sphere {
    double x = 0.0; // center in normalized coordinates, lateral extent [-1, 1]
    double y = 0.0;
    double z = 0.0;
    double radius = 0.0;
    double intensity = 0.0;
};

// Cylinder of the given background intensity with spherical inserts, voxelized
// on isotropic spacing (z pitch equals the lateral pitch, slab centered on 0).
Volume sphere_phantom(int size, int z_slices, const std::vector<Sphere>& spheres,
                      double background, double cylinder_radius = 0.9);

// Hot-background quality-assurance preset: six inserts on a ring, alternating
// cold (0) and hot (5x background).
std::vector<Sphere> jaszczak_spheres();
Volume jaszczak_phantom(int size, int z_slices);

// Line-integral projections at num_angles equispaced angles over [0, pi),
// sampled by bilinear interpolation at unit steps along each ray. Offsets span
// the image diagonal at unit pitch.
Sinogram radon(const GrayImage& image, int num_angles);

// Ramp-times-Butterworth frequency response on a Nyquist-normalized axis.
Eigen::VectorXd butterworth_ramp(const FilterParams& params, const Eigen::VectorXd& frequencies);

// Frequency-domain row filtering: zero-pad to the next power of two at or above
// twice the offset count, apply the response symmetrically, transform back.
Sinogram filter_sinogram(const Sinogram& sino, const FilterParams& params);

// Adjoint smear: accumulates interpolated sinogram samples over all angles,
// scaled by pi / num_angles.
GrayImage back_project(const Sinogram& sino, int size);

// Filtered back-projection, exactly back_project(filter_sinogram(...), size).
GrayImage fbp(const Sinogram& sino, const FilterParams& params, int size);

// Slice-wise FBP over a stack of sinograms sharing one geometry.
Volume fbp_volume(const std::vector<Sinogram>& sinos, const FilterParams& params, int size);

namespace detail {

// In-place iterative radix-2 transform; size must be a power of two. The
// inverse applies the 1/N scaling.
void fft_radix2(std::vector<std::complex<double>>& values, bool inverse);

std::size_t next_pow2(std::size_t n);

} // namespace detail

} // namespace spectune
