#include "spectune/tomo.hpp"

#include <cmath>
#include <numbers>

namespace spectune {

void validate(const Sinogram& sino) {
    const Eigen::Index a = sino.angles.size();
    const Eigen::Index s = sino.offsets.size();
    if (a < 1 || s < 2)
        throw input_error("sinogram: needs at least one angle and two offsets");
    if (sino.data.rows() != a || sino.data.cols() != s)
        throw input_error("sinogram: data shape must be angles x offsets");
    for (Eigen::Index i = 0; i + 1 < a; ++i)
        if (!(sino.angles[i] < sino.angles[i + 1]))
            throw input_error("sinogram: angles must be strictly increasing");
    if (sino.angles[0] < 0.0 || sino.angles[a - 1] >= std::numbers::pi)
        throw input_error("sinogram: angles must lie in [0, pi)");
    const double pitch = sino.offsets[1] - sino.offsets[0];
    for (Eigen::Index j = 0; j + 1 < s; ++j)
        if (std::abs(sino.offsets[j + 1] - sino.offsets[j] - pitch) > 1e-9)
            throw input_error("sinogram: offsets must be equispaced");
    if (std::abs(sino.offsets[0] + sino.offsets[s - 1]) > 1e-9 * std::abs(pitch) * s)
        throw input_error("sinogram: offsets must be centered on zero");
    if (!sino.data.allFinite())
        throw input_error("sinogram: data contains non-finite values");
}

void validate(const FilterParams& params) {
    if (!(params.rho >= 1.0 && params.rho <= 10.0))
        throw input_error("filter params: order must lie in [1, 10]");
    if (!(params.omega0 > 0.0 && params.omega0 <= 1.0))
        throw input_error("filter params: critical frequency must lie in (0, 1]");
}

namespace {

struct Ellipse {
    double value, a, b, x0, y0, phi_deg;
};

// Standard head-phantom geometry with the toned-down intensity variant, so the
// composite field stays inside [0, 1].
constexpr Ellipse kHeadEllipses[] = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
};

inline double bilinear_at(const GrayImage& image, double row, double col) {
    const int size_r = static_cast<int>(image.rows());
    const int size_c = static_cast<int>(image.cols());
    const int i0 = static_cast<int>(std::floor(row));
    const int j0 = static_cast<int>(std::floor(col));
    if (i0 < -1 || i0 >= size_r || j0 < -1 || j0 >= size_c)
        return 0.0;
    const double fr = row - i0;
    const double fc = col - j0;
    auto at = [&](int i, int j) -> double {
        if (i < 0 || i >= size_r || j < 0 || j >= size_c)
            return 0.0;
        return image(i, j);
    };
    return (1.0 - fr) * (1.0 - fc) * at(i0, j0) + (1.0 - fr) * fc * at(i0, j0 + 1) +
           fr * (1.0 - fc) * at(i0 + 1, j0) + fr * fc * at(i0 + 1, j0 + 1);
}

} // namespace

GrayImage shepp_logan(int size) {
    if (size < 32)
        throw input_error("shepp_logan: size must be at least 32");
    GrayImage image = GrayImage::Zero(size, size);
    const double center = (size - 1) / 2.0;
    const double scale = 2.0 / size;
    for (const Ellipse& e : kHeadEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        for (int i = 0; i < size; ++i) {
            const double y = (center - i) * scale;
            for (int j = 0; j < size; ++j) {
                const double x = (j - center) * scale;
                const double dx = x - e.x0;
                const double dy = y - e.y0;
                const double xr = dx * c + dy * s;
                const double yr = -dx * s + dy * c;
                if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0)
                    image(i, j) += e.value;
            }
        }
    }
    // The summed intensities cancel to 0 in the ventricles; floor away the
    // residual rounding so the advertised [0, 1] range holds exactly.
    return image.cwiseMax(0.0);
}

Volume sphere_phantom(int size, int z_slices, const std::vector<Sphere>& spheres,
                      double background, double cylinder_radius) {
    if (size < 8)
        throw input_error("sphere_phantom: size must be at least 8");
    if (z_slices < 1)
        throw input_error("sphere_phantom: needs at least one slice");
    if (background < 0.0)
        throw input_error("sphere_phantom: background must be nonnegative");
    if (!(cylinder_radius > 0.0 && cylinder_radius <= 1.0))
        throw input_error("sphere_phantom: cylinder radius must lie in (0, 1]");
    for (const Sphere& sp : spheres) {
        if (sp.radius <= 0.0)
            throw input_error("sphere_phantom: sphere radius must be positive");
        if (std::hypot(sp.x, sp.y) + sp.radius > cylinder_radius)
            throw input_error("sphere_phantom: sphere leaves the cylindrical field of view");
    }
    for (std::size_t i = 0; i < spheres.size(); ++i)
        for (std::size_t j = i + 1; j < spheres.size(); ++j) {
            const double dx = spheres[i].x - spheres[j].x;
            const double dy = spheres[i].y - spheres[j].y;
            const double dz = spheres[i].z - spheres[j].z;
            if (std::sqrt(dx * dx + dy * dy + dz * dz) < spheres[i].radius + spheres[j].radius)
                throw input_error("sphere_phantom: spheres overlap");
        }

    const double center = (size - 1) / 2.0;
    const double z_center = (z_slices - 1) / 2.0;
    const double pitch = 2.0 / size; // isotropic, shared by the z axis

    Volume volume;
    volume.slices.reserve(static_cast<std::size_t>(z_slices));
    for (int k = 0; k < z_slices; ++k) {
        const double z = (k - z_center) * pitch;
        GrayImage slice = GrayImage::Zero(size, size);
        for (int i = 0; i < size; ++i) {
            const double y = (i - center) * pitch;
            for (int j = 0; j < size; ++j) {
                const double x = (j - center) * pitch;
                if (x * x + y * y > cylinder_radius * cylinder_radius)
                    continue;
                double value = background;
                for (const Sphere& sp : spheres) {
                    const double dx = x - sp.x;
                    const double dy = y - sp.y;
                    const double dz = z - sp.z;
                    if (dx * dx + dy * dy + dz * dz <= sp.radius * sp.radius) {
                        value = sp.intensity;
                        break;
                    }
                }
                slice(i, j) = value;
            }
        }
        volume.slices.push_back(std::move(slice));
    }
    return volume;
}

std::vector<Sphere> jaszczak_spheres() {
    // Six inserts on a ring of radius 0.5, alternating cold and 5:1 hot.
    const double radii[] = {0.22, 0.10, 0.19, 0.13, 0.16, 0.11};
    std::vector<Sphere> spheres;
    for (int i = 0; i < 6; ++i) {
        const double angle = i * std::numbers::pi / 3.0;
        Sphere sp;
        sp.x = 0.5 * std::cos(angle);
        sp.y = 0.5 * std::sin(angle);
        sp.z = 0.0;
        sp.radius = radii[i];
        sp.intensity = (i % 2 == 0) ? 0.0 : 5.0;
        spheres.push_back(sp);
    }
    return spheres;
}

Volume jaszczak_phantom(int size, int z_slices) {
    return sphere_phantom(size, z_slices, jaszczak_spheres(), 1.0);
}

Sinogram radon(const GrayImage& image, int num_angles) {
    if (image.rows() != image.cols())
        throw input_error("radon: image must be square");
    if (image.rows() < 2)
        throw input_error("radon: image too small");
    if (num_angles < 1)
        throw input_error("radon: needs at least one angle");
    if (!image.allFinite())
        throw input_error("radon: image contains non-finite values");

    const int size = static_cast<int>(image.rows());
    const int bins = static_cast<int>(std::ceil(size * std::numbers::sqrt2));
    const double center = (size - 1) / 2.0;
    const double half_span = (bins - 1) / 2.0;

    Sinogram sino;
    sino.angles = Eigen::VectorXd(num_angles);
    for (int a = 0; a < num_angles; ++a)
        sino.angles[a] = a * std::numbers::pi / num_angles;
    sino.offsets = Eigen::VectorXd(bins);
    for (int j = 0; j < bins; ++j)
        sino.offsets[j] = j - half_span;
    sino.data = Eigen::MatrixXd::Zero(num_angles, bins);

    for (int a = 0; a < num_angles; ++a) {
        const double c = std::cos(sino.angles[a]);
        const double s = std::sin(sino.angles[a]);
        for (int j = 0; j < bins; ++j) {
            const double offset = sino.offsets[j];
            double sum = 0.0;
            for (int k = 0; k < bins; ++k) {
                const double t = k - half_span;
                const double x = offset * c - t * s;
                const double y = offset * s + t * c;
                sum += bilinear_at(image, y + center, x + center);
            }
            sino.data(a, j) = sum;
        }
    }
    return sino;
}

Eigen::VectorXd butterworth_ramp(const FilterParams& params, const Eigen::VectorXd& frequencies) {
    validate(params);
    Eigen::VectorXd response(frequencies.size());
    for (Eigen::Index i = 0; i < frequencies.size(); ++i) {
        const double w = std::abs(frequencies[i]);
        response[i] = w / std::sqrt(1.0 + std::pow(w / params.omega0, 2.0 * params.rho));
    }
    return response;
}

namespace detail {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

void fft_radix2(std::vector<std::complex<double>>& values, bool inverse) {
    const std::size_t n = values.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw input_error("fft_radix2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j |= bit;
        if (i < j)
            std::swap(values[i], values[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double step =
            (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(step), std::sin(step));
        for (std::size_t block = 0; block < n; block += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = values[block + k];
                const std::complex<double> v = values[block + k + len / 2] * w;
                values[block + k] = u + v;
                values[block + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : values)
            x /= static_cast<double>(n);
}

} // namespace detail

Sinogram filter_sinogram(const Sinogram& sino, const FilterParams& params) {
    validate(sino);
    validate(params);
    const Eigen::Index bins = sino.offsets.size();
    const std::size_t padded = detail::next_pow2(2 * static_cast<std::size_t>(bins));

    // Bin k of the transform sits at |f| = min(k, N-k)/N cycles per sample,
    // i.e. 2*min(k, N-k)/N of Nyquist. The extra 0.5 converts the response from
    // the Nyquist-normalized axis back to cycles per sample, which is the axis
    // the discrete integral approximates.
    Eigen::VectorXd omega(static_cast<Eigen::Index>(padded));
    for (std::size_t k = 0; k < padded; ++k) {
        const std::size_t folded = std::min(k, padded - k);
        omega[static_cast<Eigen::Index>(k)] =
            2.0 * static_cast<double>(folded) / static_cast<double>(padded);
    }
    const Eigen::VectorXd response = butterworth_ramp(params, omega) * 0.5;

    Sinogram out;
    out.angles = sino.angles;
    out.offsets = sino.offsets;
    out.data = Eigen::MatrixXd(sino.data.rows(), bins);

    std::vector<std::complex<double>> row(padded);
    for (Eigen::Index a = 0; a < sino.data.rows(); ++a) {
        for (std::size_t k = 0; k < padded; ++k)
            row[k] = k < static_cast<std::size_t>(bins)
                         ? std::complex<double>(sino.data(a, static_cast<Eigen::Index>(k)), 0.0)
                         : std::complex<double>(0.0, 0.0);
        detail::fft_radix2(row, false);
        for (std::size_t k = 0; k < padded; ++k)
            row[k] *= response[static_cast<Eigen::Index>(k)];
        detail::fft_radix2(row, true);

        double peak = sino.data.row(a).cwiseAbs().maxCoeff();
        double residue = 0.0;
        for (std::size_t k = 0; k < static_cast<std::size_t>(bins); ++k) {
            peak = std::max(peak, std::abs(row[k].real()));
            residue = std::max(residue, std::abs(row[k].imag()));
        }
        if (residue > 1e-9 * std::max(peak, 1e-300))
            throw numeric_error("filter_sinogram: imaginary residue beyond tolerance");
        for (Eigen::Index k = 0; k < bins; ++k)
            out.data(a, k) = row[static_cast<std::size_t>(k)].real();
    }
    return out;
}

GrayImage back_project(const Sinogram& sino, int size) {
    validate(sino);
    if (size < 1)
        throw input_error("back_project: size must be positive");

    const Eigen::Index num_angles = sino.angles.size();
    const Eigen::Index bins = sino.offsets.size();
    const double center = (size - 1) / 2.0;
    const double first_offset = sino.offsets[0];

    Eigen::VectorXd cosines(num_angles), sines(num_angles);
    for (Eigen::Index a = 0; a < num_angles; ++a) {
        cosines[a] = std::cos(sino.angles[a]);
        sines[a] = std::sin(sino.angles[a]);
    }

    GrayImage image(size, size);
    for (int i = 0; i < size; ++i) {
        const double y = i - center;
        for (int j = 0; j < size; ++j) {
            const double x = j - center;
            double sum = 0.0;
            for (Eigen::Index a = 0; a < num_angles; ++a) {
                const double s = x * cosines[a] + y * sines[a];
                const double u = s - first_offset;
                const Eigen::Index k0 = static_cast<Eigen::Index>(std::floor(u));
                const double frac = u - static_cast<double>(k0);
                if (k0 >= 0 && k0 + 1 < bins)
                    sum += (1.0 - frac) * sino.data(a, k0) + frac * sino.data(a, k0 + 1);
                else if (k0 == -1)
                    sum += frac * sino.data(a, 0);
                else if (k0 + 1 == bins)
                    sum += (1.0 - frac) * sino.data(a, k0);
            }
            image(i, j) = sum * std::numbers::pi / static_cast<double>(num_angles);
        }
    }
    return image;
}

GrayImage fbp(const Sinogram& sino, const FilterParams& params, int size) {
    return back_project(filter_sinogram(sino, params), size);
}

Volume fbp_volume(const std::vector<Sinogram>& sinos, const FilterParams& params, int size) {
    if (sinos.empty())
        throw input_error("fbp_volume: needs at least one sinogram");
    for (const Sinogram& sino : sinos) {
        if (sino.angles.size() != sinos.front().angles.size() ||
            sino.offsets.size() != sinos.front().offsets.size() ||
            (sino.angles - sinos.front().angles).cwiseAbs().maxCoeff() != 0.0 ||
            (sino.offsets - sinos.front().offsets).cwiseAbs().maxCoeff() != 0.0)
            throw input_error("fbp_volume: sinograms disagree on geometry");
    }
    Volume volume;
    volume.slices.reserve(sinos.size());
    for (const Sinogram& sino : sinos)
        volume.slices.push_back(fbp(sino, params, size));
    return volume;
}

} // namespace spectune
