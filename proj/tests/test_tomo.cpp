#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spectune/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace spectune;

namespace {

GrayImage random_image(int size, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GrayImage img(size, size);
    for (Eigen::Index i = 0; i < img.rows(); ++i)
        for (Eigen::Index j = 0; j < img.cols(); ++j)
            img(i, j) = dist(gen);
    return img;
}

Sinogram make_sinogram(int num_angles, int bins, unsigned seed) {
    Sinogram sino;
    sino.angles = Eigen::VectorXd(num_angles);
    for (int a = 0; a < num_angles; ++a)
        sino.angles[a] = a * std::numbers::pi / num_angles;
    sino.offsets =
        Eigen::VectorXd::LinSpaced(bins, -(bins - 1) / 2.0, (bins - 1) / 2.0);
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    sino.data = Eigen::MatrixXd(num_angles, bins);
    for (int a = 0; a < num_angles; ++a)
        for (int j = 0; j < bins; ++j)
            sino.data(a, j) = dist(gen);
    return sino;
}

// Tapered disk: a hard edge aliases under unit-step ray sampling, so the
// rotational-invariance probe uses a 3 px linear ramp.
GrayImage tapered_disk(int size, double radius, double ramp) {
    const double c = (size - 1) / 2.0;
    GrayImage img(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const double d = std::hypot(i - c, j - c);
            img(i, j) = std::clamp((radius + ramp / 2.0 - d) / ramp, 0.0, 1.0);
        }
    return img;
}

struct AffineFit {
    double scale, shift, rmse;
};

// Least-squares a*x+b fit of image against target over a mask, then RMSE.
AffineFit affine_fit(const GrayImage& image, const GrayImage& target,
                     const std::vector<std::pair<int, int>>& mask) {
    double sxx = 0, sx = 0, sxy = 0, sy = 0;
    for (auto [i, j] : mask) {
        sxx += image(i, j) * image(i, j);
        sx += image(i, j);
        sxy += image(i, j) * target(i, j);
        sy += target(i, j);
    }
    const double n = static_cast<double>(mask.size());
    const double det = sxx * n - sx * sx;
    const double a = (sxy * n - sx * sy) / det;
    const double b = (sy - a * sx) / n;
    double acc = 0;
    for (auto [i, j] : mask) {
        const double d = a * image(i, j) + b - target(i, j);
        acc += d * d;
    }
    return {a, b, std::sqrt(acc / n)};
}

std::vector<std::pair<int, int>> interior_mask(int size) {
    const double c = (size - 1) / 2.0;
    std::vector<std::pair<int, int>> mask;
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const double x = (j - c) * 2.0 / size;
            const double y = (c - i) * 2.0 / size;
            const double q =
                (x / 0.69) * (x / 0.69) + (y / 0.92) * (y / 0.92);
            if (q <= 0.95 * 0.95)
                mask.emplace_back(i, j);
        }
    return mask;
}

} // namespace

TEST_CASE("sinogram validation catches malformed geometry") {
    Sinogram good = make_sinogram(4, 7, 1u);
    CHECK_NOTHROW(validate(good));

    Sinogram bad = good;
    bad.data = Eigen::MatrixXd::Zero(4, 6);
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.angles[2] = bad.angles[1];
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.angles[3] = std::numbers::pi;
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.offsets[1] += 0.25;
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.offsets.array() += 1.0;
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.offsets = Eigen::VectorXd::Zero(1);
    bad.data = Eigen::MatrixXd::Zero(4, 1);
    CHECK_THROWS_AS(validate(bad), input_error);

    bad = good;
    bad.data(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(bad), input_error);
}

TEST_CASE("filter params validation") {
    FilterParams p;
    p.rho = 1.0;
    p.omega0 = 1.0;
    CHECK_NOTHROW(validate(p));
    p.rho = 10.0;
    CHECK_NOTHROW(validate(p));
    p.rho = 0.99;
    CHECK_THROWS_AS(validate(p), input_error);
    p.rho = 10.01;
    CHECK_THROWS_AS(validate(p), input_error);
    p.rho = 4.0;
    p.omega0 = 0.0;
    CHECK_THROWS_AS(validate(p), input_error);
    p.omega0 = 1.0001;
    CHECK_THROWS_AS(validate(p), input_error);
}

TEST_CASE("head phantom: support, symmetry, and analytic mass") {
    const int size = 256;
    const GrayImage ph = shepp_logan(size);
    REQUIRE(ph.rows() == size);
    REQUIRE(ph.cols() == size);

    CHECK(ph(0, 0) == 0.0);
    CHECK(ph(0, size - 1) == 0.0);
    CHECK(ph(size - 1, 0) == 0.0);
    CHECK(ph(size - 1, size - 1) == 0.0);
    CHECK(ph.minCoeff() >= 0.0);
    CHECK(ph.maxCoeff() <= 1.0);

    // The bright rim comes from two concentric x-centered ellipses, so its
    // indicator must be exactly mirror symmetric in x.
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const bool a = ph(i, j) > 0.9;
            const bool b = ph(i, size - 1 - j) > 0.9;
            REQUIRE(a == b);
        }

    // Pixel mass against the exact ellipse areas (value * pi * a * b, scaled
    // by (size/2)^2 pixels per unit area).
    const double analytic =
        (1.0 * 0.69 * 0.92 - 0.8 * 0.6624 * 0.8740 - 0.2 * 0.1100 * 0.3100 -
         0.2 * 0.1600 * 0.4100 + 0.1 * 0.2100 * 0.2500 +
         0.1 * 0.0460 * 0.0460 + 0.1 * 0.0460 * 0.0460 +
         0.1 * 0.0460 * 0.0230 + 0.1 * 0.0230 * 0.0230 +
         0.1 * 0.0230 * 0.0460) *
        std::numbers::pi * (size / 2.0) * (size / 2.0);
    CHECK(ph.sum() == doctest::Approx(analytic).epsilon(0.01));

    CHECK_THROWS_AS(shepp_logan(31), input_error);
}

TEST_CASE("sphere phantom: cylinder support and insert values") {
    const int size = 64;
    const double pitch = 2.0 / size;
    const double c = (size - 1) / 2.0;

    const Volume empty = sphere_phantom(size, 4, {}, 2.5);
    REQUIRE(empty.nz() == 4);
    REQUIRE(empty.nx() == size);
    for (const GrayImage& slice : empty.slices)
        for (int i = 0; i < size; ++i)
            for (int j = 0; j < size; ++j) {
                const double x = (j - c) * pitch;
                const double y = (i - c) * pitch;
                const double expect =
                    (x * x + y * y > 0.9 * 0.9) ? 0.0 : 2.5;
                REQUIRE(slice(i, j) == expect);
            }

    Sphere cold;
    cold.radius = 0.1;
    cold.intensity = 0.0;
    const Volume v = sphere_phantom(size, 9, {cold}, 1.0);
    // Voxel (32,32) of the middle slice sits 0.022 from the origin: inside.
    CHECK(v.slices[4](32, 32) == 0.0);
    CHECK(v.slices[4](32, 50) == 1.0);
    CHECK_NOTHROW(v.validate());
}

TEST_CASE("sphere phantom: voxel totals match analytic volumes") {
    const int size = 64;
    const int z_slices = 16;
    Sphere hot;
    hot.x = 0.4;
    hot.radius = 0.2;
    hot.intensity = 4.0;
    Sphere cold;
    cold.x = -0.4;
    cold.radius = 0.15;
    cold.intensity = 0.0;
    const double bg = 1.0;
    const Volume v = sphere_phantom(size, z_slices, {hot, cold}, bg);

    double total = 0.0;
    for (const GrayImage& slice : v.slices)
        total += slice.sum();

    const double per_unit_area = (size / 2.0) * (size / 2.0);
    const double per_unit_volume = per_unit_area * (size / 2.0);
    const double cylinder = bg * std::numbers::pi * 0.9 * 0.9 * per_unit_area *
                            static_cast<double>(z_slices);
    auto ball = [&](double r, double intensity) {
        return (intensity - bg) * (4.0 / 3.0) * std::numbers::pi * r * r * r *
               per_unit_volume;
    };
    const double analytic =
        cylinder + ball(0.2, 4.0) + ball(0.15, 0.0);
    CHECK(total == doctest::Approx(analytic).epsilon(0.02));
}

TEST_CASE("sphere phantom: rejects overlap, escape, and bad arguments") {
    Sphere a;
    a.x = 0.0;
    a.radius = 0.2;
    a.intensity = 2.0;
    Sphere b = a;
    b.x = 0.3; // centers 0.3 apart, radii sum 0.4: overlap
    CHECK_THROWS_AS(sphere_phantom(32, 4, {a, b}, 1.0), input_error);

    Sphere escape;
    escape.x = 0.8;
    escape.radius = 0.2;
    CHECK_THROWS_AS(sphere_phantom(32, 4, {escape}, 1.0), input_error);

    Sphere ok;
    ok.radius = 0.1;
    CHECK_THROWS_AS(sphere_phantom(7, 4, {ok}, 1.0), input_error);
    CHECK_THROWS_AS(sphere_phantom(32, 0, {ok}, 1.0), input_error);
    CHECK_THROWS_AS(sphere_phantom(32, 4, {ok}, -1.0), input_error);
    Sphere flat;
    flat.radius = 0.0;
    CHECK_THROWS_AS(sphere_phantom(32, 4, {flat}, 1.0), input_error);
}

TEST_CASE("jaszczak preset: six alternating inserts on a ring") {
    const std::vector<Sphere> spheres = jaszczak_spheres();
    REQUIRE(spheres.size() == 6);
    for (int i = 0; i < 6; ++i) {
        CHECK(std::hypot(spheres[i].x, spheres[i].y) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(spheres[i].z == 0.0);
        CHECK(spheres[i].intensity == ((i % 2 == 0) ? 0.0 : 5.0));
        CHECK(spheres[i].radius > 0.0);
    }

    const Volume v = jaszczak_phantom(64, 8);
    REQUIRE(v.nz() == 8);
    long hot = 0, coldish = 0;
    const double c = 31.5, pitch = 2.0 / 64.0;
    for (const GrayImage& slice : v.slices)
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                const double val = slice(i, j);
                REQUIRE((val == 0.0 || val == 1.0 || val == 5.0));
                if (val == 5.0)
                    ++hot;
                const double x = (j - c) * pitch;
                const double y = (i - c) * pitch;
                if (val == 0.0 && x * x + y * y <= 0.8 * 0.8)
                    ++coldish;
            }
    CHECK(hot > 0);
    CHECK(coldish > 0);
}

TEST_CASE("radon: geometry, zero image, and input validation") {
    const GrayImage zero = GrayImage::Zero(32, 32);
    const Sinogram s = radon(zero, 10);
    REQUIRE(s.angles.size() == 10);
    const int bins = static_cast<int>(std::ceil(32 * std::numbers::sqrt2));
    REQUIRE(s.offsets.size() == bins);
    CHECK(s.data.rows() == 10);
    CHECK(s.data.cols() == bins);
    CHECK(s.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.angles[0] == 0.0);
    CHECK(s.angles[9] == doctest::Approx(9.0 * std::numbers::pi / 10.0));
    CHECK(s.offsets[0] + s.offsets[bins - 1] == 0.0);
    CHECK(s.offsets[1] - s.offsets[0] == 1.0);
    CHECK_NOTHROW(validate(s));

    CHECK_THROWS_AS(radon(GrayImage::Zero(16, 17), 8), input_error);
    CHECK_THROWS_AS(radon(zero, 0), input_error);
    GrayImage nan = zero;
    nan(3, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(radon(nan, 8), input_error);
}

TEST_CASE("radon: centered disk projects angle-invariantly") {
    const GrayImage disk = tapered_disk(129, 40.0, 3.0);
    const Sinogram s = radon(disk, 24);
    const double peak = s.data.row(0).maxCoeff();
    REQUIRE(peak > 70.0);
    for (int a = 1; a < 24; ++a) {
        const double dev =
            (s.data.row(a) - s.data.row(0)).cwiseAbs().maxCoeff();
        CHECK(dev <= 0.01 * peak);
    }
}

TEST_CASE("radon: central impulse stays within one offset bin") {
    const int size = 65;
    GrayImage img = GrayImage::Zero(size, size);
    img(32, 32) = 1.0;
    const Sinogram s = radon(img, 12);
    for (int a = 0; a < 12; ++a) {
        double total = 0.0, near = 0.0;
        for (Eigen::Index j = 0; j < s.offsets.size(); ++j) {
            total += std::abs(s.data(a, j));
            if (std::abs(s.offsets[j]) <= 1.01)
                near += std::abs(s.data(a, j));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(0.1));
        CHECK(near >= 0.97 * total);
    }
}

TEST_CASE("radon is linear") {
    const GrayImage a = random_image(32, 11u);
    const GrayImage b = random_image(32, 12u);
    const Sinogram sa = radon(a, 9);
    const Sinogram sb = radon(b, 9);
    const Sinogram sc = radon(1.7 * a - 0.6 * b, 9);
    const Eigen::MatrixXd combo = 1.7 * sa.data - 0.6 * sb.data;
    const double scale = combo.cwiseAbs().maxCoeff();
    CHECK((sc.data - combo).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + scale));
}

TEST_CASE("butterworth ramp: anchors and closed forms") {
    FilterParams p;
    p.rho = 4.0;
    p.omega0 = 0.5;
    Eigen::VectorXd freqs(4);
    freqs << 0.0, 0.5, -0.5, 1.0;
    const Eigen::VectorXd r = butterworth_ramp(p, freqs);
    CHECK(r[0] == 0.0);
    // At the critical frequency the Butterworth factor is exactly 1/sqrt(2).
    CHECK(r[1] == doctest::Approx(0.5 / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(r[2] == r[1]);
    CHECK(r[3] ==
          doctest::Approx(1.0 / std::sqrt(1.0 + std::pow(2.0, 8.0)))
              .epsilon(1e-12));
}

TEST_CASE("butterworth ramp: high-order value against long double") {
    FilterParams p;
    p.rho = 9.0;
    p.omega0 = 0.17;
    Eigen::VectorXd freqs(1);
    freqs << 0.5;
    const long double w = 0.5L;
    const long double expected =
        w / std::sqrt(1.0L + std::pow(w / 0.17L, 18.0L));
    const Eigen::VectorXd r = butterworth_ramp(p, freqs);
    CHECK(r[0] ==
          doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
}

TEST_CASE("butterworth ramp: sandwiched between zero and the ramp") {
    std::mt19937 gen(3u);
    std::uniform_real_distribution<double> rho_d(1.0, 10.0);
    std::uniform_real_distribution<double> w0_d(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        FilterParams p;
        p.rho = rho_d(gen);
        p.omega0 = w0_d(gen);
        const Eigen::VectorXd freqs =
            Eigen::VectorXd::LinSpaced(101, -1.0, 1.0);
        const Eigen::VectorXd r = butterworth_ramp(p, freqs);
        for (Eigen::Index i = 0; i < freqs.size(); ++i) {
            CHECK(r[i] >= 0.0);
            CHECK(r[i] <= std::abs(freqs[i]) + 1e-15);
        }
    }
}

TEST_CASE("fft helper: roundtrip, known transforms, and sizes") {
    CHECK(detail::next_pow2(1) == 1);
    CHECK(detail::next_pow2(2) == 2);
    CHECK(detail::next_pow2(3) == 4);
    CHECK(detail::next_pow2(13) == 16);
    CHECK(detail::next_pow2(16) == 16);
    CHECK(detail::next_pow2(17) == 32);

    std::vector<std::complex<double>> impulse(4, {0.0, 0.0});
    impulse[0] = {1.0, 0.0};
    detail::fft_radix2(impulse, false);
    for (const auto& v : impulse) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(v.imag()) <= 1e-14);
    }

    std::vector<std::complex<double>> constant(8, {3.0, 0.0});
    detail::fft_radix2(constant, false);
    CHECK(constant[0].real() == doctest::Approx(24.0).epsilon(1e-14));
    for (std::size_t k = 1; k < 8; ++k)
        CHECK(std::abs(constant[k]) <= 1e-12);

    std::mt19937 gen(9u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> data(32);
    for (auto& v : data)
        v = {dist(gen), dist(gen)};
    auto copy = data;
    detail::fft_radix2(copy, false);
    double time_energy = 0.0, freq_energy = 0.0;
    for (std::size_t k = 0; k < 32; ++k) {
        time_energy += std::norm(data[k]);
        freq_energy += std::norm(copy[k]);
    }
    CHECK(freq_energy / 32.0 == doctest::Approx(time_energy).epsilon(1e-12));
    detail::fft_radix2(copy, true);
    for (std::size_t k = 0; k < 32; ++k)
        CHECK(std::abs(copy[k] - data[k]) <= 1e-12);
}

TEST_CASE("filter_sinogram: null and constant inputs") {
    Sinogram zero = make_sinogram(3, 11, 5u);
    zero.data.setZero();
    FilterParams p;
    p.rho = 2.0;
    p.omega0 = 0.7;
    const Sinogram fz = filter_sinogram(zero, p);
    CHECK(fz.data.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fz.offsets == zero.offsets);
    CHECK(fz.angles == zero.angles);

    // Zero-padding turns a constant row into a rect pulse, so the ramp can
    // only annihilate the padded window's true DC: the response concentrates
    // in transients at the rect edges while the interior stays far below the
    // input level.
    Sinogram flat = make_sinogram(1, 64, 6u);
    flat.data.setConstant(5.0);
    const Sinogram ff = filter_sinogram(flat, p);
    double edge = 0.0, interior = 0.0;
    for (int j = 0; j < 64; ++j) {
        const double v = std::abs(ff.data(0, j));
        if (j < 4 || j >= 60)
            edge = std::max(edge, v);
        else if (j >= 16 && j < 48)
            interior = std::max(interior, v);
    }
    CHECK(interior <= 0.02 * 5.0);
    CHECK(interior < 0.2 * edge);
    CHECK(edge < 5.0);
}

TEST_CASE("filter_sinogram matches direct circular convolution") {
    const int bins = 13;
    Sinogram sino = make_sinogram(2, bins, 17u);
    FilterParams p;
    p.rho = 3.0;
    p.omega0 = 0.6;
    const Sinogram filtered = filter_sinogram(sino, p);

    const std::size_t padded = detail::next_pow2(2 * bins);
    REQUIRE(padded == 32);
    Eigen::VectorXd omega(static_cast<Eigen::Index>(padded));
    for (std::size_t k = 0; k < padded; ++k)
        omega[static_cast<Eigen::Index>(k)] =
            2.0 * static_cast<double>(std::min(k, padded - k)) /
            static_cast<double>(padded);
    const Eigen::VectorXd response = butterworth_ramp(p, omega) * 0.5;

    // Impulse response by inverse transform, then O(S^2) circular convolution.
    std::vector<std::complex<double>> kernel(padded);
    for (std::size_t k = 0; k < padded; ++k)
        kernel[k] = {response[static_cast<Eigen::Index>(k)], 0.0};
    detail::fft_radix2(kernel, true);

    // tau(0) = 0 means the impulse response carries no DC.
    double kernel_sum = 0.0;
    for (const auto& v : kernel)
        kernel_sum += v.real();
    CHECK(std::abs(kernel_sum) <= 1e-12);

    for (int a = 0; a < 2; ++a) {
        std::vector<double> x(padded, 0.0);
        for (int j = 0; j < bins; ++j)
            x[static_cast<std::size_t>(j)] = sino.data(a, j);
        for (int n = 0; n < bins; ++n) {
            double acc = 0.0;
            for (std::size_t m = 0; m < padded; ++m) {
                const std::size_t lag = (n + padded - m) % padded;
                acc += x[m] * kernel[lag].real();
            }
            CHECK(filtered.data(a, n) == doctest::Approx(acc).epsilon(1e-8));
        }
    }
}

TEST_CASE("filter_sinogram is linear") {
    Sinogram a = make_sinogram(3, 10, 21u);
    Sinogram b = make_sinogram(3, 10, 22u);
    Sinogram combo = a;
    combo.data = 2.0 * a.data - 0.5 * b.data;
    FilterParams p;
    p.rho = 5.0;
    p.omega0 = 0.4;
    const Eigen::MatrixXd direct = filter_sinogram(combo, p).data;
    const Eigen::MatrixXd parts =
        2.0 * filter_sinogram(a, p).data - 0.5 * filter_sinogram(b, p).data;
    CHECK((direct - parts).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("back_project: zero input, direct oracle, and validation") {
    Sinogram zero = make_sinogram(5, 9, 8u);
    zero.data.setZero();
    CHECK(back_project(zero, 8).cwiseAbs().maxCoeff() == 0.0);

    // Independent accumulation with the same interpolation contract.
    const Sinogram sino = make_sinogram(4, 12, 33u);
    const GrayImage bp = back_project(sino, 8);
    const double center = (8 - 1) / 2.0;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            double sum = 0.0;
            for (int a = 0; a < 4; ++a) {
                const double theta = sino.angles[a];
                const double s = (j - center) * std::cos(theta) +
                                 (i - center) * std::sin(theta);
                const double u = s - sino.offsets[0];
                const double k0f = std::floor(u);
                const int k0 = static_cast<int>(k0f);
                const double frac = u - k0f;
                if (k0 >= 0 && k0 + 1 < 12)
                    sum += (1.0 - frac) * sino.data(a, k0) +
                           frac * sino.data(a, k0 + 1);
                else if (k0 == -1)
                    sum += frac * sino.data(a, 0);
                else if (k0 + 1 == 12)
                    sum += (1.0 - frac) * sino.data(a, k0);
            }
            sum *= std::numbers::pi / 4.0;
            CHECK(bp(i, j) == doctest::Approx(sum).epsilon(1e-12));
        }

    Sinogram crooked = make_sinogram(4, 12, 34u);
    crooked.offsets.array() += 0.5;
    CHECK_THROWS_AS(back_project(crooked, 8), input_error);
    CHECK_THROWS_AS(back_project(sino, 0), input_error);
}

TEST_CASE("back_project: disk smear peaks at the center") {
    const GrayImage disk = tapered_disk(33, 10.0, 2.0);
    const Sinogram s = radon(disk, 20);
    const GrayImage bp = back_project(s, 33);
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j)
            CHECK(bp(16, 16) >= bp(i, j));
}

TEST_CASE("fbp equals the filter-then-smear composition") {
    const Sinogram sino = make_sinogram(6, 16, 44u);
    FilterParams p;
    p.rho = 4.0;
    p.omega0 = 0.8;
    const GrayImage one = fbp(sino, p, 11);
    const GrayImage two = back_project(filter_sinogram(sino, p), 11);
    CHECK((one - two).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fbp roundtrip reconstructs the head phantom") {
    const int size = 256;
    const GrayImage phantom = shepp_logan(size);
    const Sinogram sino = radon(phantom, 360);
    FilterParams p;
    p.rho = 4.0;
    p.omega0 = 0.8;
    const GrayImage recon = fbp(sino, p, size);

    const auto mask = interior_mask(size);
    double num = 0.0, den = 0.0;
    for (auto [i, j] : mask) {
        const double d = recon(i, j) - phantom(i, j);
        num += d * d;
        den += phantom(i, j) * phantom(i, j);
    }
    const double rel_rmse = std::sqrt(num / den);
    CHECK(rel_rmse <= 0.25);

    // The unfiltered smear must be worse even after the best affine match.
    const GrayImage smear = back_project(sino, size);
    const double rms_truth =
        std::sqrt(den / static_cast<double>(mask.size()));
    const AffineFit filtered_fit = affine_fit(recon, phantom, mask);
    const AffineFit smear_fit = affine_fit(smear, phantom, mask);
    CHECK(filtered_fit.rmse < smear_fit.rmse);
    CHECK(smear_fit.rmse / rms_truth > 0.3);
}

TEST_CASE("fbp: lower cutoff suppresses high-frequency content") {
    const int size = 128;
    const GrayImage phantom = shepp_logan(size);
    const Sinogram sino = radon(phantom, 180);
    FilterParams open;
    open.rho = 2.0;
    open.omega0 = 1.0;
    FilterParams tight;
    tight.rho = 2.0;
    tight.omega0 = 0.1;

    auto high_energy = [&](const GrayImage& img) {
        double acc = 0.0;
        std::vector<std::complex<double>> row(size);
        for (int i = 0; i < size; ++i) {
            for (int j = 0; j < size; ++j)
                row[static_cast<std::size_t>(j)] = {img(i, j), 0.0};
            detail::fft_radix2(row, false);
            for (int k = 0; k < size; ++k) {
                const double folded =
                    2.0 * std::min(k, size - k) / static_cast<double>(size);
                if (folded > 0.5)
                    acc += std::norm(row[static_cast<std::size_t>(k)]);
            }
        }
        return acc;
    };
    CHECK(high_energy(fbp(sino, tight, size)) <
          high_energy(fbp(sino, open, size)));
}

TEST_CASE("fbp_volume: slice-wise equality and geometry checks") {
    FilterParams p;
    p.rho = 3.0;
    p.omega0 = 0.5;

    const Sinogram single = make_sinogram(8, 14, 55u);
    const Volume v1 = fbp_volume({single}, p, 10);
    REQUIRE(v1.nz() == 1);
    CHECK((v1.slices[0] - fbp(single, p, 10)).cwiseAbs().maxCoeff() == 0.0);

    const Volume v3 = fbp_volume({single, single, single}, p, 10);
    REQUIRE(v3.nz() == 3);
    CHECK((v3.slices[1] - v3.slices[0]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v3.slices[2] - v3.slices[0]).cwiseAbs().maxCoeff() == 0.0);

    const Volume phantom = jaszczak_phantom(32, 4);
    std::vector<Sinogram> sinos;
    for (const GrayImage& slice : phantom.slices)
        sinos.push_back(radon(slice, 24));
    const Volume recon = fbp_volume(sinos, p, 32);
    REQUIRE(recon.nz() == 4);
    for (int k = 0; k < 4; ++k)
        CHECK((recon.slices[static_cast<std::size_t>(k)] -
               fbp(sinos[static_cast<std::size_t>(k)], p, 32))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);

    std::vector<Sinogram> mismatched = {single, make_sinogram(9, 14, 56u)};
    CHECK_THROWS_AS(fbp_volume(mismatched, p, 10), input_error);
    CHECK_THROWS_AS(fbp_volume({}, p, 10), input_error);
}
