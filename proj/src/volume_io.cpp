#include "spectune/volume_io.hpp"

#include "spectune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace spectune {

namespace {

constexpr char kMagic[6] = {'S', 'P', 'V', 'O', 'L', '1'};
constexpr std::size_t kHeaderBytes = 6 + 3 * 4;

void append_u32(std::string& out, std::uint32_t value) {
    out.push_back(static_cast<char>(value & 0xFF));
    out.push_back(static_cast<char>((value >> 8) & 0xFF));
    out.push_back(static_cast<char>((value >> 16) & 0xFF));
    out.push_back(static_cast<char>((value >> 24) & 0xFF));
}

void append_f32(std::string& out, float value) {
    std::uint32_t bits = 0;
    std::memcpy(&bits, &value, 4);
    append_u32(out, bits);
}

std::uint32_t parse_u32(const std::string& bytes, std::size_t at) {
    const auto b = [&](std::size_t k) {
        return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + k]));
    };
    return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

float parse_f32(const std::string& bytes, std::size_t at) {
    std::uint32_t bits = parse_u32(bytes, at);
    float value = 0.0F;
    std::memcpy(&value, &bits, 4);
    return value;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error(path + ": cannot open", 0);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (!in && !in.eof()) {
        throw io_error(path + ": read failed", 0);
    }
    return std::move(buffer).str();
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error(path + ": cannot open for writing", 0);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw io_error(path + ": write failed", 0);
    }
}

struct Header {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t z = 0;
};

// Validates magic, dimensions, and the exact payload length; the reported
// byte offset points at the first inconsistent byte.
Header parse_header(const std::string& path, const std::string& bytes) {
    if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 6) != 0) {
        std::size_t at = 0;
        while (at < bytes.size() && at < 6 && bytes[at] == kMagic[at]) {
            ++at;
        }
        throw io_error(path + ": bad magic, expected SPVOL1", at);
    }
    if (bytes.size() < kHeaderBytes) {
        throw io_error(path + ": truncated header", bytes.size());
    }
    Header header;
    header.x = parse_u32(bytes, 6);
    header.y = parse_u32(bytes, 10);
    header.z = parse_u32(bytes, 14);
    if (header.x == 0 || header.y == 0 || header.z == 0) {
        std::size_t at = header.x == 0 ? 6 : (header.y == 0 ? 10 : 14);
        throw io_error(path + ": zero dimension", at);
    }
    const std::uint64_t cells =
        static_cast<std::uint64_t>(header.x) * header.y * header.z;
    if (cells > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4) {
        throw io_error(path + ": dimensions overflow", 6);
    }
    const std::uint64_t expected = kHeaderBytes + cells * 4;
    if (bytes.size() != expected) {
        std::size_t at = bytes.size() < expected ? bytes.size()
                                                 : static_cast<std::size_t>(expected);
        throw io_error(path + ": payload is " +
                           std::to_string(bytes.size() - kHeaderBytes) +
                           " bytes, dimensions declare " +
                           std::to_string(cells * 4),
                       at);
    }
    return header;
}

std::string serialize(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                      const std::vector<const GrayImage*>& slices) {
    std::string bytes;
    bytes.reserve(kHeaderBytes +
                  static_cast<std::size_t>(x) * y * z * 4);
    bytes.append(kMagic, 6);
    append_u32(bytes, x);
    append_u32(bytes, y);
    append_u32(bytes, z);
    for (const GrayImage* slice : slices) {
        for (std::uint32_t row = 0; row < y; ++row) {
            for (std::uint32_t col = 0; col < x; ++col) {
                append_f32(bytes, static_cast<float>((*slice)(row, col)));
            }
        }
    }
    return bytes;
}

} // namespace

void write_volume(const std::string& path, const Volume& volume) {
    volume.validate();
    std::vector<const GrayImage*> slices;
    slices.reserve(volume.slices.size());
    for (const GrayImage& slice : volume.slices) {
        slices.push_back(&slice);
    }
    write_all(path, serialize(static_cast<std::uint32_t>(volume.nx()),
                              static_cast<std::uint32_t>(volume.ny()),
                              static_cast<std::uint32_t>(volume.nz()), slices));
}

Volume read_volume(const std::string& path) {
    const std::string bytes = read_all(path);
    const Header header = parse_header(path, bytes);
    Volume volume;
    volume.slices.reserve(header.z);
    std::size_t at = kHeaderBytes;
    for (std::uint32_t slice = 0; slice < header.z; ++slice) {
        GrayImage image(header.y, header.x);
        for (std::uint32_t row = 0; row < header.y; ++row) {
            for (std::uint32_t col = 0; col < header.x; ++col) {
                const float value = parse_f32(bytes, at);
                if (!std::isfinite(value)) {
                    throw io_error(path + ": non-finite sample", at);
                }
                image(row, col) = static_cast<double>(value);
                at += 4;
            }
        }
        volume.slices.push_back(std::move(image));
    }
    return volume;
}

void write_sinograms(const std::string& path, const std::vector<Sinogram>& sinos) {
    if (sinos.empty()) {
        throw input_error("write_sinograms: empty stack");
    }
    for (const Sinogram& sino : sinos) {
        validate(sino);
        if (sino.data.rows() != sinos.front().data.rows() ||
            sino.data.cols() != sinos.front().data.cols()) {
            throw input_error("write_sinograms: mismatched slice shapes");
        }
    }
    std::vector<const GrayImage*> slices;
    slices.reserve(sinos.size());
    for (const Sinogram& sino : sinos) {
        slices.push_back(&sino.data);
    }
    write_all(path,
              serialize(static_cast<std::uint32_t>(sinos.front().data.cols()),
                        static_cast<std::uint32_t>(sinos.front().data.rows()),
                        static_cast<std::uint32_t>(sinos.size()), slices));
}

std::vector<Sinogram> read_sinograms(const std::string& path) {
    Volume raw = read_volume(path);
    const Eigen::Index bins = raw.nx();
    const Eigen::Index num_angles = raw.ny();
    Eigen::VectorXd offsets(bins);
    for (Eigen::Index j = 0; j < bins; ++j) {
        offsets(j) = static_cast<double>(j) - (static_cast<double>(bins) - 1.0) / 2.0;
    }
    Eigen::VectorXd angles(num_angles);
    for (Eigen::Index a = 0; a < num_angles; ++a) {
        angles(a) = static_cast<double>(a) * std::numbers::pi /
                    static_cast<double>(num_angles);
    }
    std::vector<Sinogram> sinos;
    sinos.reserve(raw.slices.size());
    for (GrayImage& slice : raw.slices) {
        Sinogram sino;
        sino.angles = angles;
        sino.offsets = offsets;
        sino.data = std::move(slice);
        sinos.push_back(std::move(sino));
    }
    return sinos;
}

void write_pgm(const std::string& path, const GrayImage& slice) {
    if (slice.size() == 0) {
        throw input_error("write_pgm: empty image");
    }
    if (!slice.allFinite()) {
        throw input_error("write_pgm: non-finite image");
    }
    const double lo = slice.minCoeff();
    const double hi = slice.maxCoeff();
    const double span = hi - lo;
    std::string bytes = "P5\n" + std::to_string(slice.cols()) + " " +
                        std::to_string(slice.rows()) + "\n255\n";
    bytes.reserve(bytes.size() + static_cast<std::size_t>(slice.size()));
    for (Eigen::Index row = 0; row < slice.rows(); ++row) {
        for (Eigen::Index col = 0; col < slice.cols(); ++col) {
            double level = 0.0;
            if (span > 0.0) {
                level = std::round((slice(row, col) - lo) / span * 255.0);
            }
            bytes.push_back(static_cast<char>(
                static_cast<unsigned char>(std::clamp(level, 0.0, 255.0))));
        }
    }
    write_all(path, bytes);
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error(path + ": cannot open", 0);
    }
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_number = 0;
    const auto trim = [](std::string text) {
        const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
        while (!text.empty() && is_space(text.front())) {
            text.erase(text.begin());
        }
        while (!text.empty() && is_space(text.back())) {
            text.pop_back();
        }
        return text;
    };
    while (std::getline(in, line)) {
        ++line_number;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw input_error(path + ": line " + std::to_string(line_number) +
                              ": expected key=value, got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw input_error(path + ": line " + std::to_string(line_number) +
                              ": empty key");
        }
        entries[key] = value;
    }
    return entries;
}

void write_config(const std::string& path,
                  const std::map<std::string, std::string>& entries) {
    std::string text;
    for (const auto& [key, value] : entries) {
        text += key + "=" + value + "\n";
    }
    write_all(path, text);
}

} // namespace spectune
