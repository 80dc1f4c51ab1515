#include "signopt/synth_digits.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "signopt/rng.hpp"

namespace signopt {

namespace {

void append_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes,
                 bool gzip) {
    if (gzip) {
        gzFile gz = gzopen(path.c_str(), "wb");
        if (gz == nullptr) {
            throw std::runtime_error("cannot open " + path + " for writing");
        }
        const int written = gzwrite(gz, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(gz);
        if (written != static_cast<int>(bytes.size())) {
            throw std::runtime_error("short gzip write to " + path);
        }
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("short write to " + path);
    }
}

// Smoothed random field thresholded into bright strokes on a dark field.
std::vector<double> make_prototype(Rng& rng, int size) {
    const int n = size * size;
    std::vector<double> field(static_cast<std::size_t>(n));
    for (double& v : field) {
        v = rng.normal();
    }
    // Separable Gaussian blur, sigma ~ 2px.
    const int radius = 5;
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / 4.0);
        ksum += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (double& k : kernel) {
        k /= ksum;
    }
    std::vector<double> tmp(static_cast<std::size_t>(n), 0.0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, size - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       field[static_cast<std::size_t>(y * size + xx)];
            }
            tmp[static_cast<std::size_t>(y * size + x)] = acc;
        }
    }
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, size - 1);
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(yy * size + x)];
            }
            field[static_cast<std::size_t>(y * size + x)] = acc;
        }
    }
    // Keep the top quarter of the field as strokes, rescaled to [0, 1].
    std::vector<double> sorted(field);
    std::sort(sorted.begin(), sorted.end());
    const double cut = sorted[static_cast<std::size_t>(0.75 * n)];
    double peak = 0.0;
    for (double& v : field) {
        v = std::max(0.0, v - cut);
        peak = std::max(peak, v);
    }
    if (peak > 0.0) {
        for (double& v : field) {
            v /= peak;
        }
    }
    return field;
}

void render_split(std::vector<unsigned char>& pixels, std::vector<unsigned char>& labels,
                  const std::vector<std::vector<double>>& prototypes,
                  const DigitGenParams& p, std::size_t count, Rng& rng) {
    const int size = p.image_size;
    const std::size_t dim = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
    pixels.resize(count * dim);
    labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(rng.below(10));
        labels[i] = static_cast<unsigned char>(label);
        const std::vector<double>& proto = prototypes[static_cast<std::size_t>(label)];
        const int dx = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * p.max_shift + 1))) - p.max_shift;
        const int dy = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * p.max_shift + 1))) - p.max_shift;
        const double contrast = rng.uniform(p.contrast_lo, p.contrast_hi);
        unsigned char* out = pixels.data() + i * dim;
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                const int sx = x - dx;
                const int sy = y - dy;
                double v = 0.0;
                if (sx >= 0 && sx < size && sy >= 0 && sy < size) {
                    v = proto[static_cast<std::size_t>(sy * size + sx)];
                }
                v = contrast * v + p.noise_std * rng.normal();
                v = std::clamp(v, 0.0, 1.0);
                out[y * size + x] = static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
    }
}

} // namespace

void write_idx_images(const std::string& path, const unsigned char* pixels,
                      std::size_t count, int rows, int cols, bool gzip) {
    std::vector<unsigned char> bytes;
    bytes.reserve(16 + count * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    append_be32(bytes, 0x00000803);
    append_be32(bytes, static_cast<std::uint32_t>(count));
    append_be32(bytes, static_cast<std::uint32_t>(rows));
    append_be32(bytes, static_cast<std::uint32_t>(cols));
    bytes.insert(bytes.end(), pixels,
                 pixels + count * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    write_bytes(path, bytes, gzip);
}

void write_idx_labels(const std::string& path, const unsigned char* labels,
                      std::size_t count, bool gzip) {
    std::vector<unsigned char> bytes;
    bytes.reserve(8 + count);
    append_be32(bytes, 0x00000801);
    append_be32(bytes, static_cast<std::uint32_t>(count));
    bytes.insert(bytes.end(), labels, labels + count);
    write_bytes(path, bytes, gzip);
}

std::string generate_digits_idx(const std::string& dir, const DigitGenParams& p) {
    std::filesystem::create_directories(dir);
    Rng root(p.seed);
    Rng proto_rng = root.split(1);
    std::vector<std::vector<double>> prototypes;
    prototypes.reserve(10);
    for (int c = 0; c < 10; ++c) {
        prototypes.push_back(make_prototype(proto_rng, p.image_size));
    }

    std::vector<unsigned char> pixels;
    std::vector<unsigned char> labels;
    const std::string suffix = p.gzip ? ".gz" : "";

    Rng train_rng = root.split(2);
    render_split(pixels, labels, prototypes, p, p.train_count, train_rng);
    write_idx_images(dir + "/train-images-idx3-ubyte" + suffix, pixels.data(),
                     p.train_count, p.image_size, p.image_size, p.gzip);
    write_idx_labels(dir + "/train-labels-idx1-ubyte" + suffix, labels.data(),
                     p.train_count, p.gzip);

    Rng test_rng = root.split(3);
    render_split(pixels, labels, prototypes, p, p.test_count, test_rng);
    write_idx_images(dir + "/t10k-images-idx3-ubyte" + suffix, pixels.data(),
                     p.test_count, p.image_size, p.image_size, p.gzip);
    write_idx_labels(dir + "/t10k-labels-idx1-ubyte" + suffix, labels.data(),
                     p.test_count, p.gzip);
    return dir;
}

} // namespace signopt
