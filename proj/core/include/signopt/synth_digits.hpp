#pragma once

#include <cstdint>
#include <string>

namespace signopt {

/// Knobs for the procedural digit corpus. Each class is a fixed smoothed
/// stroke pattern; samples are shifted, contrast-jittered, noisy copies.
struct DigitGenParams {
    std::size_t train_count = 60000;
    std::size_t test_count = 10000;
    std::uint64_t seed = 20190701;
    int image_size = 28;
    int max_shift = 2;       // per-axis translation in pixels
    double noise_std = 0.15; // additive pixel noise before clamping
    double contrast_lo = 0.6;
    double contrast_hi = 1.3;
    bool gzip = false;
};

/// Writes an MNIST-layout dataset (train-images-idx3-ubyte,
/// train-labels-idx1-ubyte, t10k-...) into `dir`. Deterministic in the
/// seed, byte for byte. Returns the common path prefix (the directory).
std::string generate_digits_idx(const std::string& dir, const DigitGenParams& params);

/// Writes a single IDX file; exposed for fixtures and the datagen tool.
void write_idx_images(const std::string& path, const unsigned char* pixels,
                      std::size_t count, int rows, int cols, bool gzip);
void write_idx_labels(const std::string& path, const unsigned char* labels,
                      std::size_t count, bool gzip);

} // namespace signopt
