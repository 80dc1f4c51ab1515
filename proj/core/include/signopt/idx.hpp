#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "signopt/dataset.hpp"

namespace signopt {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Header of one IDX file (big-endian on disk).
struct IdxInfo {
    std::uint32_t magic = 0;
    std::vector<std::uint32_t> dims;
    std::size_t item_count() const { return dims.empty() ? 0 : dims[0]; }
};

/// Parses the header only. Gzip-compressed files are decoded transparently.
IdxInfo idx_info(const std::string& path);

/// Loads an images/labels pair into a Dataset. Pixels are scaled to [0,1]
/// and normalized with the standard MNIST constants (mean 0.1307,
/// std 0.3081). Throws distinct errors for bad magic, truncation, and
/// image/label count mismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::string& split = "train");

} // namespace signopt
