#include "signopt/idx.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace signopt {

namespace {

constexpr double kMnistMean = 0.1307;
constexpr double kMnistStd = 0.3081;

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("idx: cannot open " + path);
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

bool is_gzip(const std::vector<unsigned char>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<unsigned char> gunzip(const std::vector<unsigned char>& bytes,
                                  const std::string& path) {
    std::vector<unsigned char> out;
    out.resize(bytes.size() * 4 + 1024);
    z_stream zs{};
    // 16 + MAX_WBITS selects gzip decoding.
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
        throw std::runtime_error("idx: zlib init failed for " + path);
    }
    zs.next_in = const_cast<unsigned char*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    std::size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) {
            out.resize(out.size() * 2);
        }
        zs.next_out = out.data() + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("idx: corrupt gzip stream in " + path);
        }
        written = out.size() - zs.avail_out;
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

std::vector<unsigned char> load_bytes(const std::string& path) {
    std::vector<unsigned char> bytes = read_file_bytes(path);
    if (is_gzip(bytes)) {
        return gunzip(bytes, path);
    }
    return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw std::runtime_error("idx: truncated file " + path);
    }
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

IdxInfo parse_header(const std::vector<unsigned char>& bytes, const std::string& path) {
    IdxInfo info;
    info.magic = read_be32(bytes, 0, path);
    if (info.magic != kIdxImagesMagic && info.magic != kIdxLabelsMagic) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "0x%08x", info.magic);
        throw std::runtime_error("idx: bad magic " + std::string(buf) + " in " + path);
    }
    const std::size_t ndims = info.magic == kIdxImagesMagic ? 3 : 1;
    for (std::size_t i = 0; i < ndims; ++i) {
        info.dims.push_back(read_be32(bytes, 4 + 4 * i, path));
    }
    return info;
}

} // namespace

IdxInfo idx_info(const std::string& path) {
    return parse_header(load_bytes(path), path);
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::string& split) {
    const std::vector<unsigned char> image_bytes = load_bytes(images_path);
    const std::vector<unsigned char> label_bytes = load_bytes(labels_path);

    const IdxInfo image_info = parse_header(image_bytes, images_path);
    if (image_info.magic != kIdxImagesMagic) {
        throw std::runtime_error("idx: " + images_path + " is not an images file");
    }
    const IdxInfo label_info = parse_header(label_bytes, labels_path);
    if (label_info.magic != kIdxLabelsMagic) {
        throw std::runtime_error("idx: " + labels_path + " is not a labels file");
    }

    const std::size_t n = image_info.dims[0];
    const std::size_t rows = image_info.dims[1];
    const std::size_t cols = image_info.dims[2];
    if (label_info.dims[0] != n) {
        throw std::runtime_error("idx: image/label count mismatch (" +
                                 std::to_string(n) + " vs " +
                                 std::to_string(label_info.dims[0]) + ")");
    }
    const std::size_t pixel_count = n * rows * cols;
    if (image_bytes.size() < 16 + pixel_count) {
        throw std::runtime_error("idx: truncated file " + images_path);
    }
    if (label_bytes.size() < 8 + n) {
        throw std::runtime_error("idx: truncated file " + labels_path);
    }

    Dataset ds;
    ds.split = split;
    ds.num_features = rows * cols;
    ds.num_classes = 10;
    ds.features.resize(pixel_count);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < pixel_count; ++i) {
        ds.features[i] = static_cast<double>(image_bytes[16 + i]) / 255.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        ds.labels[i] = static_cast<std::int32_t>(label_bytes[8 + i]);
    }
    ds.validate();
    normalize(ds, kMnistMean, kMnistStd);
    return ds;
}

} // namespace signopt
