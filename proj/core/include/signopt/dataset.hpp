#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signopt/rng.hpp"

namespace signopt {

/// In-memory classification dataset, features stored row-major.
struct Dataset {
    std::size_t num_features = 0;
    std::int32_t num_classes = 0;
    std::vector<double> features; // size() == size * num_features
    std::vector<std::int32_t> labels;
    std::string split = "train"; // "train" | "test"
    bool normalized = false;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * num_features, num_features);
    }
    void validate() const;
};

/// Applies x -> (x - mean) / std to every feature value. Refuses to run
/// twice on the same dataset.
void normalize(Dataset& ds, double mean, double stddev);

/// Like normalize() but with mean/std computed from the data itself, so
/// the result has scalar mean 0 and std 1.
void standardize(Dataset& ds);

/// Gaussian clusters around num_classes centers drawn from rng. Centers
/// are resampled a bounded number of times to keep pairwise distances at
/// least 1 when the box allows it, so small `spread` gives a linearly
/// separable problem.
Dataset synth_blobs(Rng& rng, std::size_t n, std::size_t dim,
                    std::int32_t num_classes, double spread);

/// Mini-batch schedule. The permutation for an epoch depends only on
/// (shuffle_seed, epoch), so any epoch is independently replayable.
struct BatchPlan {
    std::size_t batch_size = 1;
    std::uint64_t shuffle_seed = 0;
    bool drop_last = false;
};

/// One epoch's shuffled index order, partitioned into consecutive slices.
class EpochBatches {
public:
    EpochBatches(std::size_t n, const BatchPlan& plan, std::uint64_t epoch);

    std::size_t num_batches() const { return num_batches_; }
    std::span<const std::int32_t> batch(std::size_t b) const;
    std::span<const std::int32_t> order() const { return order_; }

private:
    std::vector<std::int32_t> order_;
    std::size_t batch_size_;
    std::size_t num_batches_;
};

inline EpochBatches batches(const Dataset& ds, const BatchPlan& plan, std::uint64_t epoch) {
    return EpochBatches(ds.size(), plan, epoch);
}

} // namespace signopt
