#include "signopt/dataset.hpp"

#include <cmath>
#include <stdexcept>

#include "signopt/vec.hpp"

namespace signopt {

void Dataset::validate() const {
    if (features.size() != labels.size() * num_features) {
        throw std::invalid_argument("dataset: feature/label count mismatch");
    }
    for (std::int32_t label : labels) {
        if (label < 0 || label >= num_classes) {
            throw std::invalid_argument("dataset: label out of range");
        }
    }
}

void normalize(Dataset& ds, double mean, double stddev) {
    if (ds.normalized) {
        throw std::logic_error("dataset: already normalized");
    }
    if (!(stddev > 0.0)) {
        throw std::invalid_argument("normalize: std must be positive");
    }
    for (double& v : ds.features) {
        v = (v - mean) / stddev;
    }
    ds.normalized = true;
}

void standardize(Dataset& ds) {
    if (ds.normalized) {
        throw std::logic_error("dataset: already normalized");
    }
    if (ds.features.empty()) {
        throw std::invalid_argument("standardize: empty dataset");
    }
    const double var = population_variance(ds.features);
    double sum = 0.0;
    for (double v : ds.features) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(ds.features.size());
    const double stddev = std::sqrt(var);
    if (!(stddev > 0.0)) {
        throw std::invalid_argument("standardize: constant features");
    }
    normalize(ds, mean, stddev);
}

Dataset synth_blobs(Rng& rng, std::size_t n, std::size_t dim,
                    std::int32_t num_classes, double spread) {
    if (num_classes <= 0 || n < static_cast<std::size_t>(num_classes)) {
        throw std::invalid_argument("synth_blobs: need n >= num_classes >= 1");
    }
    if (spread < 0.0) {
        throw std::invalid_argument("synth_blobs: spread must be >= 0");
    }

    // Centers in [-1, 1]^dim, retried toward pairwise distance >= 1.
    std::vector<std::vector<double>> centers;
    centers.reserve(static_cast<std::size_t>(num_classes));
    for (std::int32_t c = 0; c < num_classes; ++c) {
        std::vector<double> best;
        double best_min_dist = -1.0;
        for (int attempt = 0; attempt < 100; ++attempt) {
            std::vector<double> cand(dim);
            for (double& v : cand) {
                v = rng.uniform(-1.0, 1.0);
            }
            double min_dist = 2.0 * static_cast<double>(dim);
            for (const auto& other : centers) {
                double d2 = 0.0;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double diff = cand[i] - other[i];
                    d2 += diff * diff;
                }
                min_dist = std::min(min_dist, std::sqrt(d2));
            }
            if (min_dist > best_min_dist) {
                best_min_dist = min_dist;
                best = std::move(cand);
            }
            if (best_min_dist >= 1.0) {
                break;
            }
        }
        centers.push_back(std::move(best));
    }

    Dataset ds;
    ds.num_features = dim;
    ds.num_classes = num_classes;
    ds.features.resize(n * dim);
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t label = static_cast<std::int32_t>(i % static_cast<std::size_t>(num_classes));
        ds.labels[i] = label;
        const auto& center = centers[static_cast<std::size_t>(label)];
        for (std::size_t j = 0; j < dim; ++j) {
            ds.features[i * dim + j] = center[j] + spread * rng.normal();
        }
    }
    return ds;
}

EpochBatches::EpochBatches(std::size_t n, const BatchPlan& plan, std::uint64_t epoch)
    : batch_size_(plan.batch_size) {
    if (plan.batch_size == 0) {
        throw std::invalid_argument("batches: batch_size must be >= 1");
    }
    if (plan.drop_last && plan.batch_size > n) {
        throw std::invalid_argument("batches: batch_size exceeds dataset with drop_last");
    }
    order_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        order_[i] = static_cast<std::int32_t>(i);
    }
    Rng rng(mix_seed(plan.shuffle_seed, epoch));
    shuffle_indices(order_, rng);
    if (plan.drop_last) {
        num_batches_ = n / batch_size_;
    } else {
        num_batches_ = (n + batch_size_ - 1) / batch_size_;
    }
}

std::span<const std::int32_t> EpochBatches::batch(std::size_t b) const {
    if (b >= num_batches_) {
        throw std::out_of_range("batches: batch index out of range");
    }
    const std::size_t begin = b * batch_size_;
    const std::size_t end = std::min(begin + batch_size_, order_.size());
    return std::span<const std::int32_t>(order_).subspan(begin, end - begin);
}

} // namespace signopt
