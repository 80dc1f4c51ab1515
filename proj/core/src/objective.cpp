#include "signopt/objective.hpp"

#include <stdexcept>

namespace signopt {

Vec Objective::exact_grad(std::span<const double> theta) const {
    (void)theta;
    throw std::logic_error("objective: exact gradient not available");
}

std::int32_t ClassifierObjective::predict(std::span<const double> theta,
                                          std::span<const double> x) const {
    Vec scores(static_cast<std::size_t>(num_classes()));
    logits(theta, x, scores);
    std::int32_t best = 0;
    for (std::int32_t c = 1; c < num_classes(); ++c) {
        if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) {
            best = c;
        }
    }
    return best;
}

double ClassifierObjective::error_rate(std::span<const double> theta,
                                       const Dataset& ds) const {
    if (ds.size() == 0) {
        throw std::invalid_argument("error_rate: empty dataset");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (predict(theta, ds.row(i)) != ds.labels[i]) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(ds.size());
}

std::vector<std::int32_t> counting_batch(std::size_t n) {
    std::vector<std::int32_t> batch(n);
    for (std::size_t i = 0; i < n; ++i) {
        batch[i] = static_cast<std::int32_t>(i);
    }
    return batch;
}

} // namespace signopt
