#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "signopt/rng.hpp"

namespace signopt {

using Vec = std::vector<double>;

/// Contiguous slice of a flat parameter vector, usually one layer's
/// weights or biases.
struct ParamGroup {
    std::size_t offset = 0;
    std::size_t length = 0;
    std::string name;
};

/// Flat model parameters with layer-group boundaries. Groups must be
/// disjoint, ordered, and cover [0, d) exactly.
struct ParamVector {
    Vec data;
    std::vector<ParamGroup> groups;

    std::size_t dim() const { return data.size(); }
    std::span<double> group_span(std::size_t g);
    std::span<const double> group_span(std::size_t g) const;
    /// Throws std::invalid_argument when the group invariant is broken.
    void validate() const;
};

/// Single group covering the whole vector.
std::vector<ParamGroup> whole_vector_group(std::size_t dim);

/// Throws std::invalid_argument("non-finite gradient") on NaN/Inf input.
void require_finite(std::span<const double> x, const char* what = "gradient");

/// Elementwise three-valued sign: -1, 0, +1. Strict zero, no epsilon floor.
Vec sign(std::span<const double> x);

double l1_norm(std::span<const double> x);
double l2_norm(std::span<const double> x);

/// Population variance: mean of squares minus square of mean. Length >= 1.
double population_variance(std::span<const double> x);

/// n Gaussian draws, mean `mean` and standard deviation `stddev` (>= 0).
Vec gauss(Rng& rng, std::size_t n, double mean, double stddev);

} // namespace signopt
