#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "signopt/dataset.hpp"
#include "signopt/rng.hpp"
#include "signopt/vec.hpp"

namespace signopt {

/// Stochastic gradient with batch metadata. `processed` flips to true
/// once a confidence gate has run over the values.
struct GradEstimate {
    Vec values;
    std::int32_t batch_size = 1;
    bool processed = false;
};

/// Per-coordinate smoothness and noise constants for theory runs.
struct TheoryMeta {
    Vec l_vec;
    Vec sigma_vec;
    double f_star = 0.0;
};

struct EvalResult {
    double loss = 0.0;
    GradEstimate grad;
};

/// Differentiable loss contract. `eval` returns loss and analytic
/// gradient on a batch; passing rng == nullptr disables all sampling
/// noise, which is the mode gradient checking and trajectory tests rely
/// on. Objectives are immutable after construction and reentrant given
/// distinct Rng instances.
class Objective {
public:
    virtual ~Objective() = default;

    virtual std::size_t dim() const = 0;

    /// Parameter groups (layers). Default: one group spanning everything.
    virtual std::vector<ParamGroup> groups() const { return whole_vector_group(dim()); }

    virtual EvalResult eval(std::span<const double> theta,
                            std::span<const std::int32_t> batch, Rng* rng) const = 0;

    /// Loss only, noise-free; what the finite-difference oracle probes.
    virtual double loss(std::span<const double> theta,
                        std::span<const std::int32_t> batch) const = 0;

    virtual bool has_exact_grad() const { return false; }
    virtual Vec exact_grad(std::span<const double> theta) const;

    virtual const TheoryMeta* theory_meta() const { return nullptr; }

    /// Hash of the active piecewise-linear region at theta (relu on/off
    /// pattern). 0 for smooth objectives. Gradient checking compares the
    /// signature on both sides of a probe to skip kink coordinates.
    virtual std::uint64_t region_signature(std::span<const double> theta,
                                           std::span<const std::int32_t> batch) const {
        (void)theta;
        (void)batch;
        return 0;
    }

    virtual Vec init_params(Rng& rng) const {
        (void)rng;
        return Vec(dim(), 0.0);
    }
};

/// Objective that scores (features, label) pairs and can report test error.
class ClassifierObjective : public Objective {
public:
    virtual std::int32_t num_classes() const = 0;
    virtual const Dataset* dataset() const = 0;

    /// Class scores for one feature row.
    virtual void logits(std::span<const double> theta, std::span<const double> x,
                        std::span<double> out) const = 0;

    std::int32_t predict(std::span<const double> theta, std::span<const double> x) const;
    /// Fraction of misclassified rows in `ds`.
    virtual double error_rate(std::span<const double> theta, const Dataset& ds) const;
};

/// Batch of n iid draws for objectives whose stochasticity is sampling
/// noise rather than data subsetting (the noisy quadratic).
std::vector<std::int32_t> counting_batch(std::size_t n);

} // namespace signopt
