#pragma once

#include "signopt/objective.hpp"

namespace signopt {

enum class Activation { relu, tanh };

Activation parse_activation(const std::string& name);

/// Fully-connected network with softmax cross-entropy, analytic backprop,
/// and per-layer parameter groups (weights and biases separately) so the
/// confidence gate can act per group. Layer l maps sizes[l] -> sizes[l+1];
/// the last layer has no activation.
class Mlp : public ClassifierObjective {
public:
    Mlp(std::vector<std::size_t> layer_sizes, Activation activation, const Dataset* data);

    std::size_t dim() const override { return total_params_; }
    std::vector<ParamGroup> groups() const override;
    EvalResult eval(std::span<const double> theta,
                    std::span<const std::int32_t> batch, Rng* rng) const override;
    double loss(std::span<const double> theta,
                std::span<const std::int32_t> batch) const override;
    std::uint64_t region_signature(std::span<const double> theta,
                                   std::span<const std::int32_t> batch) const override;

    /// Glorot-uniform weights, zero biases.
    Vec init_params(Rng& rng) const override;

    std::int32_t num_classes() const override;
    const Dataset* dataset() const override { return data_; }
    void logits(std::span<const double> theta, std::span<const double> x,
                std::span<double> out) const override;
    double error_rate(std::span<const double> theta, const Dataset& ds) const override;

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    Activation activation() const { return act_; }

private:
    struct Pass;
    void forward(std::span<const double> theta, std::span<const std::int32_t> batch,
                 Pass& pass) const;

    std::vector<std::size_t> sizes_;
    Activation act_;
    const Dataset* data_;
    std::size_t total_params_ = 0;
    std::vector<std::size_t> weight_offsets_;
    std::vector<std::size_t> bias_offsets_;
};

} // namespace signopt
