#pragma once

#include "signopt/objective.hpp"

namespace signopt {

/// Multinomial logistic regression: softmax cross-entropy over a single
/// affine map. Parameters are the row-major weight matrix followed by the
/// bias vector.
class LogisticRegression : public ClassifierObjective {
public:
    LogisticRegression(std::size_t num_features, std::int32_t num_classes,
                       const Dataset* data);

    std::size_t dim() const override { return weights_len_ + static_cast<std::size_t>(classes_); }
    std::vector<ParamGroup> groups() const override;
    EvalResult eval(std::span<const double> theta,
                    std::span<const std::int32_t> batch, Rng* rng) const override;
    double loss(std::span<const double> theta,
                std::span<const std::int32_t> batch) const override;

    std::int32_t num_classes() const override { return classes_; }
    const Dataset* dataset() const override { return data_; }
    void logits(std::span<const double> theta, std::span<const double> x,
                std::span<double> out) const override;

private:
    std::size_t features_;
    std::int32_t classes_;
    std::size_t weights_len_;
    const Dataset* data_;
};

} // namespace signopt
