#include "signopt/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace signopt {

namespace {

// Stable log-sum-exp softmax; fills probs and returns -log p[label].
double softmax_nll(std::span<const double> scores, std::int32_t label,
                   std::span<double> probs) {
    double peak = scores[0];
    for (double s : scores) {
        peak = std::max(peak, s);
    }
    double z = 0.0;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        probs[c] = std::exp(scores[c] - peak);
        z += probs[c];
    }
    for (std::size_t c = 0; c < scores.size(); ++c) {
        probs[c] /= z;
    }
    return std::log(z) - (scores[static_cast<std::size_t>(label)] - peak);
}

} // namespace

LogisticRegression::LogisticRegression(std::size_t num_features, std::int32_t num_classes,
                                       const Dataset* data)
    : features_(num_features),
      classes_(num_classes),
      weights_len_(num_features * static_cast<std::size_t>(num_classes)),
      data_(data) {
    if (num_features == 0 || num_classes <= 0) {
        throw std::invalid_argument("logistic_regression: dimensions must be positive");
    }
    if (data_ != nullptr && data_->num_features != features_) {
        throw std::invalid_argument("logistic_regression: size mismatch with data");
    }
}

std::vector<ParamGroup> LogisticRegression::groups() const {
    return {
        ParamGroup{0, weights_len_, "linear.weight"},
        ParamGroup{weights_len_, static_cast<std::size_t>(classes_), "linear.bias"},
    };
}

void LogisticRegression::logits(std::span<const double> theta, std::span<const double> x,
                                std::span<double> out) const {
    const double* bias = theta.data() + weights_len_;
    for (std::int32_t c = 0; c < classes_; ++c) {
        const double* row = theta.data() + static_cast<std::size_t>(c) * features_;
        double z = bias[c];
        for (std::size_t f = 0; f < features_; ++f) {
            z += row[f] * x[f];
        }
        out[static_cast<std::size_t>(c)] = z;
    }
}

double LogisticRegression::loss(std::span<const double> theta,
                                std::span<const std::int32_t> batch) const {
    if (data_ == nullptr) {
        throw std::logic_error("logistic_regression: no dataset bound");
    }
    if (batch.empty()) {
        throw std::invalid_argument("logistic_regression: empty batch");
    }
    Vec scores(static_cast<std::size_t>(classes_));
    Vec probs(static_cast<std::size_t>(classes_));
    double total = 0.0;
    for (std::int32_t idx : batch) {
        const std::int32_t label = data_->labels[static_cast<std::size_t>(idx)];
        if (label < 0 || label >= classes_) {
            throw std::invalid_argument("logistic_regression: label out of range");
        }
        logits(theta, data_->row(static_cast<std::size_t>(idx)), scores);
        total += softmax_nll(scores, label, probs);
    }
    return total / static_cast<double>(batch.size());
}

EvalResult LogisticRegression::eval(std::span<const double> theta,
                                    std::span<const std::int32_t> batch, Rng*) const {
    if (data_ == nullptr) {
        throw std::logic_error("logistic_regression: no dataset bound");
    }
    if (batch.empty()) {
        throw std::invalid_argument("logistic_regression: empty batch");
    }
    EvalResult out;
    out.grad.values.assign(dim(), 0.0);
    out.grad.batch_size = static_cast<std::int32_t>(batch.size());
    Vec scores(static_cast<std::size_t>(classes_));
    Vec probs(static_cast<std::size_t>(classes_));
    double total = 0.0;
    double* dw = out.grad.values.data();
    double* db = out.grad.values.data() + weights_len_;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::int32_t idx : batch) {
        const std::int32_t label = data_->labels[static_cast<std::size_t>(idx)];
        if (label < 0 || label >= classes_) {
            throw std::invalid_argument("logistic_regression: label out of range");
        }
        const auto x = data_->row(static_cast<std::size_t>(idx));
        logits(theta, x, scores);
        total += softmax_nll(scores, label, probs);
        for (std::int32_t c = 0; c < classes_; ++c) {
            const double dz = (probs[static_cast<std::size_t>(c)] -
                               (c == label ? 1.0 : 0.0)) * inv_b;
            double* row = dw + static_cast<std::size_t>(c) * features_;
            for (std::size_t f = 0; f < features_; ++f) {
                row[f] += dz * x[f];
            }
            db[c] += dz;
        }
    }
    out.loss = total * inv_b;
    return out;
}

} // namespace signopt
