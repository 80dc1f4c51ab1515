#include "signopt/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace signopt {

void ConfidenceSpec::validate() const {
    if (kind == ConfidenceKind::fixed) {
        if (alpha < 0.0) {
            throw std::invalid_argument("confidence: alpha must be >= 0");
        }
        if (calibrate && !(target_sparsity >= 0.0 && target_sparsity <= 1.0)) {
            throw std::invalid_argument("confidence: target_sparsity must be in [0, 1]");
        }
    } else if (kind == ConfidenceKind::adaptive) {
        if (!(beta1 >= 0.0 && beta1 < 1.0)) {
            throw std::invalid_argument("confidence: beta1 must be in [0, 1)");
        }
        if (beta2 < 0.0) {
            throw std::invalid_argument("confidence: beta2 must be >= 0");
        }
    }
}

Vec hard_threshold_sign(std::span<const double> g, double alpha) {
    if (alpha < 0.0) {
        throw std::invalid_argument("hard_threshold_sign: alpha must be >= 0");
    }
    require_finite(g);
    Vec out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = confidence_gated(g[i], alpha) ? 0.0 : (g[i] > 0.0 ? 1.0 : -1.0);
    }
    return out;
}

double remaining_ratio(std::span<const double> raw, double alpha) {
    if (alpha < 0.0) {
        throw std::invalid_argument("remaining_ratio: alpha must be >= 0");
    }
    require_finite(raw);
    double total = 0.0;
    double kept = 0.0;
    for (double v : raw) {
        total += v * v;
        if (!confidence_gated(v, alpha)) {
            kept += v * v;
        }
    }
    if (total == 0.0) {
        throw std::invalid_argument("remaining_ratio: undefined ratio for zero gradient");
    }
    return std::sqrt(kept) / std::sqrt(total);
}

double sparsity(std::span<const double> g) {
    if (g.empty()) {
        throw std::invalid_argument("sparsity: empty input");
    }
    std::size_t zeros = 0;
    for (double v : g) {
        if (v == 0.0) {
            ++zeros;
        }
    }
    return static_cast<double>(zeros) / static_cast<double>(g.size());
}

double adaptive_alpha_step(double& m_t, std::span<const double> grad_group,
                           double beta1, double beta2) {
    if (!(beta1 >= 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("adaptive_alpha_step: beta1 must be in [0, 1)");
    }
    if (beta2 < 0.0) {
        throw std::invalid_argument("adaptive_alpha_step: beta2 must be >= 0");
    }
    if (grad_group.empty()) {
        throw std::invalid_argument("adaptive_alpha_step: empty group");
    }
    const double stddev = std::sqrt(population_variance(grad_group));
    m_t = beta1 * m_t + (1.0 - beta1) * stddev;
    return beta2 * m_t;
}

double calibrate_alpha(std::span<const double> g, double target_sparsity) {
    require_finite(g);
    if (g.empty()) {
        throw std::invalid_argument("calibrate_alpha: empty gradient");
    }
    if (!(target_sparsity >= 0.0 && target_sparsity <= 1.0)) {
        throw std::invalid_argument("calibrate_alpha: target_sparsity must be in [0, 1]");
    }
    Vec mags(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        mags[i] = std::fabs(g[i]);
    }
    std::sort(mags.begin(), mags.end());
    if (target_sparsity == 0.0) {
        return 0.0;
    }
    // Smallest magnitude quantile whose closed gate reaches the target.
    const std::size_t count = static_cast<std::size_t>(
        std::ceil(target_sparsity * static_cast<double>(mags.size())));
    return mags[std::min(count, mags.size()) - 1];
}

} // namespace signopt
