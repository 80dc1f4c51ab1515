#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "signopt/vec.hpp"

namespace signopt {

/// How the confidence gate is parameterized.
///
/// fixed:    constant factor alpha; when `calibrate` is set the concrete
///           alpha is picked at run start from a gradient-magnitude
///           quantile (target_sparsity), since no universal value exists.
/// adaptive: alpha_t = beta2 * m_t with
///           m_t = beta1 * m_{t-1} + (1 - beta1) * std(grad_group),
///           tracked per parameter group.
/// none:     gate disabled (alpha = 0 everywhere).
enum class ConfidenceKind { none, fixed, adaptive };

struct ConfidenceSpec {
    ConfidenceKind kind = ConfidenceKind::none;
    double alpha = 0.0;
    bool calibrate = false;
    double target_sparsity = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;

    void validate() const;
};

/// Per-group moving average of gradient standard deviations.
struct AdaptiveAlphaState {
    Vec m; // one entry per parameter group, always >= 0
    std::uint64_t t = 0;
};

/// Confidence-gated sign: 0 where |g_i| <= alpha (closed interval),
/// sign(g_i) elsewhere. Equals F_conf(g, alpha) .* g with the delta/|g|
/// factor folded into the learning rate.
Vec hard_threshold_sign(std::span<const double> g, double alpha);

/// True iff the gate zeroes this component. The boundary rule lives here
/// and nowhere else.
inline bool confidence_gated(double g, double alpha) {
    return g <= alpha && g >= -alpha;
}

/// Fraction of gradient L2 magnitude surviving the gate:
/// ||g .* mask||_2 / ||g||_2, in [0, 1]. Throws on a zero vector.
double remaining_ratio(std::span<const double> raw, double alpha);

/// Fraction of exactly-zero entries. Input must be nonempty.
double sparsity(std::span<const double> g);

/// One adaptive-alpha update for a single group. Mutates m_t in place and
/// returns alpha_t = beta2 * m_t.
double adaptive_alpha_step(double& m_t, std::span<const double> grad_group,
                           double beta1, double beta2);

/// Alpha such that roughly `target_sparsity` of |g| entries fall inside
/// the closed gate. Used for the calibrated default.
double calibrate_alpha(std::span<const double> g, double target_sparsity);

} // namespace signopt
