#pragma once

#include "signopt/objective.hpp"

namespace signopt {

/// f(theta) = 1/2 sum_i L_i theta_i^2 with per-sample gradient noise of
/// known coordinate-wise standard deviation. The workhorse for the
/// smoothness/variance assumptions and the convergence-bound runs:
/// exact gradients, exact minimum f* = 0, exact (L, sigma) metadata.
///
/// A batch of n indices means "average n independent noisy samples"; the
/// index values themselves are ignored. rng == nullptr gives the exact
/// gradient.
class NoisyQuadratic : public Objective {
public:
    NoisyQuadratic(Vec l_vec, Vec sigma_vec);

    std::size_t dim() const override { return meta_.l_vec.size(); }
    EvalResult eval(std::span<const double> theta,
                    std::span<const std::int32_t> batch, Rng* rng) const override;
    double loss(std::span<const double> theta,
                std::span<const std::int32_t> batch) const override;
    bool has_exact_grad() const override { return true; }
    Vec exact_grad(std::span<const double> theta) const override;
    const TheoryMeta* theory_meta() const override { return &meta_; }

private:
    TheoryMeta meta_;
};

} // namespace signopt
