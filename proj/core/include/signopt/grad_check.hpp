#pragma once

#include "signopt/objective.hpp"

namespace signopt {

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t worst_coordinate = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t checked = 0;
    std::vector<std::size_t> excluded;      // kink coordinates, flagged not scored
    std::vector<std::size_t> skipped_small; // below the measurability floor
    double tolerance = 0.0;
    bool passed = false;
};

/// Central-difference check of the analytic gradient on a fixed batch:
/// (f(theta + h e_i) - f(theta - h e_i)) / 2h against eval()'s gradient,
/// relative error |a-b| / max(|a|,|b|,1e-12). Coordinates whose probe
/// points land in different piecewise-linear regions (relu kinks) are
/// excluded and reported. `max_coords` > 0 samples that many distinct
/// scoreable coordinates with `sampler`; otherwise every coordinate is
/// checked.
///
/// `min_magnitude` screens out coordinates whose gradient is too small to
/// measure: the difference quotient carries an absolute noise of roughly
/// eps*|f|/h from cancellation, so below that scale the relative error
/// reflects arithmetic, not the gradient. Screened coordinates are
/// flagged in skipped_small, never silently dropped.
GradCheckReport grad_check(const Objective& obj, std::span<const double> theta,
                           std::span<const std::int32_t> batch, double tolerance,
                           double step = 1e-5, std::size_t max_coords = 0,
                           Rng* sampler = nullptr, double min_magnitude = 0.0);

} // namespace signopt
