#include "signopt/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace signopt {

namespace {

struct ProbeResult {
    enum class Kind { scored, kink, too_small } kind;
    double rel_error = 0.0;
    double numeric = 0.0;
};

ProbeResult probe_coordinate(const Objective& obj, Vec& probe,
                             std::span<const std::int32_t> batch, std::size_t i,
                             double analytic, double step, double min_magnitude) {
    const double original = probe[i];
    probe[i] = original + step;
    const double f_plus = obj.loss(probe, batch);
    const std::uint64_t sig_plus = obj.region_signature(probe, batch);
    probe[i] = original - step;
    const double f_minus = obj.loss(probe, batch);
    const std::uint64_t sig_minus = obj.region_signature(probe, batch);
    probe[i] = original;

    if (sig_plus != sig_minus) {
        return {ProbeResult::Kind::kink, 0.0, 0.0};
    }
    const double numeric = (f_plus - f_minus) / (2.0 * step);
    if (std::max(std::fabs(analytic), std::fabs(numeric)) < min_magnitude) {
        return {ProbeResult::Kind::too_small, 0.0, numeric};
    }
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-12});
    return {ProbeResult::Kind::scored, std::fabs(analytic - numeric) / denom, numeric};
}

} // namespace

GradCheckReport grad_check(const Objective& obj, std::span<const double> theta,
                           std::span<const std::int32_t> batch, double tolerance,
                           double step, std::size_t max_coords, Rng* sampler,
                           double min_magnitude) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("grad_check: step must be positive");
    }
    const std::size_t d = obj.dim();
    if (theta.size() != d) {
        throw std::invalid_argument("grad_check: theta dimension mismatch");
    }
    if (max_coords > 0 && sampler == nullptr) {
        throw std::invalid_argument("grad_check: sampling requires an rng");
    }

    const Vec analytic = obj.eval(theta, batch, nullptr).grad.values;

    GradCheckReport report;
    report.tolerance = tolerance;
    Vec probe(theta.begin(), theta.end());

    const auto score = [&](std::size_t i) {
        const ProbeResult r =
            probe_coordinate(obj, probe, batch, i, analytic[i], step, min_magnitude);
        switch (r.kind) {
        case ProbeResult::Kind::kink:
            report.excluded.push_back(i);
            return false;
        case ProbeResult::Kind::too_small:
            report.skipped_small.push_back(i);
            return false;
        case ProbeResult::Kind::scored:
            ++report.checked;
            if (r.rel_error > report.max_rel_error) {
                report.max_rel_error = r.rel_error;
                report.worst_coordinate = i;
                report.worst_analytic = analytic[i];
                report.worst_numeric = r.numeric;
            }
            return true;
        }
        return false;
    };

    if (max_coords == 0 || max_coords >= d) {
        for (std::size_t i = 0; i < d; ++i) {
            score(i);
        }
    } else {
        // Keep drawing fresh coordinates until max_coords are scored or the
        // candidate budget runs out (heavily screened objectives).
        std::unordered_set<std::size_t> seen;
        std::size_t attempts = 0;
        const std::size_t attempt_budget = std::max<std::size_t>(50 * max_coords, 1000);
        while (report.checked < max_coords && seen.size() < d && attempts < attempt_budget) {
            ++attempts;
            const auto i = static_cast<std::size_t>(sampler->below(d));
            if (!seen.insert(i).second) {
                continue;
            }
            score(i);
        }
    }
    report.passed = report.checked > 0 && report.max_rel_error < tolerance;
    return report;
}

} // namespace signopt
