#include "signopt/quadratic.hpp"

#include <stdexcept>

namespace signopt {

NoisyQuadratic::NoisyQuadratic(Vec l_vec, Vec sigma_vec) {
    if (l_vec.size() != sigma_vec.size() || l_vec.empty()) {
        throw std::invalid_argument("noisy_quadratic: L and sigma must have equal positive length");
    }
    for (std::size_t i = 0; i < l_vec.size(); ++i) {
        if (l_vec[i] < 0.0 || sigma_vec[i] < 0.0) {
            throw std::invalid_argument("noisy_quadratic: L and sigma must be nonnegative");
        }
    }
    meta_.l_vec = std::move(l_vec);
    meta_.sigma_vec = std::move(sigma_vec);
    meta_.f_star = 0.0;
}

double NoisyQuadratic::loss(std::span<const double> theta,
                            std::span<const std::int32_t>) const {
    if (theta.size() != dim()) {
        throw std::invalid_argument("noisy_quadratic: theta dimension mismatch");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        f += 0.5 * meta_.l_vec[i] * theta[i] * theta[i];
    }
    return f;
}

Vec NoisyQuadratic::exact_grad(std::span<const double> theta) const {
    if (theta.size() != dim()) {
        throw std::invalid_argument("noisy_quadratic: theta dimension mismatch");
    }
    Vec g(dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = meta_.l_vec[i] * theta[i];
    }
    return g;
}

EvalResult NoisyQuadratic::eval(std::span<const double> theta,
                                std::span<const std::int32_t> batch, Rng* rng) const {
    EvalResult out;
    out.loss = loss(theta, batch);
    out.grad.values = exact_grad(theta);
    out.grad.batch_size = batch.empty() ? 1 : static_cast<std::int32_t>(batch.size());
    if (rng != nullptr) {
        const std::size_t n = batch.empty() ? 1 : batch.size();
        Vec noise(dim(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t i = 0; i < dim(); ++i) {
                noise[i] += meta_.sigma_vec[i] * rng->normal();
            }
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < dim(); ++i) {
            out.grad.values[i] += noise[i] * inv_n;
        }
    }
    return out;
}

} // namespace signopt
