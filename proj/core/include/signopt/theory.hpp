#pragma once

#include <string>

#include "signopt/optimizers.hpp"
#include "signopt/quadratic.hpp"
#include "signopt/vec.hpp"

namespace signopt {

/// Inputs of the non-convex convergence-rate experiment. The objective is
/// the noisy quadratic built from (l_vec, sigma_vec); f0 is derived from
/// theta0, f* = 0 by construction.
struct TheoryProblemSpec {
    Vec l_vec;
    Vec sigma_vec;
    Vec theta0;
    double f_star = 0.0;
    double beta = 0.9;      // momentum decay in both the bound and the runs
    std::uint64_t steps = 100; // K

    double f0() const;
    void validate() const;

    std::string to_json() const;
    static TheoryProblemSpec from_json(const std::string& text);
};

/// Right-hand side of the convergence bound with N = K^2 (batch size K
/// over K steps):
///   (1/sqrt(N)) * [ sqrt(||L||_1) (f0 - f* + 1/2 + 8 beta/(1-beta)^2)
///                   + 2 ||sigma||_1 ]^2
double convergence_bound(const TheoryProblemSpec& spec);

/// Prescribed learning rate 1/sqrt(||L||_1 K).
double prescribed_learning_rate(const TheoryProblemSpec& spec);

/// Streaming max |m_k,i| over an optimizer run. Sign-fed momentum never
/// leaves [-1, 1]; this watches that bound hold.
class SignMomentumMonitor {
public:
    void observe(const Optimizer& opt);
    void observe(std::span<const double> sign_momentum);
    double max_abs() const { return max_abs_; }
    bool within_bound(double slack = 1e-15) const { return max_abs_ <= 1.0 + slack; }

private:
    double max_abs_ = 0.0;
};

/// Closed form of signADAM's second moment on everywhere-nonzero
/// gradients: 1 - beta2^k, straight from the recurrence.
double second_moment_closed_form(std::uint64_t k, double beta2);

struct DriftReport {
    bool satisfied = false;
    double max_lhs = 0.0;
    double rhs = 0.0;
    std::uint64_t worst_step = 0;
};

/// Momentum drift inequality along a true-gradient trajectory:
///   (1-beta)/(1-beta^k) sum_{t=0}^{k-1} beta^t ||g_{k-t} - g_k||_1
///     <= 4 * sqrt(||L||_1 / K) * beta/(1-beta)^2
/// checked at every k in [1, K].
DriftReport momentum_drift_check(const std::vector<Vec>& true_grads, const Vec& l_vec,
                                 double beta, std::uint64_t steps);

struct BoundReport {
    double bound = 0.0;
    // Squared seed-average of (1/K) sum_k ||g_k||_1 for each run variant.
    double empirical_signadam = 0.0;
    double empirical_signmomentum = 0.0;
    Vec per_seed_signadam;
    Vec per_seed_signmomentum;
    double stderr_signadam = 0.0;
    double stderr_signmomentum = 0.0;
    int seeds = 0;
    std::uint64_t steps = 0;
    std::uint64_t grad_calls = 0; // N = K^2
    double learning_rate = 0.0;
    bool satisfied = false;        // both variants under the bound
    DriftReport drift;             // drift inequality over the same trajectories
    double sign_momentum_max = 0.0;

    std::string to_json() const;
};

/// Runs the prescribed experiment: per seed, K steps of signADAM
/// (beta1 = beta) with lr = 1/sqrt(||L||_1 K) and batch size K, recording
/// the true gradient L .* theta before each step. A companion variant
/// drops the second-moment denominator (pure sign momentum,
/// theta -= lr * m), matching the update the bound is derived for; both
/// are reported. Also evaluates the drift inequality and the momentum
/// bound along every trajectory.
BoundReport run_convergence_experiment(const TheoryProblemSpec& spec, int num_seeds,
                                       std::uint64_t seed);

} // namespace signopt
