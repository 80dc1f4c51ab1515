#include "signopt/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace signopt {

double TheoryProblemSpec::f0() const {
    double f = 0.0;
    for (std::size_t i = 0; i < l_vec.size(); ++i) {
        f += 0.5 * l_vec[i] * theta0[i] * theta0[i];
    }
    return f;
}

void TheoryProblemSpec::validate() const {
    if (l_vec.empty() || l_vec.size() != sigma_vec.size() || l_vec.size() != theta0.size()) {
        throw std::invalid_argument("theory spec: L, sigma, theta0 must share a positive length");
    }
    for (std::size_t i = 0; i < l_vec.size(); ++i) {
        if (l_vec[i] < 0.0 || sigma_vec[i] < 0.0) {
            throw std::invalid_argument("theory spec: L and sigma must be nonnegative");
        }
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument("theory spec: beta must be in [0, 1)");
    }
    if (steps < 1) {
        throw std::invalid_argument("theory spec: K must be >= 1");
    }
    if (f0() < f_star) {
        throw std::invalid_argument("theory spec: f0 must be >= f_star");
    }
}

double prescribed_learning_rate(const TheoryProblemSpec& spec) {
    const double l1 = l1_norm(spec.l_vec);
    if (!(l1 > 0.0)) {
        throw std::invalid_argument("theory spec: ||L||_1 must be positive for the learning rate");
    }
    return 1.0 / std::sqrt(l1 * static_cast<double>(spec.steps));
}

double convergence_bound(const TheoryProblemSpec& spec) {
    spec.validate();
    const double beta = spec.beta;
    const double one_minus = 1.0 - beta;
    const double momentum_term = 8.0 * beta / (one_minus * one_minus);
    const double bracket = std::sqrt(l1_norm(spec.l_vec)) *
                               (spec.f0() - spec.f_star + 0.5 + momentum_term) +
                           2.0 * l1_norm(spec.sigma_vec);
    const double n = static_cast<double>(spec.steps) * static_cast<double>(spec.steps);
    return bracket * bracket / std::sqrt(n);
}

void SignMomentumMonitor::observe(const Optimizer& opt) {
    const Vec* m = opt.sign_momentum();
    if (m == nullptr) {
        throw std::invalid_argument("sign momentum monitor: optimizer has no sign momentum");
    }
    observe(*m);
}

void SignMomentumMonitor::observe(std::span<const double> sign_momentum) {
    for (double v : sign_momentum) {
        max_abs_ = std::max(max_abs_, std::fabs(v));
    }
}

double second_moment_closed_form(std::uint64_t k, double beta2) {
    if (k < 1) {
        throw std::invalid_argument("second_moment_closed_form: k must be >= 1");
    }
    return 1.0 - std::pow(beta2, static_cast<double>(k));
}

DriftReport momentum_drift_check(const std::vector<Vec>& true_grads, const Vec& l_vec,
                               double beta, std::uint64_t steps) {
    if (true_grads.empty()) {
        throw std::invalid_argument("momentum_drift_check: missing true gradients");
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw std::invalid_argument("momentum_drift_check: beta must be in [0, 1)");
    }
    DriftReport report;
    report.rhs = 4.0 * std::sqrt(l1_norm(l_vec) / static_cast<double>(steps)) * beta /
                 ((1.0 - beta) * (1.0 - beta));
    report.satisfied = true;
    const std::size_t count = true_grads.size();
    const std::size_t d = true_grads[0].size();
    for (std::size_t k = 1; k < count; ++k) {
        double weighted = 0.0;
        double w = 1.0; // beta^t
        for (std::size_t t = 0; t < k; ++t) {
            double l1 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                l1 += std::fabs(true_grads[k - t][i] - true_grads[k][i]);
            }
            weighted += w * l1;
            w *= beta;
        }
        const double scale = beta == 0.0
                                 ? 1.0
                                 : (1.0 - beta) / (1.0 - std::pow(beta, static_cast<double>(k)));
        const double lhs = scale * weighted;
        if (lhs > report.max_lhs) {
            report.max_lhs = lhs;
            report.worst_step = k;
        }
        if (lhs > report.rhs + 1e-12) {
            report.satisfied = false;
        }
    }
    return report;
}

namespace {

struct SeedTrace {
    double mean_l1 = 0.0;        // (1/K) sum ||g_k||_1
    std::vector<Vec> true_grads; // g_0 .. g_K
    double sign_momentum_max = 0.0;
};

SeedTrace run_single(const TheoryProblemSpec& spec, const NoisyQuadratic& objective,
                     const std::string& algo, double lr, Rng rng) {
    HyperParams hp;
    hp.lr = lr;
    hp.beta1 = spec.beta;
    hp.beta2 = 0.999;
    hp.eps = 1e-8;
    hp.weight_decay = 0.0;
    auto opt = make_optimizer(algo, hp, spec.theta0.size(), {});

    Vec theta = spec.theta0;
    const auto batch = counting_batch(spec.steps);
    SignMomentumMonitor monitor;
    SeedTrace trace;
    trace.true_grads.reserve(spec.steps + 1);
    double sum_l1 = 0.0;
    for (std::uint64_t k = 0; k < spec.steps; ++k) {
        Vec g_true = objective.exact_grad(theta);
        sum_l1 += l1_norm(g_true);
        trace.true_grads.push_back(std::move(g_true));
        const EvalResult res = objective.eval(theta, batch, &rng);
        opt->apply(theta, res.grad);
        monitor.observe(*opt);
    }
    trace.true_grads.push_back(objective.exact_grad(theta));
    trace.mean_l1 = sum_l1 / static_cast<double>(spec.steps);
    trace.sign_momentum_max = monitor.max_abs();
    return trace;
}

double mean(const Vec& xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

double standard_error(const Vec& xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double mu = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mu) * (x - mu);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                     static_cast<double>(xs.size()));
}

} // namespace

BoundReport run_convergence_experiment(const TheoryProblemSpec& spec, int num_seeds,
                                    std::uint64_t seed) {
    spec.validate();
    if (num_seeds < 1) {
        throw std::invalid_argument("convergence experiment: need at least one seed");
    }
    const NoisyQuadratic objective(spec.l_vec, spec.sigma_vec);
    if (objective.theory_meta() == nullptr) {
        throw std::logic_error("convergence experiment: objective lacks theory metadata");
    }
    const double lr = prescribed_learning_rate(spec);

    BoundReport report;
    report.bound = convergence_bound(spec);
    report.seeds = num_seeds;
    report.steps = spec.steps;
    report.grad_calls = spec.steps * spec.steps;
    report.learning_rate = lr;
    report.drift.satisfied = true;
    report.drift.rhs = 0.0;

    const Rng root(seed);
    for (int s = 0; s < num_seeds; ++s) {
        // Same noise stream for both variants: only the update rule differs.
        const Rng noise = root.split(static_cast<std::uint64_t>(s));
        SeedTrace alg1 = run_single(spec, objective, "signadam", lr, noise);
        SeedTrace momentum = run_single(spec, objective, "signadampp", lr, noise);
        report.per_seed_signadam.push_back(alg1.mean_l1);
        report.per_seed_signmomentum.push_back(momentum.mean_l1);
        report.sign_momentum_max = std::max({report.sign_momentum_max, alg1.sign_momentum_max, momentum.sign_momentum_max});

        for (const SeedTrace* trace : {&alg1, &momentum}) {
            DriftReport drift =
                momentum_drift_check(trace->true_grads, spec.l_vec, spec.beta, spec.steps);
            report.drift.rhs = drift.rhs;
            if (drift.max_lhs > report.drift.max_lhs) {
                report.drift.max_lhs = drift.max_lhs;
                report.drift.worst_step = drift.worst_step;
            }
            report.drift.satisfied = report.drift.satisfied && drift.satisfied;
        }
    }

    const double avg1 = mean(report.per_seed_signadam);
    const double avg2 = mean(report.per_seed_signmomentum);
    report.empirical_signadam = avg1 * avg1;
    report.empirical_signmomentum = avg2 * avg2;
    report.stderr_signadam = standard_error(report.per_seed_signadam);
    report.stderr_signmomentum = standard_error(report.per_seed_signmomentum);
    report.satisfied = report.empirical_signadam <= report.bound &&
                       report.empirical_signmomentum <= report.bound;
    return report;
}

// ------------------------------ serialization ------------------------------

std::string TheoryProblemSpec::to_json() const {
    nlohmann::json j;
    j["l_vec"] = l_vec;
    j["sigma_vec"] = sigma_vec;
    j["theta0"] = theta0;
    j["f_star"] = f_star;
    j["beta"] = beta;
    j["steps"] = steps;
    return j.dump(2);
}

TheoryProblemSpec TheoryProblemSpec::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    TheoryProblemSpec spec;
    if (j.contains("dim")) {
        // Compact form: uniform L, sigma, theta0 values at a given dim.
        const std::size_t d = j.at("dim").get<std::size_t>();
        spec.l_vec.assign(d, j.value("l", 1.0));
        spec.sigma_vec.assign(d, j.value("sigma", 1.0));
        spec.theta0.assign(d, j.value("theta0", 1.0));
    } else {
        spec.l_vec = j.at("l_vec").get<Vec>();
        spec.sigma_vec = j.at("sigma_vec").get<Vec>();
        spec.theta0 = j.at("theta0").get<Vec>();
    }
    spec.f_star = j.value("f_star", 0.0);
    spec.beta = j.value("beta", 0.9);
    spec.steps = j.value("steps", static_cast<std::uint64_t>(100));
    spec.validate();
    return spec;
}

std::string BoundReport::to_json() const {
    nlohmann::json j;
    j["bound"] = bound;
    j["empirical_signadam"] = empirical_signadam;
    j["empirical_signmomentum"] = empirical_signmomentum;
    j["per_seed_signadam"] = per_seed_signadam;
    j["per_seed_signmomentum"] = per_seed_signmomentum;
    j["stderr_signadam"] = stderr_signadam;
    j["stderr_signmomentum"] = stderr_signmomentum;
    j["seeds"] = seeds;
    j["steps"] = steps;
    j["grad_calls"] = grad_calls;
    j["learning_rate"] = learning_rate;
    j["satisfied"] = satisfied;
    j["sign_momentum_max"] = sign_momentum_max;
    j["drift"] = {{"satisfied", drift.satisfied},
                   {"max_lhs", drift.max_lhs},
                   {"rhs", drift.rhs},
                   {"worst_step", drift.worst_step}};
    return j.dump(2);
}

} // namespace signopt
