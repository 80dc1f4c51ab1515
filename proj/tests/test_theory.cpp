#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "signopt/theory.hpp"
#include "test_util.hpp"

using namespace signopt;

namespace {

TheoryProblemSpec uniform_spec(std::size_t d, double l, double sigma, double theta0,
                               double beta, std::uint64_t steps) {
    TheoryProblemSpec spec;
    spec.l_vec.assign(d, l);
    spec.sigma_vec.assign(d, sigma);
    spec.theta0.assign(d, theta0);
    spec.beta = beta;
    spec.steps = steps;
    return spec;
}

} // namespace

TEST_CASE("convergence bound: closed cases and symbolic reference") {
    SUBCASE("beta = 0, L=[1], sigma=[0], f0 - f* = 1, K = 1 gives 2.25") {
        TheoryProblemSpec spec = uniform_spec(1, 1.0, 0.0, std::sqrt(2.0), 0.0, 1);
        CHECK(spec.f0() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(convergence_bound(spec) == doctest::Approx(2.25).epsilon(1e-14));
    }

    SUBCASE("matches an independently composed expression on random tuples") {
        Rng rng(61);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t d = 1 + static_cast<std::size_t>(rng.below(6));
            TheoryProblemSpec spec;
            spec.l_vec = testutil::random_vec(rng, d, 0.01, 4.0);
            spec.sigma_vec = testutil::random_vec(rng, d, 0.0, 2.0);
            spec.theta0 = testutil::random_vec(rng, d, -2.0, 2.0);
            spec.beta = rng.uniform(0.0, 0.99);
            spec.steps = 1 + rng.below(1000);

            long double l1 = 0.0L, s1 = 0.0L, f0 = 0.0L;
            for (std::size_t i = 0; i < d; ++i) {
                l1 += std::fabs((long double)spec.l_vec[i]);
                s1 += std::fabs((long double)spec.sigma_vec[i]);
                f0 += 0.5L * spec.l_vec[i] * spec.theta0[i] * spec.theta0[i];
            }
            const long double b = spec.beta;
            const long double inner =
                std::sqrt(l1) * (f0 - 0.0L + 0.5L + 8.0L * b / ((1.0L - b) * (1.0L - b))) +
                2.0L * s1;
            const long double want =
                inner * inner / std::sqrt((long double)spec.steps * (long double)spec.steps);
            CHECK(convergence_bound(spec) ==
                  doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
        }
    }

    SUBCASE("strictly increasing in beta") {
        double prev = -1.0;
        for (int i = 0; i < 20; ++i) {
            const double beta = 0.999 * static_cast<double>(i) / 19.0;
            const double bound = convergence_bound(uniform_spec(3, 1.0, 0.5, 1.0, beta, 50));
            CHECK(bound > prev);
            prev = bound;
        }
    }

    SUBCASE("invalid specs are rejected") {
        CHECK_THROWS_AS(convergence_bound(uniform_spec(2, 1.0, 1.0, 1.0, 1.0, 10)),
                        std::invalid_argument);
        CHECK_THROWS_AS(convergence_bound(uniform_spec(2, -1.0, 1.0, 1.0, 0.5, 10)),
                        std::invalid_argument);
        TheoryProblemSpec below_fstar = uniform_spec(2, 1.0, 1.0, 0.0, 0.5, 10);
        below_fstar.f_star = 1.0;
        CHECK_THROWS_AS(convergence_bound(below_fstar), std::invalid_argument);
    }
}

TEST_CASE("prescribed learning rate") {
    const TheoryProblemSpec spec = uniform_spec(10, 1.0, 1.0, 1.0, 0.9, 100);
    CHECK(prescribed_learning_rate(spec) ==
          doctest::Approx(1.0 / std::sqrt(1000.0)).epsilon(1e-15));
}

TEST_CASE("v_k closed form") {
    CHECK(second_moment_closed_form(1, 0.999) == 1.0 - 0.999);
    CHECK(second_moment_closed_form(1000000, 0.9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(second_moment_closed_form(2, 0.9) == doctest::Approx(0.19).epsilon(1e-15));
    CHECK_THROWS_AS(second_moment_closed_form(0, 0.9), std::invalid_argument);
}

TEST_CASE("sign momentum monitor") {
    SUBCASE("constant sign saturates monotonically toward 1") {
        HyperParams hp;
        hp.lr = 0.01;
        hp.beta1 = 0.9;
        hp.weight_decay = 0.0;
        hp.confidence = ConfidenceSpec{ConfidenceKind::fixed, 0.0, false, 0.9, 0.9, 0.999};
        auto opt = make_optimizer("signadampp", hp, 1, {});
        Vec theta{0.0};
        SignMomentumMonitor monitor;
        double prev = 0.0;
        for (int s = 0; s < 500; ++s) {
            opt->apply(theta, GradEstimate{Vec{1.0}, 1, false});
            monitor.observe(*opt);
            const double m = opt->first_moment()[0];
            CHECK(m >= prev);
            CHECK(m <= 1.0);
            prev = m;
        }
        CHECK(monitor.max_abs() <= 1.0);
        CHECK(monitor.max_abs() > 0.999);
    }

    SUBCASE("beta = 0 hits exactly 1 on any nonzero gradient") {
        HyperParams hp;
        hp.lr = 0.01;
        hp.beta1 = 0.0;
        hp.beta2 = 0.999;
        hp.weight_decay = 0.0;
        auto opt = make_optimizer("signadam", hp, 2, {});
        Vec theta{0.0, 0.0};
        SignMomentumMonitor monitor;
        opt->apply(theta, GradEstimate{Vec{0.3, -7.0}, 1, false});
        monitor.observe(*opt);
        CHECK(monitor.max_abs() == 1.0);
    }

    SUBCASE("rejects optimizers without sign momentum") {
        HyperParams hp;
        hp.weight_decay = 0.0;
        auto opt = make_optimizer("sgd", hp, 2, {});
        SignMomentumMonitor monitor;
        CHECK_THROWS_AS(monitor.observe(*opt), std::invalid_argument);
    }
}

TEST_CASE("momentum drift check") {
    SUBCASE("beta = 0 degenerates to 0 <= 0") {
        std::vector<Vec> grads(11, Vec{1.0, -2.0});
        const DriftReport report = momentum_drift_check(grads, Vec{1.0, 1.0}, 0.0, 10);
        CHECK(report.satisfied);
        CHECK(report.max_lhs == 0.0);
        CHECK(report.rhs == 0.0);
    }

    SUBCASE("constant gradients have zero drift") {
        std::vector<Vec> grads(21, Vec{0.5, 0.5, -0.5});
        const DriftReport report = momentum_drift_check(grads, Vec{2.0, 2.0, 2.0}, 0.9, 20);
        CHECK(report.satisfied);
        CHECK(report.max_lhs == 0.0);
        CHECK(report.rhs > 0.0);
    }

    SUBCASE("flat directions (L = 0) contribute nothing") {
        std::vector<Vec> grads(6, Vec{0.0});
        const DriftReport report = momentum_drift_check(grads, Vec{0.0}, 0.9, 5);
        CHECK(report.satisfied);
        CHECK(report.max_lhs == 0.0);
    }
}

TEST_CASE("convergence experiment") {
    SUBCASE("noise-free start at the minimum is exactly optimal") {
        const TheoryProblemSpec spec = uniform_spec(4, 1.0, 0.0, 0.0, 0.9, 20);
        const BoundReport report = run_convergence_experiment(spec, 3, 1);
        CHECK(report.empirical_signadam == 0.0);
        CHECK(report.empirical_signmomentum == 0.0);
        CHECK(report.satisfied);
        CHECK(report.drift.satisfied);
    }

    SUBCASE("d=10 unit quadratic satisfies the bound and both inequalities") {
        const TheoryProblemSpec spec = uniform_spec(10, 1.0, 1.0, 1.0, 0.9, 30);
        const BoundReport report = run_convergence_experiment(spec, 5, 7);
        CHECK(report.satisfied);
        CHECK(report.empirical_signadam <= report.bound);
        CHECK(report.empirical_signmomentum <= report.bound);
        CHECK(report.drift.satisfied);
        CHECK(report.drift.max_lhs <= report.drift.rhs);
        CHECK(report.sign_momentum_max <= 1.0 + 1e-15);
        CHECK(report.grad_calls == 900);
        CHECK(report.per_seed_signadam.size() == 5);
    }

    SUBCASE("deterministic in (spec, seed)") {
        const TheoryProblemSpec spec = uniform_spec(6, 2.0, 0.5, 1.0, 0.8, 15);
        const BoundReport a = run_convergence_experiment(spec, 4, 11);
        const BoundReport b = run_convergence_experiment(spec, 4, 11);
        CHECK(a.to_json() == b.to_json());
        const BoundReport c = run_convergence_experiment(spec, 4, 12);
        CHECK(a.per_seed_signadam != c.per_seed_signadam);
    }
}

TEST_CASE("theory spec serialization") {
    TheoryProblemSpec spec = uniform_spec(3, 1.5, 0.5, 1.0, 0.7, 25);
    const TheoryProblemSpec back = TheoryProblemSpec::from_json(spec.to_json());
    CHECK(back.l_vec == spec.l_vec);
    CHECK(back.sigma_vec == spec.sigma_vec);
    CHECK(back.theta0 == spec.theta0);
    CHECK(back.beta == spec.beta);
    CHECK(back.steps == spec.steps);

    const TheoryProblemSpec compact = TheoryProblemSpec::from_json(
        R"({"dim": 10, "l": 1.0, "sigma": 1.0, "theta0": 1.0, "beta": 0.9, "steps": 100})");
    CHECK(compact.l_vec == Vec(10, 1.0));
    CHECK(compact.steps == 100);

    CHECK_THROWS(TheoryProblemSpec::from_json("{"));
    CHECK_THROWS(TheoryProblemSpec::from_json(R"({"dim": 2, "beta": 1.5})"));
}
