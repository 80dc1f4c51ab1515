#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "signopt/confidence.hpp"
#include "test_util.hpp"

using namespace signopt;

TEST_CASE("hard_threshold_sign: definition and boundary") {
    CHECK(hard_threshold_sign(Vec{0.5, -0.05, 0.2}, 0.1) == Vec{1.0, 0.0, 1.0});
    // closed interval: |g| == alpha is zeroed
    CHECK(hard_threshold_sign(Vec{0.3, -0.3, 0.30000001}, 0.3) == Vec{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(hard_threshold_sign(Vec{1.0}, -0.1), std::invalid_argument);
}

TEST_CASE("alpha = 0 collapses to plain sign, bitwise") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        Vec g = testutil::random_vec(rng, 23, -2.0, 2.0);
        g[5] = 0.0;
        CHECK(hard_threshold_sign(g, 0.0) == sign(g));
    }
}

TEST_CASE("remaining_ratio: known values and the zero-vector error") {
    CHECK(remaining_ratio(Vec{0.4, -0.2, 1.0}, 0.0) == 1.0);
    CHECK(remaining_ratio(Vec{0.4, -0.2, 1.0}, 1.0) == 0.0);
    CHECK(remaining_ratio(Vec{3.0, 4.0}, 3.5) == 0.8);
    CHECK_THROWS_WITH_AS(remaining_ratio(Vec{0.0, 0.0}, 0.1),
                         "remaining_ratio: undefined ratio for zero gradient",
                         std::invalid_argument);
}

TEST_CASE("sparsity: counts exact zeros") {
    CHECK(sparsity(Vec{0.0, 0.0, 0.0}) == 1.0);
    CHECK(sparsity(Vec{0.1, -0.2, 5.0}) == 0.0);
    // alpha between the two smallest magnitudes of four distinct ones
    const Vec g{0.01, -0.2, 0.5, -0.9};
    CHECK(sparsity(hard_threshold_sign(g, 0.1)) == 0.25);
    CHECK_THROWS_AS(sparsity(Vec{}), std::invalid_argument);
}

TEST_CASE("adaptive alpha recurrence") {
    double m = 0.0;
    // var([1,-1]) = 1, std = 1
    const double alpha = adaptive_alpha_step(m, Vec{1.0, -1.0}, 0.9, 0.999);
    CHECK(m == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(alpha == doctest::Approx(0.0999).epsilon(1e-12));

    SUBCASE("constant gradients decay m geometrically") {
        double m2 = 0.5;
        const Vec constant{3.0, 3.0, 3.0};
        double prev = m2;
        for (int t = 0; t < 10; ++t) {
            adaptive_alpha_step(m2, constant, 0.9, 0.999);
            CHECK(m2 == doctest::Approx(prev * 0.9).epsilon(1e-12));
            prev = m2;
        }
    }

    SUBCASE("beta2 = 0 disables the gate") {
        double m3 = 0.0;
        Rng rng(3);
        for (int t = 0; t < 20; ++t) {
            CHECK(adaptive_alpha_step(m3, testutil::random_vec(rng, 9), 0.9, 0.0) == 0.0);
        }
    }

    SUBCASE("argument validation") {
        double m4 = 0.0;
        CHECK_THROWS_AS(adaptive_alpha_step(m4, Vec{}, 0.9, 0.999), std::invalid_argument);
        CHECK_THROWS_AS(adaptive_alpha_step(m4, Vec{1.0}, 1.0, 0.999), std::invalid_argument);
        CHECK_THROWS_AS(adaptive_alpha_step(m4, Vec{1.0}, 0.9, -1.0), std::invalid_argument);
    }
}

TEST_CASE("alpha_t never exceeds beta2 times the running std peak") {
    Rng rng(17);
    double m = 0.0;
    double max_std = 0.0;
    for (int t = 0; t < 500; ++t) {
        const Vec g = testutil::random_vec(rng, 33, -3.0, 3.0);
        max_std = std::max(max_std, std::sqrt(population_variance(g)));
        const double alpha = adaptive_alpha_step(m, g, 0.9, 0.999);
        CHECK(alpha <= 0.999 * max_std + 1e-15);
        CHECK(alpha > 0.0); // nonconstant history keeps some coordinates live
        CHECK(m >= 0.0);
    }
}

TEST_CASE("sparsity nondecreasing, remaining ratio nonincreasing in alpha") {
    Rng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec g = testutil::random_nonzero_vec(rng, 41);
        double peak = 0.0;
        for (double v : g) {
            peak = std::max(peak, std::fabs(v));
        }
        double prev_sparsity = -1.0;
        double prev_ratio = 2.0;
        for (int step = 0; step <= 50; ++step) {
            const double alpha = peak * 1.05 * static_cast<double>(step) / 50.0;
            const double s = sparsity(hard_threshold_sign(g, alpha));
            const double r = remaining_ratio(g, alpha);
            CHECK(s >= prev_sparsity);
            CHECK(r <= prev_ratio);
            prev_sparsity = s;
            prev_ratio = r;
        }
        CHECK(sparsity(hard_threshold_sign(g, peak)) == 1.0);
        CHECK(prev_sparsity == 1.0);
        CHECK(prev_ratio == 0.0);
    }
}

TEST_CASE("gate support is exactly the coordinates above alpha") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec g = testutil::random_vec(rng, 29, -2.0, 2.0);
        const double alpha = rng.uniform(0.0, 2.0);
        const Vec s = hard_threshold_sign(g, alpha);
        const Vec sg = sign(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::fabs(g[i]) > alpha) {
                CHECK(s[i] == sg[i]);
                CHECK(s[i] != 0.0);
            } else {
                CHECK(s[i] == 0.0);
            }
        }
    }
}

TEST_CASE("calibrate_alpha hits the target sparsity from below") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec g = testutil::random_nonzero_vec(rng, 200);
        for (double target : {0.0, 0.25, 0.5, 0.9, 1.0}) {
            const double alpha = calibrate_alpha(g, target);
            const double got = sparsity(hard_threshold_sign(g, alpha));
            CHECK(got >= target);
            // not overshooting by more than one grid cell
            CHECK(got <= target + 1.0 / static_cast<double>(g.size()) + 1e-12);
        }
    }
    CHECK(calibrate_alpha(Vec{0.5, -0.1}, 0.0) == 0.0);
    CHECK_THROWS_AS(calibrate_alpha(Vec{}, 0.5), std::invalid_argument);
}

TEST_CASE("confidence spec validation") {
    ConfidenceSpec fixed{ConfidenceKind::fixed, 0.1, false, 0.9, 0.9, 0.999};
    CHECK_NOTHROW(fixed.validate());
    fixed.alpha = -1.0;
    CHECK_THROWS_AS(fixed.validate(), std::invalid_argument);
    ConfidenceSpec adaptive{ConfidenceKind::adaptive, 0.0, false, 0.9, 1.5, 0.999};
    CHECK_THROWS_AS(adaptive.validate(), std::invalid_argument);
}
