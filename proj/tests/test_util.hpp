#pragma once

#include <string>
#include <vector>

#include "signopt/rng.hpp"
#include "signopt/vec.hpp"

namespace signopt::testutil {

inline Vec random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vec v(n);
    for (double& x : v) {
        x = rng.uniform(lo, hi);
    }
    return v;
}

/// Random vector with |x_i| >= floor, for tests that need nonzero entries.
inline Vec random_nonzero_vec(Rng& rng, std::size_t n, double floor = 1e-3) {
    Vec v(n);
    for (double& x : v) {
        const double mag = rng.uniform(floor, 1.0);
        x = rng.next_double() < 0.5 ? -mag : mag;
    }
    return v;
}

} // namespace signopt::testutil
