#include "signopt/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace signopt {

namespace {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
        word = splitmix64_next(sm);
    }
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo <= hi)) {
        throw std::invalid_argument("uniform: lo > hi");
    }
    return lo + (hi - lo) * next_double();
}

double Rng::normal() {
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    while (true) {
        const double u = 2.0 * next_double() - 1.0;
        const double v = 2.0 * next_double() - 1.0;
        const double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) {
            continue;
        }
        const double f = std::sqrt(-2.0 * stable_log(s) / s);
        spare_normal_ = v * f;
        has_spare_normal_ = true;
        return u * f;
    }
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("below: bound must be positive");
    }
    // Reject the final partial block so the result is exactly uniform.
    const std::uint64_t threshold = (0ULL - bound) % bound;
    while (true) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix_seed(seed_, stream));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed ^ (0xA0761D6478BD642FULL + stream * 0xE7037ED1A0B428DBULL);
    std::uint64_t mixed = splitmix64_next(sm);
    return splitmix64_next(sm) ^ mixed;
}

double stable_log(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw std::domain_error("stable_log: argument must be positive and finite");
    }
    // x = m * 2^e with m in [sqrt(1/2), sqrt(2)).
    int e = 0;
    double m = std::frexp(x, &e); // m in [0.5, 1)
    if (m < 0.70710678118654752440) {
        m *= 2.0;
        e -= 1;
    }
    // log(m) = 2 atanh(t) with t = (m-1)/(m+1), |t| <= 0.1716.
    const double t = (m - 1.0) / (m + 1.0);
    const double t2 = t * t;
    double series = 1.0 / 27.0;
    series = series * t2 + 1.0 / 25.0;
    series = series * t2 + 1.0 / 23.0;
    series = series * t2 + 1.0 / 21.0;
    series = series * t2 + 1.0 / 19.0;
    series = series * t2 + 1.0 / 17.0;
    series = series * t2 + 1.0 / 15.0;
    series = series * t2 + 1.0 / 13.0;
    series = series * t2 + 1.0 / 11.0;
    series = series * t2 + 1.0 / 9.0;
    series = series * t2 + 1.0 / 7.0;
    series = series * t2 + 1.0 / 5.0;
    series = series * t2 + 1.0 / 3.0;
    series = series * t2 + 1.0;
    const double log_m = 2.0 * t * series;
    // ln 2 in a hi/lo split keeps e*ln2 accurate for large |e|.
    const double ln2_hi = 6.93147180369123816490e-01;
    const double ln2_lo = 1.90821492927058770002e-10;
    const double de = static_cast<double>(e);
    return de * ln2_hi + (de * ln2_lo + log_m);
}

void shuffle_indices(std::vector<std::int32_t>& indices, Rng& rng) {
    for (std::size_t i = indices.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(indices[i - 1], indices[j]);
    }
}

} // namespace signopt
