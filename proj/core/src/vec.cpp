#include "signopt/vec.hpp"

#include <cmath>
#include <stdexcept>

namespace signopt {

std::span<double> ParamVector::group_span(std::size_t g) {
    const ParamGroup& grp = groups.at(g);
    return std::span<double>(data).subspan(grp.offset, grp.length);
}

std::span<const double> ParamVector::group_span(std::size_t g) const {
    const ParamGroup& grp = groups.at(g);
    return std::span<const double>(data).subspan(grp.offset, grp.length);
}

void ParamVector::validate() const {
    std::size_t expected = 0;
    for (const ParamGroup& grp : groups) {
        if (grp.offset != expected) {
            throw std::invalid_argument("ParamVector: groups must be ordered and disjoint");
        }
        if (grp.length == 0) {
            throw std::invalid_argument("ParamVector: empty group '" + grp.name + "'");
        }
        expected = grp.offset + grp.length;
    }
    if (expected != data.size()) {
        throw std::invalid_argument("ParamVector: groups must cover [0, d)");
    }
}

std::vector<ParamGroup> whole_vector_group(std::size_t dim) {
    return {ParamGroup{0, dim, "all"}};
}

void require_finite(std::span<const double> x, const char* what) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string("non-finite ") + what);
        }
    }
}

Vec sign(std::span<const double> x) {
    require_finite(x);
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = (x[i] > 0.0) ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
    }
    return out;
}

double l1_norm(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) {
        sum += std::fabs(v);
    }
    return sum;
}

double l2_norm(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) {
        sum += v * v;
    }
    return std::sqrt(sum);
}

double population_variance(std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("population_variance: empty input");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : x) {
        sum += v;
        sum_sq += v * v;
    }
    const double n = static_cast<double>(x.size());
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    return var > 0.0 ? var : 0.0;
}

Vec gauss(Rng& rng, std::size_t n, double mean, double stddev) {
    if (stddev < 0.0) {
        throw std::invalid_argument("gauss: negative standard deviation");
    }
    Vec out(n);
    for (double& v : out) {
        v = mean + stddev * rng.normal();
    }
    return out;
}

} // namespace signopt
