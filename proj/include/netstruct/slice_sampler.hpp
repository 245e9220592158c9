#ifndef NETSTRUCT_SLICE_SAMPLER_HPP
#define NETSTRUCT_SLICE_SAMPLER_HPP

#include <cmath>
#include <cstddef>

#include "rng.hpp"

namespace netstruct {

struct SliceSettings {
    double width = 0.1;
    std::size_t max_shrink = 50;
    double lower = 0.0; // exclusive
    double upper = 1.0; // exclusive
};

struct SliceResult {
    double value;
    bool exhausted; // shrink cap hit; value is the starting point
};

/// One univariate slice-sampling update (stepping out, then shrinkage) of
/// `x0` under the unnormalized log density `log_f`, restricted to the open
/// interval (lower, upper).
template <typename LogDensity>
SliceResult slice_sample(double x0, LogDensity&& log_f, rng& gen, const SliceSettings& s = {}) {
    const double level = log_f(x0) - gen.exponential();
    auto inside = [&](double x) { return x > s.lower && x < s.upper; };

    double left = x0 - s.width * gen.uniform();
    double right = left + s.width;
    while (left > s.lower && log_f(left) > level)
        left -= s.width;
    while (right < s.upper && inside(right) && log_f(right) > level)
        right += s.width;
    if (left < s.lower)
        left = s.lower;
    if (right > s.upper)
        right = s.upper;

    for (std::size_t step = 0; step < s.max_shrink; ++step) {
        const double x1 = left + gen.uniform() * (right - left);
        if (inside(x1) && log_f(x1) > level)
            return {x1, false};
        if (x1 < x0)
            left = x1;
        else
            right = x1;
    }
    return {x0, true};
}

} // namespace netstruct

#endif // NETSTRUCT_SLICE_SAMPLER_HPP
