#include "locdep/normal.hpp"

#include <cmath>

namespace locdep {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double normal_cdf(double z) {
    // 0.5 * erfc(-z / sqrt(2)); erfc keeps full relative accuracy in the
    // lower tail, where 1 - erf would cancel.
    return 0.5 * std::erfc(-z / kSqrt2);
}

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double mills_sqrt2pi(double w) {
    if (w < 3.0) {
        return kSqrt2Pi * std::exp(0.5 * w * w) * (0.5 * std::erfc(w / kSqrt2));
    }
    // Mills ratio continued fraction 1/(w + 1/(w + 2/(w + 3/(w + ...)))),
    // evaluated bottom-up; 96 terms is far below 1 ulp for w >= 3.
    double tail = 0.0;
    for (int k = 96; k >= 1; --k) tail = static_cast<double>(k) / (w + tail);
    return 1.0 / (w + tail);
}

}  // namespace locdep
