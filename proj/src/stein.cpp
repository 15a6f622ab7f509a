#include "locdep/stein.hpp"

#include <cmath>

#include "locdep/errors.hpp"
#include "locdep/normal.hpp"

namespace locdep {

namespace {

constexpr double kGauss20[20][2] = {
    {-9.93128599185094884660e-01, 1.76140071391532732070e-02},
    {-9.63971927277913809284e-01, 4.06014298003862170172e-02},
    {-9.12234428251325835113e-01, 6.26720483341094425356e-02},
    {-8.39116971822218782329e-01, 8.32767415767046714770e-02},
    {-7.46331906460150795724e-01, 1.01930119817240261160e-01},
    {-6.36053680726515024979e-01, 1.18194531961518245478e-01},
    {-5.10867001950827126500e-01, 1.31688638449176526057e-01},
    {-3.73706088715419548762e-01, 1.42096109318381874642e-01},
    {-2.27785851141645095952e-01, 1.49172986472603658070e-01},
    {-7.65265211334973383117e-02, 1.52753387130725781784e-01},
    {7.65265211334973383117e-02, 1.52753387130725781784e-01},
    {2.27785851141645095952e-01, 1.49172986472603658070e-01},
    {3.73706088715419548762e-01, 1.42096109318381874642e-01},
    {5.10867001950827126500e-01, 1.31688638449176526057e-01},
    {6.36053680726515024979e-01, 1.18194531961518245478e-01},
    {7.46331906460150795724e-01, 1.01930119817240261160e-01},
    {8.39116971822218782329e-01, 8.32767415767046714770e-02},
    {9.12234428251325835113e-01, 6.26720483341094425356e-02},
    {9.63971927277913809284e-01, 4.06014298003862170172e-02},
    {9.93128599185094884660e-01, 1.76140071391532732070e-02},
};

void require_alpha(double alpha) {
    if (!(alpha > 0.0)) throw usage_error("smoothing width alpha must be positive");
}

}  // namespace

double smoothed_indicator(double z, double alpha, double w) {
    require_alpha(alpha);
    if (w <= z) return 1.0;
    if (w >= z + alpha) return 0.0;
    return 1.0 + (z - w) / alpha;
}

double smoothed_indicator_mean(double z, double alpha) {
    require_alpha(alpha);
    // Phi(z) plus the ramp contribution, integrating x*phi(x) = -phi'(x):
    //   int_z^{z+a} (1+(z-x)/a) phi(x) dx
    //     = (1 + z/a)(Phi(z+a)-Phi(z)) - (phi(z)-phi(z+a))/a.
    const double dphi = normal_cdf(z + alpha) - normal_cdf(z);
    const double ramp = (1.0 + z / alpha) * dphi - (normal_pdf(z) - normal_pdf(z + alpha)) / alpha;
    return normal_cdf(z) + ramp;
}

SteinEval stein_solution_eval(double z, double alpha, double w) {
    require_alpha(alpha);
    SteinEval out;
    out.tail_asymptotic = std::fabs(w) > 8.0;
    const double nh = smoothed_indicator_mean(z, alpha);

    if (w <= z) {
        // f = sqrt(2*pi) e^{w^2/2} Phi(w) (1 - Nh); the first factor is the
        // scaled Mills ratio at -w.
        out.f = mills_sqrt2pi(-w) * (1.0 - nh);
        return out;
    }
    if (w >= z + alpha) {
        out.f = mills_sqrt2pi(w) * nh;
        return out;
    }
    // Inside the ramp: upper-tail form minus the remaining ramp mass,
    //   f = R(w) Nh - e^{w^2/2} int_w^{z+alpha} (1+(z-x)/alpha) e^{-x^2/2} dx,
    // with the exponentials combined so the integrand stays O(1).
    const double hi = z + alpha;
    const double mid = 0.5 * (w + hi);
    const double half = 0.5 * (hi - w);
    double integral = 0.0;
    for (const auto& node : kGauss20) {
        const double x = mid + half * node[0];
        const double ramp = 1.0 + (z - x) / alpha;
        integral += node[1] * ramp * std::exp(0.5 * (w - x) * (w + x));
    }
    integral *= half;
    out.f = mills_sqrt2pi(w) * nh - integral;
    return out;
}

double stein_solution(double z, double alpha, double w) {
    return stein_solution_eval(z, alpha, w).f;
}

}  // namespace locdep
