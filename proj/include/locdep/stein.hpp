#pragma once

namespace locdep {

// Smoothed indicator h_{z,alpha}: 1 below z, linear ramp down on [z, z+alpha],
// 0 above.  alpha must be positive.
double smoothed_indicator(double z, double alpha, double w);

// N h_{z,alpha} = E h_{z,alpha}(Z) for standard normal Z, in closed form.
double smoothed_indicator_mean(double z, double alpha);

struct SteinEval {
    double f = 0.0;
    // Set when |w| > 8 and the scaled-Mills tail form carried the value.
    bool tail_asymptotic = false;
};

// Bounded solution of f'(w) - w f(w) = h_{z,alpha}(w) - N h_{z,alpha},
// evaluated through scaled Mills ratios so no e^{w^2/2} overflow occurs.
SteinEval stein_solution_eval(double z, double alpha, double w);
double stein_solution(double z, double alpha, double w);

}  // namespace locdep
