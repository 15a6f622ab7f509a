#pragma once

namespace locdep {

// Standard normal cdf, accurate to better than 1e-12 for |z| <= 8 (part of
// the library contract; see tests) and monotone into the far tails.
double normal_cdf(double z);

// Standard normal density.
double normal_pdf(double z);

// Scaled Mills ratio sqrt(2*pi) * exp(w^2/2) * (1 - Phi(w)).  Stable for all
// w >= 0, including the regime where exp(w^2/2) alone would overflow.
double mills_sqrt2pi(double w);

}  // namespace locdep
