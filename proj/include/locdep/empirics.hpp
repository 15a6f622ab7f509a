#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "locdep/bounds.hpp"
#include "locdep/field.hpp"

namespace locdep {

struct ProfilePoint {
    double z = 0.0;
    double abs_diff = 0.0;  // |F^(z) - Phi(z)|
    double se = 0.0;        // binomial SE of F^(z); zero in exact mode
};

struct EmpiricalDistance {
    double ks = 0.0;
    double dkw_radius = 0.0;  // sqrt(ln(2/delta) / (2 N)) in MC mode, 0 exact
    std::uint64_t replicates = 0;
    std::string mode;  // "exact" | "monte-carlo"
    double delta = 1e-3;
    std::vector<ProfilePoint> profile;
};

inline constexpr std::uint64_t kExactModeLimit = 1ULL << 20;

// sup_z |F(z) - Phi(z)|.  Exact mode switches on automatically when the
// model enumerator covers at most kExactModeLimit outcomes; Monte Carlo mode
// needs at least 1000 replicates and reports the DKW radius at confidence
// 1 - delta.
EmpiricalDistance kolmogorov_distance(const FieldModel& model, std::uint64_t replicates,
                                      std::uint64_t seed, double delta = 1e-3, int threads = 1);

// Pointwise |F^(z) - Phi(z)| on a finite z-grid (plus the KS statistic).
EmpiricalDistance nonuniform_profile(const FieldModel& model, std::uint64_t replicates,
                                     std::uint64_t seed, const std::vector<double>& zgrid,
                                     double delta = 1e-3, int threads = 1);

struct RatePoint {
    double n = 0.0;
    double distance = 0.0;
    double weight = 1.0;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double slope_ci_lo = 0.0;  // 95% normal interval
    double slope_ci_hi = 0.0;
};

// Weighted least squares of log(distance) on log(n).
RateFit rate_fit(const std::vector<RatePoint>& points);

struct Verdict {
    bool pass = false;
    double margin = 0.0;  // (bound + 3 se) - (ks - 3 dkw)
};

// PASS iff ks - 3 dkw <= bound + 3 se.  C-free reports cannot be judged
// this way and raise capability_error.
Verdict dominance_verdict(const EmpiricalDistance& distance, const BoundReport& bound);

}  // namespace locdep
