#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locdep/field.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

inline constexpr const char* kMethodExact = "exact-enumeration";
inline constexpr const char* kMethodMonteCarlo = "monte-carlo";

struct TermEstimate {
    double value = 0.0;
    double se = 0.0;
    std::uint64_t replicates = 0;
    std::string method = kMethodMonteCarlo;
};

// Bound ingredients r1..r12.  Which terms are present depends on the
// dependence level of the system the estimate ran against: r1-r4 at LD1,
// r5/r6 at LD2 (pair domain), r7-r12 at LD3.
struct RTerms {
    std::array<std::optional<TermEstimate>, 13> term;  // index 1..12
    std::uint64_t r1_phase1 = 0;  // pilot replicates spent on E X_i Y_i
    std::uint64_t r1_phase2 = 0;

    bool has(int k) const { return k >= 1 && k <= 12 && term[k].has_value(); }
    const TermEstimate& require(int k) const;
};

struct EstimateOptions {
    std::uint64_t replicates = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    bool force_mc = false;                    // ignore the enumerator (oracle tests)
    std::uint64_t exact_limit = 1ULL << 20;   // enumerator size cap for the exact path
};

// Estimate every r-term the system level supports; exact enumeration
// replaces Monte Carlo whenever the model enumerator fits the cap.
RTerms estimate_r_terms(const FieldModel& model, const NeighborhoodSystem& system,
                        const EstimateOptions& options);

// Remark-2.1 chain bounding r4 using only LD1 data.
TermEstimate r4_ld1_bound(const FieldModel& model, const NeighborhoodSystem& system,
                          const EstimateOptions& options);

struct SigmaLambda {
    std::vector<double> sigma;  // per-index sigma_i = sd of W~_i over N(C_i)^c
    double lambda = 1.0;        // 1 v max_i 1/sigma_i
    std::vector<double> sigma_se;
    double lambda_se = 0.0;
};

// Exact from the covariance oracle when present, else Monte Carlo with
// mc_replicates samples and SE propagation.
SigmaLambda sigma_lambda(const FieldModel& model, const NeighborhoodSystem& system,
                         std::uint64_t mc_replicates = 1000000, std::uint64_t seed = 0,
                         int threads = 1);

// Per-index absolute moments of X_i, Y_i, Z_i for q in {2, 3, p}, with the
// aggregates the theorems consume.
struct MomentSummary {
    double p = 3.0;
    std::int64_t n = 0;
    std::vector<double> ex2, ex3, exp_, ey2, ey3, eyp;
    std::vector<double> exp_se;         // per-index SE of E|X_i|^p (zero when exact)
    std::vector<double> ez2, ez3, ezp;  // empty below LD2
    double theta = 0.0;                 // max_i (E|X_i|^p + E|Y_i|^p)^{1/p}
    double theta_se = 0.0;
    double gamma = 0.0;                 // sum_i E|X_i|^p
    double gamma_se = 0.0;
    double sum_x3_y3 = 0.0;             // sum_i (E|X_i|^{3^p} + E|Y_i|^{3^p}), q = min(3,p)
    double sum_x3_y3_se = 0.0;
    std::string method = kMethodMonteCarlo;
    std::uint64_t replicates = 0;
};

MomentSummary estimate_moments(const FieldModel& model, const NeighborhoodSystem& system, double p,
                               const EstimateOptions& options);

}  // namespace locdep
