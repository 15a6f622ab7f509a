#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "locdep/field.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

// Per-realization kernel pieces: x_i together with the neighborhood sums
// Y_i = sum_{j in A_i} X_j and Z_i = sum_{j in B_i} X_j (Z only at LD2+).
struct KernelSample {
    std::vector<double> x, y, z;

    static KernelSample from(const NeighborhoodSystem& system, std::span<const double> values);
    // In-place refill reusing capacity (hot estimation loops).
    void assign(const NeighborhoodSystem& system, std::span<const double> values);
};

// K^_i(t) = X_i { I(-Y_i <= t < 0) - I(0 <= t <= -Y_i) }.
double khat(double x_i, double y_i, double t);
double khat(const KernelSample& sample, std::int32_t i, double t);

struct MeanSe {
    double value = 0.0;
    double se = 0.0;
    std::uint64_t replicates = 0;
};

// Monte Carlo estimate of the integral of K(t): the t-integral of each K^_i
// is X_i Y_i in closed form, so the per-replicate value is sum_i X_i Y_i.
MeanSe k_integral_identity(const FieldModel& model, std::uint64_t replicates, std::uint64_t seed,
                           int threads = 1);

// Exact value of sum_i E[X_i Y_i] from the enumerator.
double k_integral_exact(const FieldModel& model);

// Same quantity from the covariance oracle (Lemma 3.1 form of Var W).
double covariance_identity_sum(const FieldModel& model);

using PairList = std::vector<std::pair<std::int32_t, std::int32_t>>;

// Per-replicate closed-form values estimating r5 and r6^2 from a pair of
// independent realizations; the pair list restricts to B_i & B_j != {}.
double r5_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs);
double r6sq_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs);
// Per-replicate value of the r10 sum (absolute-value variant).
double r10_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs);

}  // namespace locdep
