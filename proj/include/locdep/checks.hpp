#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "locdep/field.hpp"
#include "locdep/neighborhood.hpp"

namespace locdep {

// Per-index transforms for the moment-inequality suites; the centering
// constant is computed exactly from the enumerator so E xi_i = 0 holds.
enum class XiMap { Identity, Cube, Clip };

std::string xi_map_name(XiMap map);
double apply_xi_map(XiMap map, double value);

// Lemma 3.1: variance decomposition, the exact fourth-moment identity, and
// the kappa_1 bounds, all evaluated by enumeration.
struct Lemma31Report {
    double sigma2_direct = 0.0;     // E T^2
    double sigma2_neighbors = 0.0;  // sum_i sum_{j in A_i} E xi_i xi_j
    double et4_direct = 0.0;
    double et4_identity = 0.0;      // the seven-term expansion
    double bound_322_rhs = 0.0;     // kappa_1 sum E xi_i^2
    double bound_323_rhs = 0.0;     // 3 sigma^4 + 22 kappa_1^3 sum E xi_i^4
    bool identity_319_ok = false;
    bool identity_320_ok = false;
    bool bound_322_ok = false;
    bool bound_323_ok = false;
    bool ok() const { return identity_319_ok && identity_320_ok && bound_322_ok && bound_323_ok; }
};

Lemma31Report lemma_3_1_check(const FieldModel& model, const NeighborhoodSystem& system,
                              XiMap map, double rel_tol = 1e-10);

// Lemma 3.2: E(T^2 S^2) <= 3 E T^2 E S^2 + 12 kappa_2^3 sum (E xi^4 + E eta^4)
// with eta_i a centered transform of Y_i (a function of X_{A_i}).
struct Lemma32Report {
    double lhs = 0.0;
    double rhs = 0.0;
    double et2 = 0.0;
    double es2 = 0.0;
    bool ok = false;
};

Lemma32Report lemma_3_2_check(const FieldModel& model, const NeighborhoodSystem& system,
                              XiMap xi, XiMap eta, double rel_slack = 1e-12);

// Proposition 3.1 interval-probability check:
//   P(a <= W <= b) <= 0.625 (b-a) + 4 r2 + 2.125 r3 + 4 r5.
struct IntervalCheck {
    double a = 0.0, b = 0.0;
    double p_hat = 0.0, p_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    bool pass = false;
};

struct Prop31Report {
    std::vector<IntervalCheck> intervals;
    double r2 = 0.0, r3 = 0.0, r5 = 0.0;
    std::string method;
    bool all_pass = true;
};

Prop31Report proposition_3_1_check(const FieldModel& model, const NeighborhoodSystem& system,
                                   const std::vector<std::pair<double, double>>& intervals,
                                   std::uint64_t replicates, std::uint64_t seed, int threads = 1);

}  // namespace locdep
