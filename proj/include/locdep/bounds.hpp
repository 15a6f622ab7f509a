#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "locdep/neighborhood.hpp"
#include "locdep/rterms.hpp"

namespace locdep {

// One assembled theorem bound (or C-free rate-functional value).
struct BoundReport {
    std::string theorem;
    double value = 0.0;
    double se = 0.0;
    bool c_free = false;               // unspecified absolute constant: rate only
    std::optional<double> z;           // evaluation point of nonuniform rates
    std::map<std::string, double> ingredients;
};

// sup_z |F - Phi| <= r1 + 4 r2 + 8 r3 + r4 + 4.5 r5 + 1.5 r6.
BoundReport theorem_21_bound(const RTerms& r);

// (13 + 11k) n theta^{min(3,p)} + 2.5 theta^{p/2} sqrt(k n), k = max |N(B_i)|.
BoundReport theorem_22_bound(const MomentSummary& moments, const KappaStats& kappa);

// 4 lambda^{3/2} (r2 + r3 + r7 + r8 + r9 + r10 + r11 + r12).
BoundReport theorem_23_bound(const RTerms& r, const SigmaLambda& sl);

// 75 k^{p-1} sum E|X_i|^p, k = max(|N(C_i)|, |{j : i in C_j}|).
BoundReport theorem_24_bound(const MomentSummary& moments, const KappaStats& kappa);

// C-free: k^p (1+|z|)^{-p} sum E|X_i|^p with k the D* statistic.
BoundReport theorem_25_rate(const MomentSummary& moments, const KappaStats& kappa, double z);

// m-dependent lattice specializations.
BoundReport theorem_26u_bound(const MomentSummary& moments, std::int64_t m, std::int64_t d);
BoundReport theorem_26n_rate(const MomentSummary& moments, std::int64_t m, std::int64_t d,
                             double z);

// Dependency graphs with max degree D and E|X_i|^p <= theta^p.
BoundReport theorem_27u_bound(double theta, double theta_se, double p, std::int64_t max_degree,
                              std::int64_t n_vertices);
BoundReport theorem_27n_rate(double theta, double theta_se, double p, std::int64_t max_degree,
                             std::int64_t n_vertices, double z);

// Local maxima of a regular degree-d graph; sigma = sd of the raw count.
BoundReport theorem_28u_rate(std::int64_t degree, std::int64_t n_vertices, double sigma);
BoundReport theorem_28n_rate(std::int64_t degree, std::int64_t n_vertices, double sigma, double z);

// Theorem ids used by configs: "2.1", "2.2", "2.3", "2.4", "2.5-rate",
// "2.6u", "2.6n-rate", "2.7u", "2.7n-rate", "2.8u", "2.8n-rate".
bool theorem_id_valid(const std::string& id);
bool theorem_id_c_free(const std::string& id);

}  // namespace locdep
