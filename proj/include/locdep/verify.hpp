#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace locdep {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Exact Var(W) identity (integral of K(t) = E W^2 = 1) on every enumerable
// built-in test model, via both the enumerator and the covariance oracle.
std::vector<SuiteResult> run_identity_suite(double tol = 1e-10);

// Lemma 3.1 identity/bounds on randomized enumerable LD3 models.
std::vector<SuiteResult> run_lemma31_suite(int models = 50, std::uint64_t seed = 20240901);

// Lemma 3.2 bound on randomized enumerable LD4* models.
std::vector<SuiteResult> run_lemma32_suite(int models = 50, std::uint64_t seed = 20240902);

// Proposition 3.1 on random intervals over enumerable models.
std::vector<SuiteResult> run_prop31_suite(int models = 10, int intervals_per_model = 10,
                                          std::uint64_t seed = 20240903);

// Stein-equation solution properties: bounds, derivative bound, ODE residual.
std::vector<SuiteResult> run_stein_suite();

bool all_pass(const std::vector<SuiteResult>& results);

}  // namespace locdep
