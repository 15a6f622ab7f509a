#include "locdep/bounds.hpp"

#include <cmath>

#include "locdep/errors.hpp"

namespace locdep {

namespace {

void require_p(double p, double hi, const char* theorem) {
    if (!(p > 2.0 && p <= hi))
        throw usage_error(std::string("theorem ") + theorem + " needs p in (2, " +
                          (hi == 3.0 ? "3]" : "4]"));
}

}  // namespace

BoundReport theorem_21_bound(const RTerms& r) {
    BoundReport out;
    out.theorem = "2.1";
    const auto& r1 = r.require(1);
    const auto& r2 = r.require(2);
    const auto& r3 = r.require(3);
    const auto& r4 = r.require(4);
    const auto& r5 = r.require(5);
    const auto& r6 = r.require(6);
    out.value = r1.value + 4.0 * r2.value + 8.0 * r3.value + r4.value + 4.5 * r5.value +
                1.5 * r6.value;
    out.se = r1.se + 4.0 * r2.se + 8.0 * r3.se + r4.se + 4.5 * r5.se + 1.5 * r6.se;
    for (int k = 1; k <= 6; ++k) out.ingredients["r" + std::to_string(k)] = r.require(k).value;
    return out;
}

BoundReport theorem_22_bound(const MomentSummary& moments, const KappaStats& kappa) {
    require_p(moments.p, 4.0, "2.2");
    const double k = static_cast<double>(kappa.require_nb());
    const double n = static_cast<double>(moments.n);
    const double p = moments.p;
    const double q3 = std::min(3.0, p);
    const double theta = moments.theta;
    BoundReport out;
    out.theorem = "2.2";
    out.value = (13.0 + 11.0 * k) * n * std::pow(theta, q3) +
                2.5 * std::pow(theta, 0.5 * p) * std::sqrt(k * n);
    const double dv = (13.0 + 11.0 * k) * n * q3 * std::pow(theta, q3 - 1.0) +
                      2.5 * 0.5 * p * std::pow(theta, 0.5 * p - 1.0) * std::sqrt(k * n);
    out.se = dv * moments.theta_se;
    out.ingredients = {{"kappa", k}, {"n", n}, {"theta", theta}, {"p", p}};
    return out;
}

BoundReport theorem_23_bound(const RTerms& r, const SigmaLambda& sl) {
    BoundReport out;
    out.theorem = "2.3";
    double sum = 0.0, sum_se = 0.0;
    for (int k : {2, 3, 7, 8, 9, 10, 11, 12}) {
        sum += r.require(k).value;
        sum_se += r.require(k).se;
        out.ingredients["r" + std::to_string(k)] = r.require(k).value;
    }
    const double lam32 = std::pow(sl.lambda, 1.5);
    out.value = 4.0 * lam32 * sum;
    out.se = 4.0 * lam32 * sum_se + 6.0 * std::sqrt(sl.lambda) * sum * sl.lambda_se;
    out.ingredients["lambda"] = sl.lambda;
    return out;
}

BoundReport theorem_24_bound(const MomentSummary& moments, const KappaStats& kappa) {
    require_p(moments.p, 3.0, "2.4");
    const double k = static_cast<double>(kappa.require_nc());
    BoundReport out;
    out.theorem = "2.4";
    const double factor = 75.0 * std::pow(k, moments.p - 1.0);
    out.value = factor * moments.gamma;
    out.se = factor * moments.gamma_se;
    out.ingredients = {{"kappa", k}, {"p", moments.p}, {"gamma", moments.gamma}};
    return out;
}

BoundReport theorem_25_rate(const MomentSummary& moments, const KappaStats& kappa, double z) {
    require_p(moments.p, 3.0, "2.5");
    const double k = static_cast<double>(kappa.require_dstar());
    BoundReport out;
    out.theorem = "2.5-rate";
    out.c_free = true;
    out.z = z;
    const double factor =
        std::pow(k, moments.p) * std::pow(1.0 + std::fabs(z), -moments.p);
    out.value = factor * moments.gamma;
    out.se = factor * moments.gamma_se;
    out.ingredients = {{"kappa", k}, {"p", moments.p}, {"gamma", moments.gamma}, {"z", z}};
    return out;
}

BoundReport theorem_26u_bound(const MomentSummary& moments, std::int64_t m, std::int64_t d) {
    require_p(moments.p, 3.0, "2.6");
    BoundReport out;
    out.theorem = "2.6u";
    const double factor = 75.0 * std::pow(10.0 * static_cast<double>(m) + 1.0,
                                          (moments.p - 1.0) * static_cast<double>(d));
    out.value = factor * moments.gamma;
    out.se = factor * moments.gamma_se;
    out.ingredients = {{"m", static_cast<double>(m)},
                       {"d", static_cast<double>(d)},
                       {"p", moments.p},
                       {"gamma", moments.gamma}};
    return out;
}

BoundReport theorem_26n_rate(const MomentSummary& moments, std::int64_t m, std::int64_t d,
                             double z) {
    require_p(moments.p, 3.0, "2.6");
    BoundReport out;
    out.theorem = "2.6n-rate";
    out.c_free = true;
    out.z = z;
    const double dd = static_cast<double>(d);
    const double factor = std::pow(19.0, moments.p * dd) *
                          std::pow(static_cast<double>(m) + 1.0, (moments.p - 1.0) * dd) *
                          std::pow(1.0 + std::fabs(z), -moments.p);
    out.value = factor * moments.gamma;
    out.se = factor * moments.gamma_se;
    out.ingredients = {{"m", static_cast<double>(m)}, {"d", dd}, {"p", moments.p},
                       {"gamma", moments.gamma}, {"z", z}};
    return out;
}

BoundReport theorem_27u_bound(double theta, double theta_se, double p, std::int64_t max_degree,
                              std::int64_t n_vertices) {
    require_p(p, 3.0, "2.7");
    BoundReport out;
    out.theorem = "2.7u";
    const double dd = static_cast<double>(max_degree);
    const double factor = 75.0 * std::pow(dd, 5.0 * (p - 1.0)) * static_cast<double>(n_vertices);
    out.value = factor * std::pow(theta, p);
    out.se = factor * p * std::pow(theta, p - 1.0) * theta_se;
    out.ingredients = {{"D", dd}, {"V", static_cast<double>(n_vertices)}, {"theta", theta},
                       {"p", p}};
    return out;
}

BoundReport theorem_27n_rate(double theta, double theta_se, double p, std::int64_t max_degree,
                             std::int64_t n_vertices, double z) {
    require_p(p, 3.0, "2.7");
    BoundReport out;
    out.theorem = "2.7n-rate";
    out.c_free = true;
    out.z = z;
    const double dd = static_cast<double>(max_degree);
    const double factor = std::pow(dd, 5.0 * p) * static_cast<double>(n_vertices) *
                          std::pow(1.0 + std::fabs(z), -p);
    out.value = factor * std::pow(theta, p);
    out.se = factor * p * std::pow(theta, p - 1.0) * theta_se;
    out.ingredients = {{"D", dd}, {"V", static_cast<double>(n_vertices)}, {"theta", theta},
                       {"p", p}, {"z", z}};
    return out;
}

BoundReport theorem_28u_rate(std::int64_t degree, std::int64_t n_vertices, double sigma) {
    if (!(sigma > 0.0)) throw degeneracy_error("theorem 2.8 needs sigma > 0");
    BoundReport out;
    out.theorem = "2.8u";
    out.c_free = true;
    const double dd = static_cast<double>(degree);
    out.value = dd * dd * static_cast<double>(n_vertices) / std::pow(sigma, 3.0);
    out.ingredients = {{"d", dd}, {"V", static_cast<double>(n_vertices)}, {"sigma", sigma}};
    return out;
}

BoundReport theorem_28n_rate(std::int64_t degree, std::int64_t n_vertices, double sigma,
                             double z) {
    if (!(sigma > 0.0)) throw degeneracy_error("theorem 2.8 needs sigma > 0");
    BoundReport out;
    out.theorem = "2.8n-rate";
    out.c_free = true;
    out.z = z;
    const double dd = static_cast<double>(degree);
    out.value = std::pow(1.0 + std::fabs(z), -3.0) * std::pow(dd, 5.0) *
                static_cast<double>(n_vertices) / std::pow(sigma, 3.0);
    out.ingredients = {{"d", dd}, {"V", static_cast<double>(n_vertices)}, {"sigma", sigma},
                       {"z", z}};
    return out;
}

bool theorem_id_valid(const std::string& id) {
    static const char* ids[] = {"2.1",  "2.2",       "2.3",  "2.4",       "2.5-rate", "2.6u",
                                "2.6n-rate", "2.7u", "2.7n-rate", "2.8u", "2.8n-rate"};
    for (const char* v : ids)
        if (id == v) return true;
    return false;
}

bool theorem_id_c_free(const std::string& id) {
    return id == "2.5-rate" || id == "2.6n-rate" || id == "2.7n-rate" || id == "2.8u" ||
           id == "2.8n-rate";
}

}  // namespace locdep
