#include "locdep/verify.hpp"

#include <cmath>
#include <sstream>

#include "locdep/checks.hpp"
#include "locdep/kernels.hpp"
#include "locdep/stein.hpp"

namespace locdep {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Small enumerable models for the randomized suites, cycled by an Rng.
// Every family carries a valid LD4* lattice system and an enumerator.
ModelPtr random_small_model(Rng& rng) {
    switch (rng.next_below(4)) {
        case 0: {
            const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_below(7));
            return make_iid_field(n, BaseDist::Rademacher);
        }
        case 1: {
            const std::int64_t n = 3 + static_cast<std::int64_t>(rng.next_below(6));
            const std::int64_t m = 1 + static_cast<std::int64_t>(rng.next_below(2));
            return make_moving_sum_field({n}, m, BaseDist::Rademacher);
        }
        case 2: {
            const std::int64_t n = 4 + 2 * static_cast<std::int64_t>(rng.next_below(3));
            return make_erickson_field(n);
        }
        default: {
            const std::int64_t a = 2 + static_cast<std::int64_t>(rng.next_below(2));
            const std::int64_t b = 2 + static_cast<std::int64_t>(rng.next_below(2));
            return make_moving_sum_field({a, b}, 1, BaseDist::Rademacher);
        }
    }
}

XiMap random_map(Rng& rng) {
    switch (rng.next_below(3)) {
        case 0: return XiMap::Identity;
        case 1: return XiMap::Cube;
        default: return XiMap::Clip;
    }
}

}  // namespace

bool all_pass(const std::vector<SuiteResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

std::vector<SuiteResult> run_identity_suite(double tol) {
    std::vector<SuiteResult> out;
    std::vector<ModelPtr> models;
    for (std::int64_t n = 1; n <= 10; ++n) models.push_back(make_iid_field(n, BaseDist::Rademacher));
    for (std::int64_t n = 2; n <= 10; ++n)
        models.push_back(make_moving_sum_field({n}, 1, BaseDist::Rademacher));
    for (std::int64_t n : {4, 6, 8}) models.push_back(make_erickson_field(n));

    for (const auto& model : models) {
        const double via_enum = k_integral_exact(*model);
        const double via_cov = covariance_identity_sum(*model);
        SuiteResult r;
        r.name = "identity " + model->spec_json();
        r.pass = std::fabs(via_enum - 1.0) <= tol && std::fabs(via_cov - 1.0) <= tol;
        r.detail = "sum E X_i Y_i = " + fmt(via_enum) + ", covariance route " + fmt(via_cov);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SuiteResult> run_lemma31_suite(int models, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    Rng rng(seed);
    for (int k = 0; k < models; ++k) {
        auto model = random_small_model(rng);
        const XiMap map = random_map(rng);
        auto rep = lemma_3_1_check(*model, model->system(), map);
        SuiteResult r;
        r.name = "lemma 3.1 #" + std::to_string(k) + " " + model->spec_json() + " xi=" +
                 xi_map_name(map);
        r.pass = rep.ok();
        r.detail = "ET^4 " + fmt(rep.et4_direct) + " vs identity " + fmt(rep.et4_identity) +
                   ", sigma^2 " + fmt(rep.sigma2_direct);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SuiteResult> run_lemma32_suite(int models, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    Rng rng(seed);
    for (int k = 0; k < models; ++k) {
        auto model = random_small_model(rng);
        const XiMap xi = random_map(rng);
        const XiMap eta = random_map(rng);
        auto rep = lemma_3_2_check(*model, model->system(), xi, eta);
        SuiteResult r;
        r.name = "lemma 3.2 #" + std::to_string(k) + " " + model->spec_json() + " xi=" +
                 xi_map_name(xi) + " eta=" + xi_map_name(eta);
        r.pass = rep.ok;
        r.detail = "E T^2 S^2 = " + fmt(rep.lhs) + " <= " + fmt(rep.rhs);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SuiteResult> run_prop31_suite(int models, int intervals_per_model,
                                          std::uint64_t seed) {
    std::vector<SuiteResult> out;
    Rng rng(seed);
    for (int k = 0; k < models; ++k) {
        auto model = random_small_model(rng);
        auto atoms = exact_enumerate(*model);
        std::vector<std::pair<double, double>> intervals;
        for (int j = 0; j < intervals_per_model; ++j) {
            if (j < 2 && !atoms.empty()) {
                // Degenerate interval sitting on an atom.
                const double w = atoms[rng.next_below(atoms.size())].first;
                intervals.emplace_back(w, w);
            } else {
                const double a = -3.0 + 6.0 * rng.next_unit();
                const double width = 2.0 * rng.next_unit();
                intervals.emplace_back(a, a + width);
            }
        }
        auto rep = proposition_3_1_check(*model, model->system(), intervals, 10000, seed + k);
        SuiteResult r;
        r.name = "proposition 3.1 #" + std::to_string(k) + " " + model->spec_json();
        r.pass = rep.all_pass;
        std::size_t worst = 0;
        double worst_margin = 1e300;
        for (std::size_t i = 0; i < rep.intervals.size(); ++i) {
            const auto& c = rep.intervals[i];
            const double margin = c.rhs - c.p_hat;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst = i;
            }
        }
        const auto& c = rep.intervals[worst];
        r.detail = std::to_string(intervals.size()) + " intervals (" + rep.method +
                   "), tightest P=" + fmt(c.p_hat) + " <= " + fmt(c.rhs);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SuiteResult> run_stein_suite() {
    std::vector<SuiteResult> out;
    const double h = 1e-5;
    for (double alpha : {0.1, 1.0}) {
        for (double z : {-2.0, 0.0, 2.0}) {
            double worst_f_lo = 0.0, worst_f_hi = 0.0, worst_fp = 0.0, worst_resid = 0.0;
            for (int k = 0; k <= 160; ++k) {
                const double w = -8.0 + 0.1 * k;
                const double f = stein_solution(z, alpha, w);
                worst_f_lo = std::min(worst_f_lo, f);
                worst_f_hi = std::max(worst_f_hi, f);
                const double fp =
                    (stein_solution(z, alpha, w + h) - stein_solution(z, alpha, w - h)) /
                    (2.0 * h);
                worst_fp = std::max(worst_fp, std::fabs(fp));
                // The difference quotient does not approximate f' at the two
                // corners of h_{z,alpha}, where f'' jumps by 1/alpha.
                if (std::fabs(w - z) < 10.0 * h || std::fabs(w - (z + alpha)) < 10.0 * h)
                    continue;
                const double resid = fp - w * f - smoothed_indicator(z, alpha, w) +
                                     smoothed_indicator_mean(z, alpha);
                worst_resid = std::max(worst_resid, std::fabs(resid));
            }
            SuiteResult r;
            r.name = "stein solution z=" + fmt(z) + " alpha=" + fmt(alpha);
            r.pass = worst_f_lo >= -1e-12 && worst_f_hi <= 1.0 + 1e-12 &&
                     worst_fp <= 1.0 + 1e-3 && worst_resid <= 1e-6;
            r.detail = "f in [" + fmt(worst_f_lo) + ", " + fmt(worst_f_hi) + "], max |f'| " +
                       fmt(worst_fp) + ", max residual " + fmt(worst_resid);
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace locdep
