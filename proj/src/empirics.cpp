#include "locdep/empirics.hpp"

#include <algorithm>
#include <cmath>

#include "locdep/errors.hpp"
#include "locdep/normal.hpp"
#include "locdep/parallel.hpp"

namespace locdep {

namespace {

bool exact_mode(const FieldModel& model) {
    const Enumerator* en = model.enumerator();
    return en != nullptr && en->size() <= kExactModeLimit;
}

// Sorted replicate draws of W, filled block-deterministically.
std::vector<double> sample_w_sorted(const FieldModel& model, std::uint64_t replicates,
                                    std::uint64_t seed, int threads, std::uint64_t stream) {
    std::vector<double> w(replicates);
    auto block = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng(seed, stream, k);
            w[k] = model.sample_w(rng);
        }
        return 0;
    };
    map_blocks<int>(replicates, threads, block);
    std::sort(w.begin(), w.end());
    return w;
}

// F is right-continuous; the sup over a step cdf is attained at atoms from
// one side or the other.
double ks_exact(const std::vector<std::pair<double, double>>& atoms) {
    double best = 0.0;
    double left = 0.0;
    for (auto [w, p] : atoms) {
        const double phi = normal_cdf(w);
        best = std::max(best, std::fabs(left - phi));
        left += p;
        best = std::max(best, std::fabs(left - phi));
    }
    return best;
}

double ks_sorted_sample(const std::vector<double>& w) {
    const double n = static_cast<double>(w.size());
    double best = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double phi = normal_cdf(w[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - phi;
        const double lo = phi - static_cast<double>(i) / n;
        best = std::max({best, std::fabs(hi), std::fabs(lo)});
    }
    return best;
}

}  // namespace

EmpiricalDistance kolmogorov_distance(const FieldModel& model, std::uint64_t replicates,
                                      std::uint64_t seed, double delta, int threads) {
    EmpiricalDistance out;
    out.delta = delta;
    if (exact_mode(model)) {
        auto atoms = exact_enumerate(model);
        out.ks = ks_exact(atoms);
        out.mode = "exact";
        out.dkw_radius = 0.0;
        out.replicates = model.enumerator()->size();
        return out;
    }
    if (replicates < 1000)
        throw usage_error("Monte Carlo Kolmogorov distance needs >= 1000 replicates");
    if (!(delta > 0.0 && delta < 1.0)) throw usage_error("delta must lie in (0, 1)");
    auto w = sample_w_sorted(model, replicates, seed, threads, streams::kKolmogorov);
    out.ks = ks_sorted_sample(w);
    out.mode = "monte-carlo";
    out.replicates = replicates;
    out.dkw_radius = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(replicates)));
    return out;
}

EmpiricalDistance nonuniform_profile(const FieldModel& model, std::uint64_t replicates,
                                     std::uint64_t seed, const std::vector<double>& zgrid,
                                     double delta, int threads) {
    EmpiricalDistance out;
    out.delta = delta;
    if (exact_mode(model)) {
        auto atoms = exact_enumerate(model);
        out.ks = ks_exact(atoms);
        out.mode = "exact";
        out.replicates = model.enumerator()->size();
        for (double z : zgrid) {
            double f = 0.0;
            for (auto [w, p] : atoms) {
                if (w <= z) f += p;
                else break;
            }
            out.profile.push_back({z, std::fabs(f - normal_cdf(z)), 0.0});
        }
        return out;
    }
    if (replicates < 1000)
        throw usage_error("Monte Carlo profile needs >= 1000 replicates");
    auto w = sample_w_sorted(model, replicates, seed, threads, streams::kProfile);
    out.ks = ks_sorted_sample(w);
    out.mode = "monte-carlo";
    out.replicates = replicates;
    out.dkw_radius = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(replicates)));
    const double n = static_cast<double>(replicates);
    for (double z : zgrid) {
        const auto it = std::upper_bound(w.begin(), w.end(), z);
        const double f = static_cast<double>(it - w.begin()) / n;
        const double se = std::sqrt(std::max(0.0, f * (1.0 - f)) / n);
        out.profile.push_back({z, std::fabs(f - normal_cdf(z)), se});
    }
    return out;
}

RateFit rate_fit(const std::vector<RatePoint>& points) {
    if (points.size() < 3) throw usage_error("rate_fit needs at least 3 points");
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (const auto& p : points) {
        if (!(p.distance > 0.0)) throw usage_error("rate_fit needs positive distances");
        if (!(p.n > 0.0)) throw usage_error("rate_fit needs positive sizes");
        if (!(p.weight > 0.0)) throw usage_error("rate_fit needs positive weights");
        sw += p.weight;
        swx += p.weight * std::log(p.n);
        swy += p.weight * std::log(p.distance);
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.n) - xbar;
        sxx += p.weight * dx * dx;
        sxy += p.weight * dx * (std::log(p.distance) - ybar);
    }
    if (!(sxx > 0.0)) throw usage_error("rate_fit needs at least two distinct sizes");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double rss = 0.0;
    for (const auto& p : points) {
        const double resid =
            std::log(p.distance) - (fit.intercept + fit.slope * std::log(p.n));
        rss += p.weight * resid * resid;
    }
    const double dof = static_cast<double>(points.size()) - 2.0;
    fit.slope_se = std::sqrt(std::max(0.0, rss / dof) / sxx);
    fit.slope_ci_lo = fit.slope - 1.96 * fit.slope_se;
    fit.slope_ci_hi = fit.slope + 1.96 * fit.slope_se;
    return fit;
}

Verdict dominance_verdict(const EmpiricalDistance& distance, const BoundReport& bound) {
    if (bound.c_free)
        throw capability_error(
            "C-free rate functionals carry an unspecified absolute constant; use rate_fit");
    Verdict v;
    const double lhs = distance.ks - 3.0 * distance.dkw_radius;
    const double rhs = bound.value + 3.0 * bound.se;
    v.pass = lhs <= rhs;
    v.margin = rhs - lhs;
    return v;
}

}  // namespace locdep
