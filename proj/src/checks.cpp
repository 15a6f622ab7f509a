#include "locdep/checks.hpp"

#include <algorithm>
#include <cmath>

#include "locdep/kernels.hpp"
#include "locdep/parallel.hpp"
#include "locdep/rterms.hpp"

namespace locdep {

namespace {

const Enumerator* require_enumerator(const FieldModel& model, const char* who) {
    const Enumerator* en = model.enumerator();
    if (!en) throw capability_error(std::string(who) + " needs an exact enumerator");
    return en;
}

bool rel_equal(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double set_sum(const IndexSet& set, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::int32_t j : set) acc += v[j];
    return acc;
}

}  // namespace

std::string xi_map_name(XiMap map) {
    switch (map) {
        case XiMap::Identity: return "identity";
        case XiMap::Cube: return "cube";
        case XiMap::Clip: return "clip";
    }
    return "?";
}

double apply_xi_map(XiMap map, double value) {
    switch (map) {
        case XiMap::Identity: return value;
        case XiMap::Cube: return value * value * value;
        case XiMap::Clip: return std::clamp(value, -0.25, 0.25);
    }
    return value;
}

Lemma31Report lemma_3_1_check(const FieldModel& model, const NeighborhoodSystem& sys, XiMap map,
                              double rel_tol) {
    const Enumerator* en = require_enumerator(model, "lemma_3_1_check");
    if (static_cast<int>(sys.level()) < 3)
        throw capability_error("lemma_3_1_check needs an LD3 system");
    const std::int64_t n = sys.size();
    std::vector<double> x(n), xi(n);

    // Pass 1: exact centering of the transform.
    std::vector<double> center(n, 0.0);
    for (std::uint64_t k = 0; k < en->size(); ++k) {
        const double p = en->outcome(k, x);
        for (std::int32_t i = 0; i < n; ++i) center[i] += p * apply_xi_map(map, x[i]);
    }

    // Pass 2: every expectation the identity and bounds need.
    double et2 = 0.0, et4 = 0.0;
    std::vector<double> e_xi2(n, 0.0), e_xi4(n, 0.0);
    std::vector<double> e_xi_xa(n, 0.0), e_xb_xc(n, 0.0), e_xb2(n, 0.0);
    std::vector<double> e_xi_xa2_xb(n, 0.0), e_xi_xa3(n, 0.0), e_xi_xa_xb_xc(n, 0.0),
        e_xi_xa_xb2(n, 0.0);
    // Pairwise E xi_i xi_j over j in A_i for (3.19).
    double sigma2_neighbors = 0.0;
    std::vector<double> pair_acc;
    std::size_t pair_slots = 0;
    for (std::int32_t i = 0; i < n; ++i) pair_slots += sys.a(i).size();
    pair_acc.assign(pair_slots, 0.0);

    for (std::uint64_t k = 0; k < en->size(); ++k) {
        const double p = en->outcome(k, x);
        double t = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            xi[i] = apply_xi_map(map, x[i]) - center[i];
            t += xi[i];
        }
        et2 += p * t * t;
        et4 += p * t * t * t * t;
        std::size_t slot = 0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double xa = set_sum(sys.a(i), xi);
            const double xb = set_sum(sys.b(i), xi);
            const double xc = set_sum(sys.c(i), xi);
            e_xi2[i] += p * xi[i] * xi[i];
            e_xi4[i] += p * xi[i] * xi[i] * xi[i] * xi[i];
            e_xi_xa[i] += p * xi[i] * xa;
            e_xb_xc[i] += p * xb * xc;
            e_xb2[i] += p * xb * xb;
            e_xi_xa2_xb[i] += p * xi[i] * xa * xa * xb;
            e_xi_xa3[i] += p * xi[i] * xa * xa * xa;
            e_xi_xa_xb_xc[i] += p * xi[i] * xa * xb * xc;
            e_xi_xa_xb2[i] += p * xi[i] * xa * xb * xb;
            for (std::int32_t j : sys.a(i)) pair_acc[slot++] += p * xi[i] * xi[j];
        }
    }
    for (double v : pair_acc) sigma2_neighbors += v;

    Lemma31Report rep;
    rep.sigma2_direct = et2;
    rep.sigma2_neighbors = sigma2_neighbors;
    rep.et4_direct = et4;
    const double sigma2 = et2;
    double identity = 3.0 * sigma2 * sigma2;
    for (std::int32_t i = 0; i < n; ++i) {
        identity += -6.0 * e_xi_xa[i] * e_xb_xc[i] + 3.0 * e_xi_xa[i] * e_xb2[i] -
                    3.0 * e_xi_xa2_xb[i] + e_xi_xa3[i] + 6.0 * e_xi_xa_xb_xc[i] -
                    3.0 * e_xi_xa_xb2[i];
    }
    rep.et4_identity = identity;

    const double kappa1 = static_cast<double>(sys.kappa_stats().require_kappa1());
    double sum_xi2 = 0.0, sum_xi4 = 0.0;
    for (std::int32_t i = 0; i < n; ++i) {
        sum_xi2 += e_xi2[i];
        sum_xi4 += e_xi4[i];
    }
    rep.bound_322_rhs = kappa1 * sum_xi2;
    rep.bound_323_rhs = 3.0 * sigma2 * sigma2 + 22.0 * kappa1 * kappa1 * kappa1 * sum_xi4;

    rep.identity_319_ok = rel_equal(rep.sigma2_direct, rep.sigma2_neighbors, rel_tol);
    rep.identity_320_ok = rel_equal(rep.et4_direct, rep.et4_identity, rel_tol);
    rep.bound_322_ok = rep.sigma2_direct <= rep.bound_322_rhs * (1.0 + rel_tol) + rel_tol;
    rep.bound_323_ok = rep.et4_direct <= rep.bound_323_rhs * (1.0 + rel_tol) + rel_tol;
    return rep;
}

Lemma32Report lemma_3_2_check(const FieldModel& model, const NeighborhoodSystem& sys, XiMap xi_map,
                              XiMap eta_map, double rel_slack) {
    const Enumerator* en = require_enumerator(model, "lemma_3_2_check");
    if (sys.level() != Level::LD4Star)
        throw capability_error("lemma_3_2_check needs an LD4* system");
    const std::int64_t n = sys.size();
    std::vector<double> x(n);
    KernelSample ks;

    std::vector<double> cx(n, 0.0), cy(n, 0.0);
    for (std::uint64_t k = 0; k < en->size(); ++k) {
        const double p = en->outcome(k, x);
        ks.assign(sys, x);
        for (std::int32_t i = 0; i < n; ++i) {
            cx[i] += p * apply_xi_map(xi_map, ks.x[i]);
            cy[i] += p * apply_xi_map(eta_map, ks.y[i]);
        }
    }

    Lemma32Report rep;
    double sum4 = 0.0;
    for (std::uint64_t k = 0; k < en->size(); ++k) {
        const double p = en->outcome(k, x);
        ks.assign(sys, x);
        double t = 0.0, s = 0.0, local4 = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double xi = apply_xi_map(xi_map, ks.x[i]) - cx[i];
            const double eta = apply_xi_map(eta_map, ks.y[i]) - cy[i];
            t += xi;
            s += eta;
            local4 += xi * xi * xi * xi + eta * eta * eta * eta;
        }
        rep.et2 += p * t * t;
        rep.es2 += p * s * s;
        rep.lhs += p * t * t * s * s;
        sum4 += p * local4;
    }
    const double kappa2 = static_cast<double>(sys.kappa_stats().require_kappa2());
    rep.rhs = 3.0 * rep.et2 * rep.es2 + 12.0 * kappa2 * kappa2 * kappa2 * sum4;
    rep.ok = rep.lhs <= rep.rhs * (1.0 + rel_slack) + rel_slack;
    return rep;
}

Prop31Report proposition_3_1_check(const FieldModel& model, const NeighborhoodSystem& sys,
                                   const std::vector<std::pair<double, double>>& intervals,
                                   std::uint64_t replicates, std::uint64_t seed, int threads) {
    for (auto [a, b] : intervals)
        if (a > b) throw usage_error("interval with a > b");

    EstimateOptions opt;
    opt.replicates = replicates;
    opt.seed = seed;
    opt.threads = threads;
    RTerms r = estimate_r_terms(model, sys, opt);

    Prop31Report rep;
    rep.r2 = r.require(2).value;
    rep.r3 = r.require(3).value;
    rep.r5 = r.require(5).value;
    rep.method = r.require(2).method;
    const double rhs_terms = 4.0 * rep.r2 + 2.125 * rep.r3 + 4.0 * rep.r5;
    const double rhs_se = 4.0 * r.require(2).se + 2.125 * r.require(3).se + 4.0 * r.require(5).se;

    const bool exact = model.enumerator() != nullptr;
    std::vector<std::pair<double, double>> atoms;
    std::vector<double> ws;
    if (exact) {
        atoms = exact_enumerate(model);
    } else {
        ws.resize(replicates);
        auto block = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                Rng rng(seed, streams::kIntervals, k);
                ws[k] = model.sample_w(rng);
            }
            return 0;
        };
        map_blocks<int>(replicates, threads, block);
    }

    for (auto [a, b] : intervals) {
        IntervalCheck chk;
        chk.a = a;
        chk.b = b;
        if (exact) {
            double p = 0.0;
            for (auto [w, pw] : atoms)
                if (w >= a - 1e-12 && w <= b + 1e-12) p += pw;
            chk.p_hat = p;
            chk.p_se = 0.0;
        } else {
            std::uint64_t hits = 0;
            for (double w : ws)
                if (w >= a && w <= b) ++hits;
            chk.p_hat = static_cast<double>(hits) / static_cast<double>(replicates);
            chk.p_se = std::sqrt(std::max(0.0, chk.p_hat * (1.0 - chk.p_hat)) /
                                 static_cast<double>(replicates));
        }
        chk.rhs = 0.625 * (b - a) + rhs_terms;
        chk.rhs_se = rhs_se;
        chk.pass = chk.p_hat - 3.0 * chk.p_se <= chk.rhs + 3.0 * chk.rhs_se + 1e-12;
        rep.all_pass = rep.all_pass && chk.pass;
        rep.intervals.push_back(chk);
    }
    return rep;
}

}  // namespace locdep
