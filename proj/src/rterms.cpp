#include "locdep/rterms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "locdep/kernels.hpp"
#include "locdep/parallel.hpp"

namespace locdep {

namespace {

struct SumAcc {
    double sum = 0.0;
    double sumsq = 0.0;
    std::uint64_t count = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++count;
    }
    SumAcc& operator+=(const SumAcc& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        count += o.count;
        return *this;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
    double se() const {
        if (count < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sumsq - sum * m) / static_cast<double>(count - 1));
        return std::sqrt(var / static_cast<double>(count));
    }
    TermEstimate finish() const { return {mean(), se(), count, kMethodMonteCarlo}; }
};

inline double pow_q(double a, double q) {
    if (q == 2.0) return a * a;
    if (q == 3.0) return a * a * a;
    if (q == 4.0) return (a * a) * (a * a);
    return std::pow(a, q);
}

inline double cap1(double a) { return std::min(std::fabs(a), 1.0); }

bool use_exact(const FieldModel& model, const EstimateOptions& options) {
    const Enumerator* en = model.enumerator();
    return !options.force_mc && en != nullptr && en->size() <= options.exact_limit;
}

// ---------------------------------------------------------------------------
// Monte Carlo r-terms
// ---------------------------------------------------------------------------

struct RTermPartial {
    SumAcc r1dev, r2, r3, r4, r5, r6sq, r7, r8, r9, r10, r11, r12;
    RTermPartial& operator+=(const RTermPartial& o) {
        r1dev += o.r1dev;
        r2 += o.r2;
        r3 += o.r3;
        r4 += o.r4;
        r5 += o.r5;
        r6sq += o.r6sq;
        r7 += o.r7;
        r8 += o.r8;
        r9 += o.r9;
        r10 += o.r10;
        r11 += o.r11;
        r12 += o.r12;
        return *this;
    }
};

RTerms estimate_mc(const FieldModel& model, const NeighborhoodSystem& sys,
                   const EstimateOptions& options) {
    const std::int64_t n = sys.size();
    const int lvl = static_cast<int>(sys.level());
    const std::uint64_t total = std::max<std::uint64_t>(options.replicates, 2);
    const std::uint64_t n1 = std::max<std::uint64_t>(1, total / 4);
    const std::uint64_t n2 = total - n1;

    // Phase 1: pilot estimate of c_i = E X_i Y_i (r1 needs the centering).
    struct Phase1 {
        std::vector<double> csum;
        SumAcc total_xy;
        Phase1& operator+=(const Phase1& o) {
            if (csum.empty()) csum = o.csum;
            else
                for (std::size_t i = 0; i < csum.size(); ++i) csum[i] += o.csum[i];
            total_xy += o.total_xy;
            return *this;
        }
    };
    auto p1_block = [&](std::size_t lo, std::size_t hi) {
        Phase1 acc;
        acc.csum.assign(n, 0.0);
        std::vector<double> x(n);
        KernelSample ks;
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng(options.seed, streams::kRTermsPhase1, k);
            model.sample_into(rng, x);
            ks.assign(sys, x);
            double tot = 0.0;
            for (std::int32_t i = 0; i < n; ++i) {
                const double v = ks.x[i] * ks.y[i];
                acc.csum[i] += v;
                tot += v;
            }
            acc.total_xy.add(tot);
        }
        return acc;
    };
    Phase1 p1 = parallel_reduce<Phase1>(
        n1, options.threads, p1_block, [](Phase1 a, const Phase1& b) { a += b; return a; },
        Phase1{});
    std::vector<double> c(n, 0.0);
    for (std::int32_t i = 0; i < n; ++i) c[i] = p1.csum[i] / static_cast<double>(n1);
    const double c_se = p1.total_xy.se();

    // Phase 2: everything else, on independent replicate pairs.
    PairList pairs;
    if (lvl >= 2) pairs = sys.neighbor_pairs_b();

    auto p2_block = [&](std::size_t lo, std::size_t hi) {
        RTermPartial acc;
        std::vector<double> x1(n), x2(n);
        KernelSample s1, s2;
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng1(options.seed, streams::kRTermsPhase2, 2 * k);
            Rng rng2(options.seed, streams::kRTermsPhase2, 2 * k + 1);
            model.sample_into(rng1, x1);
            model.sample_into(rng2, x2);
            s1.assign(sys, x1);
            s2.assign(sys, x2);
            double w = 0.0;
            for (double v : x1) w += v;
            const double absw = std::fabs(w);

            double dev = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
            double t7 = 0.0, t8 = 0.0, t9 = 0.0, t11 = 0.0, t12 = 0.0;
            for (std::int32_t i = 0; i < n; ++i) {
                const double xi = s1.x[i];
                const double yi = s1.y[i];
                const double absx = std::fabs(xi);
                const double absy = std::fabs(yi);
                const double ycap = std::min(yi * yi, 1.0);
                dev += xi * yi - c[i];
                if (absy > 1.0) t2 += std::fabs(xi * yi);
                t3 += absx * ycap;
                t4 += absw * absx * ycap;
                if (lvl >= 3) {
                    const double zi = s1.z[i];
                    const double abszi = std::fabs(zi);
                    const double star = std::fabs(s2.x[i]) * cap1(s2.y[i]);
                    if (absx > 1.0) {
                        t7 += std::fabs(xi * yi);
                        t11 += star;
                    } else {
                        t8 += absx * std::min(absy, 1.0) * abszi;
                        t9 += absw * absx * std::min(absy, 1.0) * std::min(abszi, 1.0);
                    }
                    t12 += (absw + 1.0) * std::min(abszi, 1.0) * star;
                }
            }
            acc.r1dev.add(std::fabs(dev));
            acc.r2.add(t2);
            acc.r3.add(t3);
            acc.r4.add(t4);
            if (lvl >= 2) {
                acc.r5.add(r5_pair_value(s1, s2, pairs));
                acc.r6sq.add(r6sq_pair_value(s1, s2, pairs));
            }
            if (lvl >= 3) {
                acc.r7.add(t7);
                acc.r8.add(t8);
                acc.r9.add(t9);
                acc.r10.add(r10_pair_value(s1, s2, pairs));
                acc.r11.add(t11);
                acc.r12.add(t12);
            }
        }
        return acc;
    };
    RTermPartial p2 = parallel_reduce<RTermPartial>(
        n2, options.threads, p2_block,
        [](RTermPartial a, const RTermPartial& b) { a += b; return a; }, RTermPartial{});

    RTerms out;
    out.r1_phase1 = n1;
    out.r1_phase2 = n2;
    TermEstimate r1 = p2.r1dev.finish();
    // Pilot noise in the centering biases r1 upward by O(c_se); fold it into
    // the reported uncertainty.
    r1.se = std::sqrt(r1.se * r1.se + c_se * c_se);
    out.term[1] = r1;
    out.term[2] = p2.r2.finish();
    out.term[3] = p2.r3.finish();
    out.term[4] = p2.r4.finish();
    if (lvl >= 2) {
        out.term[5] = p2.r5.finish();
        TermEstimate r6sq = p2.r6sq.finish();
        TermEstimate r6;
        r6.replicates = r6sq.replicates;
        r6.method = kMethodMonteCarlo;
        if (r6sq.value > 0.0) {
            r6.value = std::sqrt(r6sq.value);
            r6.se = r6sq.se / (2.0 * r6.value);
        } else {
            r6.value = 0.0;
            r6.se = std::sqrt(r6sq.se);
        }
        out.term[6] = r6;
    }
    if (lvl >= 3) {
        out.term[7] = p2.r7.finish();
        out.term[8] = p2.r8.finish();
        out.term[9] = p2.r9.finish();
        out.term[10] = p2.r10.finish();
        out.term[11] = p2.r11.finish();
        out.term[12] = p2.r12.finish();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exact enumeration r-terms
// ---------------------------------------------------------------------------

struct Atom {
    double x, y, p;
};

RTerms estimate_exact(const FieldModel& model, const NeighborhoodSystem& sys,
                      const EstimateOptions& options) {
    const Enumerator* en = model.enumerator();
    const std::int64_t n = sys.size();
    const int lvl = static_cast<int>(sys.level());
    const std::uint64_t m = en->size();

    PairList pairs;
    if (lvl >= 2) pairs = sys.neighbor_pairs_b();

    std::vector<double> x(n);
    KernelSample ks;

    std::vector<double> c(n, 0.0), e_absxy_cap(n, 0.0), p_xgt1(n, 0.0), e_wz(n, 0.0);
    double r2 = 0.0, r3 = 0.0, r4 = 0.0, r7 = 0.0, r8 = 0.0, r9 = 0.0;
    double r5_un = 0.0, r6_un = 0.0, r10_un = 0.0;
    std::vector<std::map<std::pair<double, double>, double>> marg(n);

    for (std::uint64_t k = 0; k < m; ++k) {
        const double p = en->outcome(k, x);
        ks.assign(sys, x);
        double w = 0.0;
        for (double v : x) w += v;
        const double absw = std::fabs(w);
        for (std::int32_t i = 0; i < n; ++i) {
            const double xi = ks.x[i];
            const double yi = ks.y[i];
            const double absx = std::fabs(xi);
            const double absy = std::fabs(yi);
            const double ycap = std::min(yi * yi, 1.0);
            c[i] += p * xi * yi;
            if (absy > 1.0) r2 += p * std::fabs(xi * yi);
            r3 += p * absx * ycap;
            r4 += p * absw * absx * ycap;
            e_absxy_cap[i] += p * absx * std::min(absy, 1.0);
            if (absx > 1.0) p_xgt1[i] += p;
            if (lvl >= 3) {
                const double zi = ks.z[i];
                if (absx > 1.0) r7 += p * std::fabs(xi * yi);
                else {
                    r8 += p * absx * std::min(absy, 1.0) * std::fabs(zi);
                    r9 += p * absw * absx * std::min(absy, 1.0) * std::min(std::fabs(zi), 1.0);
                }
                e_wz[i] += p * (absw + 1.0) * std::min(std::fabs(zi), 1.0);
            }
            if (lvl >= 2) marg[i][{xi, yi}] += p;
        }
        for (auto [i, j] : pairs) {
            const double yi = ks.y[i];
            const double yj = ks.y[j];
            if (yi * yj >= 0.0) {
                const double prod = ks.x[i] * ks.x[j];
                r5_un += p * prod * std::min({std::fabs(yi), std::fabs(yj), 1.0});
                r6_un += p * prod * std::min({yi * yi, yj * yj, 1.0});
            }
            r10_un += p * std::fabs(ks.x[i] * ks.x[j]) *
                      std::min({std::fabs(yi), std::fabs(yj), 1.0});
        }
    }

    // Second pass for r1 with the exact centering.
    double r1 = 0.0;
    for (std::uint64_t k = 0; k < m; ++k) {
        const double p = en->outcome(k, x);
        ks.assign(sys, x);
        double dev = 0.0;
        for (std::int32_t i = 0; i < n; ++i) dev += ks.x[i] * ks.y[i] - c[i];
        r1 += p * std::fabs(dev);
    }

    // Starred parts over the product of per-index marginals of (X_i, Y_i).
    double r5_star = 0.0, r6_star = 0.0, r10_star = 0.0;
    for (auto [i, j] : pairs) {
        for (const auto& [ai, pi] : marg[i]) {
            for (const auto& [aj, pj] : marg[j]) {
                const double pp = pi * pj;
                const double yi = ai.second;
                const double yj = aj.second;
                if (yi * yj >= 0.0) {
                    const double prod = ai.first * aj.first;
                    r5_star += pp * prod * std::min({std::fabs(yi), std::fabs(yj), 1.0});
                    r6_star += pp * prod * std::min({yi * yi, yj * yj, 1.0});
                }
                r10_star += pp * std::fabs(ai.first * aj.first) *
                            std::min({std::fabs(yi), std::fabs(yj), 1.0});
            }
        }
    }

    auto exact = [&](double v) { return TermEstimate{v, 0.0, m, kMethodExact}; };
    RTerms out;
    out.term[1] = exact(r1);
    out.term[2] = exact(r2);
    out.term[3] = exact(r3);
    out.term[4] = exact(r4);
    if (lvl >= 2) {
        out.term[5] = exact(r5_un - r5_star);
        const double r6sq = 0.5 * (r6_un - r6_star);
        out.term[6] = exact(std::sqrt(std::max(0.0, r6sq)));
    }
    if (lvl >= 3) {
        out.term[7] = exact(r7);
        out.term[8] = exact(r8);
        out.term[9] = exact(r9);
        out.term[10] = exact(r10_un + r10_star);
        double r11 = 0.0, r12 = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            r11 += p_xgt1[i] * e_absxy_cap[i];
            r12 += e_wz[i] * e_absxy_cap[i];
        }
        out.term[11] = exact(r11);
        out.term[12] = exact(r12);
    }
    (void)options;
    return out;
}

}  // namespace

const TermEstimate& RTerms::require(int k) const {
    if (!has(k))
        throw capability_error("r" + std::to_string(k) +
                               " was not estimated (system level too low)");
    return *term[k];
}

RTerms estimate_r_terms(const FieldModel& model, const NeighborhoodSystem& system,
                        const EstimateOptions& options) {
    if (model.size() != system.size())
        throw structural_error("model and system sizes disagree");
    if (use_exact(model, options)) return estimate_exact(model, system, options);
    return estimate_mc(model, system, options);
}

// ---------------------------------------------------------------------------
// Remark 2.1 chain for r4 under LD1 only
// ---------------------------------------------------------------------------

TermEstimate r4_ld1_bound(const FieldModel& model, const NeighborhoodSystem& sys,
                          const EstimateOptions& options) {
    const std::int64_t n = sys.size();
    if (use_exact(model, options)) {
        const Enumerator* en = model.enumerator();
        std::vector<double> x(n);
        KernelSample ks;
        std::vector<double> e_absy(n, 0.0), e_xcap(n, 0.0), e_yx(n, 0.0);
        for (std::uint64_t k = 0; k < en->size(); ++k) {
            const double p = en->outcome(k, x);
            ks.assign(sys, x);
            for (std::int32_t i = 0; i < n; ++i) {
                const double absx = std::fabs(ks.x[i]);
                e_absy[i] += p * std::fabs(ks.y[i]);
                e_xcap[i] += p * absx * std::min(absx * absx, 1.0);
                e_yx[i] += p * std::fabs(ks.y[i] * ks.x[i]) * std::min(absx, 1.0);
            }
        }
        double bound = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double ai = static_cast<double>(sys.a(i).size());
            double inner = 0.0;
            for (std::int32_t j : sys.a(i)) inner += (1.0 + e_absy[j]) * e_xcap[j] + e_yx[j];
            bound += ai * inner + ai * ai * ((1.0 + e_absy[i]) * e_xcap[i] + e_yx[i]);
        }
        return {bound, 0.0, en->size(), kMethodExact};
    }

    auto block = [&](std::size_t lo, std::size_t hi) {
        SumAcc acc;
        std::vector<double> x1(n), x2(n);
        KernelSample s1, s2;
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng1(options.seed, streams::kRTermsPhase2, 2 * k);
            Rng rng2(options.seed, streams::kRTermsPhase2, 2 * k + 1);
            model.sample_into(rng1, x1);
            model.sample_into(rng2, x2);
            s1.assign(sys, x1);
            s2.assign(sys, x2);
            // Products of expectations split across the independent pair so
            // the per-replicate value is unbiased.
            double v = 0.0;
            for (std::int32_t i = 0; i < n; ++i) {
                const double ai = static_cast<double>(sys.a(i).size());
                auto piece = [&](std::int32_t j) {
                    const double absx2 = std::fabs(s2.x[j]);
                    const double prod =
                        (1.0 + std::fabs(s1.y[j])) * absx2 * std::min(absx2 * absx2, 1.0);
                    const double direct = std::fabs(s1.y[j] * s1.x[j]) *
                                          std::min(std::fabs(s1.x[j]), 1.0);
                    return prod + direct;
                };
                double inner = 0.0;
                for (std::int32_t j : sys.a(i)) inner += piece(j);
                v += ai * inner + ai * ai * piece(i);
            }
            acc.add(v);
        }
        return acc;
    };
    SumAcc acc = parallel_reduce<SumAcc>(
        options.replicates, options.threads, block,
        [](SumAcc a, const SumAcc& b) { a += b; return a; }, SumAcc{});
    return acc.finish();
}

// ---------------------------------------------------------------------------
// sigma_i and lambda (Theorem 2.3)
// ---------------------------------------------------------------------------

SigmaLambda sigma_lambda(const FieldModel& model, const NeighborhoodSystem& sys,
                         std::uint64_t mc_replicates, std::uint64_t seed, int threads) {
    if (static_cast<int>(sys.level()) < 3)
        throw capability_error("sigma_lambda needs an LD3 system");
    const std::int64_t n = sys.size();

    // N(C_i) = {j : C_i & B_j != {}} via the inverted index of B.
    std::vector<std::vector<std::int32_t>> owners_b(n);
    for (std::int32_t j = 0; j < n; ++j)
        for (std::int32_t e : sys.b(j)) owners_b[e].push_back(j);
    std::vector<char> mark(n, 0);
    auto n_of_c = [&](std::int32_t i) {
        std::vector<std::int32_t> nc;
        for (std::int32_t e : sys.c(i))
            for (std::int32_t j : owners_b[e])
                if (!mark[j]) {
                    mark[j] = 1;
                    nc.push_back(j);
                }
        for (std::int32_t j : nc) mark[j] = 0;
        std::sort(nc.begin(), nc.end());
        return nc;
    };

    SigmaLambda out;
    out.sigma.resize(n);
    out.sigma_se.assign(n, 0.0);

    if (model.has_covariance()) {
        double var_w = 0.0;
        for (std::int32_t i = 0; i < n; ++i)
            for (std::int32_t j : sys.a(i)) var_w += model.covariance(i, j);
        for (std::int32_t i = 0; i < n; ++i) {
            auto nc = n_of_c(i);
            double cov_w_nc = 0.0;
            for (std::int32_t j : nc)
                for (std::int32_t l : sys.a(j)) cov_w_nc += model.covariance(j, l);
            double var_nc = 0.0;
            for (std::int32_t j : nc)
                for (std::int32_t l : nc) var_nc += model.covariance(j, l);
            const double s2 = var_w - 2.0 * cov_w_nc + var_nc;
            if (!(s2 > 0.0))
                throw degeneracy_error("sigma_i^2 <= 0 at index " + sys.label(i));
            out.sigma[i] = std::sqrt(s2);
        }
    } else {
        struct Moments {
            std::vector<double> sum2, sum4;
            std::uint64_t count = 0;
            Moments& operator+=(const Moments& o) {
                if (sum2.empty()) {
                    sum2 = o.sum2;
                    sum4 = o.sum4;
                } else {
                    for (std::size_t i = 0; i < sum2.size(); ++i) {
                        sum2[i] += o.sum2[i];
                        sum4[i] += o.sum4[i];
                    }
                }
                count += o.count;
                return *this;
            }
        };
        std::vector<std::vector<std::int32_t>> ncs(n);
        for (std::int32_t i = 0; i < n; ++i) ncs[i] = n_of_c(i);
        auto block = [&](std::size_t lo, std::size_t hi) {
            Moments acc;
            acc.sum2.assign(n, 0.0);
            acc.sum4.assign(n, 0.0);
            std::vector<double> x(n);
            for (std::size_t k = lo; k < hi; ++k) {
                Rng rng(seed, streams::kPilotVariance, k);
                model.sample_into(rng, x);
                double w = 0.0;
                for (double v : x) w += v;
                for (std::int32_t i = 0; i < n; ++i) {
                    double wt = w;
                    for (std::int32_t j : ncs[i]) wt -= x[j];
                    const double sq = wt * wt;
                    acc.sum2[i] += sq;
                    acc.sum4[i] += sq * sq;
                }
                ++acc.count;
            }
            return acc;
        };
        Moments mom = parallel_reduce<Moments>(
            mc_replicates, threads, block, [](Moments a, const Moments& b) { a += b; return a; },
            Moments{});
        const double cnt = static_cast<double>(mom.count);
        for (std::int32_t i = 0; i < n; ++i) {
            const double m2 = mom.sum2[i] / cnt;
            const double var_of_sq =
                std::max(0.0, mom.sum4[i] / cnt - m2 * m2) / std::max(1.0, cnt - 1.0);
            if (!(m2 > 0.0))
                throw degeneracy_error("sigma_i^2 <= 0 after MC noise at index " + sys.label(i));
            out.sigma[i] = std::sqrt(m2);
            out.sigma_se[i] = std::sqrt(var_of_sq) / (2.0 * out.sigma[i]);
        }
    }

    double min_sigma = out.sigma[0];
    std::int32_t argmin = 0;
    for (std::int32_t i = 1; i < n; ++i)
        if (out.sigma[i] < min_sigma) {
            min_sigma = out.sigma[i];
            argmin = i;
        }
    out.lambda = std::max(1.0, 1.0 / min_sigma);
    out.lambda_se =
        out.lambda > 1.0 ? out.sigma_se[argmin] / (min_sigma * min_sigma) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Moment summary
// ---------------------------------------------------------------------------

MomentSummary estimate_moments(const FieldModel& model, const NeighborhoodSystem& sys, double p,
                               const EstimateOptions& options) {
    if (!(p > 2.0 && p <= 4.0)) throw usage_error("moment order p must lie in (2, 4]");
    const std::int64_t n = sys.size();
    const int lvl = static_cast<int>(sys.level());
    const double q3 = std::min(3.0, p);

    MomentSummary out;
    out.p = p;
    out.n = n;
    auto alloc = [&](std::vector<double>& v) { v.assign(n, 0.0); };
    alloc(out.ex2);
    alloc(out.ex3);
    alloc(out.exp_);
    alloc(out.exp_se);
    alloc(out.ey2);
    alloc(out.ey3);
    alloc(out.eyp);
    if (lvl >= 2) {
        alloc(out.ez2);
        alloc(out.ez3);
        alloc(out.ezp);
    }

    if (use_exact(model, options)) {
        const Enumerator* en = model.enumerator();
        std::vector<double> x(n);
        KernelSample ks;
        for (std::uint64_t k = 0; k < en->size(); ++k) {
            const double pr = en->outcome(k, x);
            ks.assign(sys, x);
            for (std::int32_t i = 0; i < n; ++i) {
                const double ax = std::fabs(ks.x[i]);
                const double ay = std::fabs(ks.y[i]);
                out.ex2[i] += pr * ax * ax;
                out.ex3[i] += pr * ax * ax * ax;
                out.exp_[i] += pr * pow_q(ax, p);
                out.ey2[i] += pr * ay * ay;
                out.ey3[i] += pr * ay * ay * ay;
                out.eyp[i] += pr * pow_q(ay, p);
                if (lvl >= 2) {
                    const double az = std::fabs(ks.z[i]);
                    out.ez2[i] += pr * az * az;
                    out.ez3[i] += pr * az * az * az;
                    out.ezp[i] += pr * pow_q(az, p);
                }
            }
        }
        out.method = kMethodExact;
        out.replicates = en->size();
    } else {
        struct Partial {
            std::vector<double> sums;  // 9 (or 6) per-index accumulators, flattened
            SumAcc gamma, x3y3;
            std::vector<double> sum_xyp, sumsq_xyp;  // per-index |x|^p + |y|^p for theta SE
            std::vector<double> sumsq_xp;            // per-index (|x|^p)^2
            std::uint64_t count = 0;
            Partial& operator+=(const Partial& o) {
                if (sums.empty()) {
                    sums = o.sums;
                    sum_xyp = o.sum_xyp;
                    sumsq_xyp = o.sumsq_xyp;
                    sumsq_xp = o.sumsq_xp;
                } else {
                    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += o.sums[i];
                    for (std::size_t i = 0; i < sum_xyp.size(); ++i) {
                        sum_xyp[i] += o.sum_xyp[i];
                        sumsq_xyp[i] += o.sumsq_xyp[i];
                        sumsq_xp[i] += o.sumsq_xp[i];
                    }
                }
                gamma += o.gamma;
                x3y3 += o.x3y3;
                count += o.count;
                return *this;
            }
        };
        const std::size_t lanes = lvl >= 2 ? 9 : 6;
        auto block = [&](std::size_t lo, std::size_t hi) {
            Partial acc;
            acc.sums.assign(lanes * n, 0.0);
            acc.sum_xyp.assign(n, 0.0);
            acc.sumsq_xyp.assign(n, 0.0);
            acc.sumsq_xp.assign(n, 0.0);
            std::vector<double> x(n);
            KernelSample ks;
            for (std::size_t k = lo; k < hi; ++k) {
                Rng rng(options.seed, streams::kMoments, k);
                model.sample_into(rng, x);
                ks.assign(sys, x);
                double g = 0.0, s33 = 0.0;
                for (std::int32_t i = 0; i < n; ++i) {
                    const double ax = std::fabs(ks.x[i]);
                    const double ay = std::fabs(ks.y[i]);
                    const double xp = pow_q(ax, p);
                    const double yp = pow_q(ay, p);
                    acc.sums[0 * n + i] += ax * ax;
                    acc.sums[1 * n + i] += ax * ax * ax;
                    acc.sums[2 * n + i] += xp;
                    acc.sums[3 * n + i] += ay * ay;
                    acc.sums[4 * n + i] += ay * ay * ay;
                    acc.sums[5 * n + i] += yp;
                    if (lvl >= 2) {
                        const double az = std::fabs(ks.z[i]);
                        acc.sums[6 * n + i] += az * az;
                        acc.sums[7 * n + i] += az * az * az;
                        acc.sums[8 * n + i] += pow_q(az, p);
                    }
                    const double xy = xp + yp;
                    acc.sum_xyp[i] += xy;
                    acc.sumsq_xyp[i] += xy * xy;
                    acc.sumsq_xp[i] += xp * xp;
                    g += xp;
                    s33 += pow_q(ax, q3) + pow_q(ay, q3);
                }
                acc.gamma.add(g);
                acc.x3y3.add(s33);
                ++acc.count;
            }
            return acc;
        };
        Partial part = parallel_reduce<Partial>(
            options.replicates, options.threads, block,
            [](Partial a, const Partial& b) { a += b; return a; }, Partial{});
        const double cnt = static_cast<double>(part.count);
        for (std::int32_t i = 0; i < n; ++i) {
            out.ex2[i] = part.sums[0 * n + i] / cnt;
            out.ex3[i] = part.sums[1 * n + i] / cnt;
            out.exp_[i] = part.sums[2 * n + i] / cnt;
            out.ey2[i] = part.sums[3 * n + i] / cnt;
            out.ey3[i] = part.sums[4 * n + i] / cnt;
            out.eyp[i] = part.sums[5 * n + i] / cnt;
            if (lvl >= 2) {
                out.ez2[i] = part.sums[6 * n + i] / cnt;
                out.ez3[i] = part.sums[7 * n + i] / cnt;
                out.ezp[i] = part.sums[8 * n + i] / cnt;
            }
            const double vxp =
                std::max(0.0, part.sumsq_xp[i] / cnt - out.exp_[i] * out.exp_[i]);
            out.exp_se[i] = std::sqrt(vxp / cnt);
        }
        out.method = kMethodMonteCarlo;
        out.replicates = part.count;
        out.gamma = part.gamma.mean();
        out.gamma_se = part.gamma.se();
        out.sum_x3_y3 = part.x3y3.mean();
        out.sum_x3_y3_se = part.x3y3.se();

        // theta and its delta-method SE at the maximizing index.
        double best = -1.0;
        std::int32_t arg = 0;
        for (std::int32_t i = 0; i < n; ++i) {
            const double s = out.exp_[i] + out.eyp[i];
            if (s > best) {
                best = s;
                arg = i;
            }
        }
        out.theta = std::pow(best, 1.0 / p);
        const double mean_arg = part.sum_xyp[arg] / cnt;
        const double var_arg =
            std::max(0.0, part.sumsq_xyp[arg] / cnt - mean_arg * mean_arg);
        const double se_sum = std::sqrt(var_arg / cnt);
        if (best > 0.0)
            out.theta_se = se_sum * std::pow(best, 1.0 / p - 1.0) / p;
        return out;
    }

    // Aggregates for the exact path.
    double best = -1.0;
    for (std::int32_t i = 0; i < n; ++i) {
        out.gamma += out.exp_[i];
        if (q3 == 3.0) out.sum_x3_y3 += out.ex3[i] + out.ey3[i];
        else out.sum_x3_y3 += out.exp_[i] + out.eyp[i];  // q3 = p < 3
        best = std::max(best, out.exp_[i] + out.eyp[i]);
    }
    out.theta = std::pow(best, 1.0 / p);
    return out;
}

}  // namespace locdep
