#include "locdep/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "locdep/parallel.hpp"

namespace locdep {

KernelSample KernelSample::from(const NeighborhoodSystem& system,
                                std::span<const double> values) {
    KernelSample s;
    s.assign(system, values);
    return s;
}

void KernelSample::assign(const NeighborhoodSystem& system, std::span<const double> values) {
    const std::int64_t n = system.size();
    x.assign(values.begin(), values.end());
    y.resize(n);
    for (std::int32_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int32_t j : system.a(i)) acc += values[j];
        y[i] = acc;
    }
    if (static_cast<int>(system.level()) >= 2) {
        z.resize(n);
        for (std::int32_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::int32_t j : system.b(i)) acc += values[j];
            z[i] = acc;
        }
    }
}

double khat(double x_i, double y_i, double t) {
    const double up = (-y_i <= t && t < 0.0) ? 1.0 : 0.0;
    const double down = (0.0 <= t && t <= -y_i) ? 1.0 : 0.0;
    return x_i * (up - down);
}

double khat(const KernelSample& sample, std::int32_t i, double t) {
    return khat(sample.x[i], sample.y[i], t);
}

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
    SumAcc merged(const SumAcc& o) const {
        return {sum + o.sum, sumsq + o.sumsq, count + o.count};
    }
    MeanSe finish() const {
        MeanSe out;
        out.replicates = count;
        if (count == 0) return out;
        out.value = sum / static_cast<double>(count);
        if (count > 1) {
            const double var =
                std::max(0.0, (sumsq - sum * out.value) / static_cast<double>(count - 1));
            out.se = std::sqrt(var / static_cast<double>(count));
        }
        return out;
    }
};

}  // namespace

MeanSe k_integral_identity(const FieldModel& model, std::uint64_t replicates, std::uint64_t seed,
                           int threads) {
    const auto& sys = model.system();
    const std::int64_t n = sys.size();
    auto block = [&](std::size_t lo, std::size_t hi) {
        SumAcc acc;
        std::vector<double> x(n);
        for (std::size_t k = lo; k < hi; ++k) {
            Rng rng(seed, streams::kSample, k);
            model.sample_into(rng, x);
            double v = 0.0;
            for (std::int32_t i = 0; i < n; ++i) {
                double y = 0.0;
                for (std::int32_t j : sys.a(i)) y += x[j];
                v += x[i] * y;
            }
            acc.add(v);
        }
        return acc;
    };
    auto acc = parallel_reduce<SumAcc>(
        replicates, threads, block, [](SumAcc a, SumAcc b) { return a.merged(b); }, SumAcc{});
    return acc.finish();
}

double k_integral_exact(const FieldModel& model) {
    const Enumerator* en = model.enumerator();
    if (!en) throw capability_error("k_integral_exact needs an enumerator");
    const auto& sys = model.system();
    const std::int64_t n = sys.size();
    std::vector<double> x(n);
    double total = 0.0;
    for (std::uint64_t k = 0; k < en->size(); ++k) {
        const double p = en->outcome(k, x);
        double v = 0.0;
        for (std::int32_t i = 0; i < n; ++i) {
            double y = 0.0;
            for (std::int32_t j : sys.a(i)) y += x[j];
            v += x[i] * y;
        }
        total += p * v;
    }
    return total;
}

double covariance_identity_sum(const FieldModel& model) {
    if (!model.has_covariance()) throw capability_error("model has no covariance oracle");
    const auto& sys = model.system();
    double total = 0.0;
    for (std::int32_t i = 0; i < sys.size(); ++i)
        for (std::int32_t j : sys.a(i)) total += model.covariance(i, j);
    return total;
}

double r5_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs) {
    double acc = 0.0;
    for (auto [i, j] : pairs) {
        const double yi = s1.y[i];
        const double yj = s1.y[j];
        if (yi * yj >= 0.0)
            acc += s1.x[i] * s1.x[j] * std::min({std::fabs(yi), std::fabs(yj), 1.0});
        const double yjs = s2.y[j];
        if (yi * yjs >= 0.0)
            acc -= s1.x[i] * s2.x[j] * std::min({std::fabs(yi), std::fabs(yjs), 1.0});
    }
    return acc;
}

double r6sq_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs) {
    double acc = 0.0;
    for (auto [i, j] : pairs) {
        const double yi = s1.y[i];
        const double yj = s1.y[j];
        if (yi * yj >= 0.0)
            acc += s1.x[i] * s1.x[j] * std::min({yi * yi, yj * yj, 1.0});
        const double yjs = s2.y[j];
        if (yi * yjs >= 0.0)
            acc -= s1.x[i] * s2.x[j] * std::min({yi * yi, yjs * yjs, 1.0});
    }
    return 0.5 * acc;
}

double r10_pair_value(const KernelSample& s1, const KernelSample& s2, const PairList& pairs) {
    double acc = 0.0;
    for (auto [i, j] : pairs) {
        const double yi = std::fabs(s1.y[i]);
        acc += std::fabs(s1.x[i] * s1.x[j]) * std::min({yi, std::fabs(s1.y[j]), 1.0});
        acc += std::fabs(s1.x[i] * s2.x[j]) * std::min({yi, std::fabs(s2.y[j]), 1.0});
    }
    return acc;
}

}  // namespace locdep
