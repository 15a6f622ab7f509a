#include "locdep/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "locdep/errors.hpp"

namespace locdep {

using nlohmann::json;

std::string base_name(BaseDist base) {
    switch (base) {
        case BaseDist::Rademacher: return "rademacher";
        case BaseDist::Uniform: return "uniform";
        case BaseDist::ShiftedExponential: return "shifted-exponential";
    }
    return "?";
}

BaseDist base_from_name(const std::string& name) {
    if (name == "rademacher") return BaseDist::Rademacher;
    if (name == "uniform") return BaseDist::Uniform;
    if (name == "shifted-exponential" || name == "shifted_exponential")
        return BaseDist::ShiftedExponential;
    throw usage_error("unknown base distribution: " + name);
}

namespace {

constexpr double kSqrt12 = 3.4641016151377545871;

// Centered, unit-variance primitive draw.
inline double draw_base(Rng& rng, BaseDist base) {
    switch (base) {
        case BaseDist::Rademacher: return rng.next_sign();
        case BaseDist::Uniform: return (rng.next_unit() - 0.5) * kSqrt12;
        case BaseDist::ShiftedExponential: return -std::log1p(-rng.next_unit()) - 1.0;
    }
    return 0.0;
}

}  // namespace

double FieldModel::sample_w(Rng& rng) const {
    std::vector<double> buf(static_cast<std::size_t>(size()));
    sample_into(rng, buf);
    double w = 0.0;
    for (double v : buf) w += v;
    return w;
}

Realization FieldModel::sample(std::uint64_t seed) const {
    Realization r;
    r.seed = seed;
    r.values.resize(static_cast<std::size_t>(size()));
    Rng rng(seed, streams::kSample, 0);
    sample_into(rng, r.values);
    for (double v : r.values)
        if (!std::isfinite(v)) throw degeneracy_error("non-finite field value sampled");
    return r;
}

double FieldModel::covariance(std::int32_t, std::int32_t) const {
    throw capability_error("model has no covariance oracle");
}

// ---------------------------------------------------------------------------
// iid field
// ---------------------------------------------------------------------------

namespace {

class IidEnumerator final : public Enumerator {
public:
    IidEnumerator(std::int64_t n, double scale) : n_(n), scale_(scale) {}
    std::uint64_t size() const override { return 1ULL << n_; }
    double outcome(std::uint64_t k, std::span<double> out) const override {
        for (std::int64_t i = 0; i < n_; ++i)
            out[i] = ((k >> i) & 1U) ? scale_ : -scale_;
        return std::ldexp(1.0, -static_cast<int>(n_));
    }

private:
    std::int64_t n_;
    double scale_;
};

class IidField final : public FieldModel {
public:
    IidField(std::int64_t n, BaseDist base) : base_(base) {
        if (n < 1) throw structural_error("iid field needs n >= 1");
        system_ = NeighborhoodSystem::lattice_m_dependent({n}, 0);
        standardization_ = {true, 1.0 / std::sqrt(static_cast<double>(n)), 0.0};
        info_.kind = "iid";
        info_.n = n;
        info_.base = base;
        info_.shape = std::vector<std::int64_t>{n};
        info_.m = 0;
        info_.raw_mean = 0.0;
        info_.raw_variance = static_cast<double>(n);
        if (base == BaseDist::Rademacher && n <= 20)
            enumerator_ = std::make_unique<IidEnumerator>(n, standardization_.scale);
    }

    void sample_into(Rng& rng, std::span<double> out) const override {
        const double s = standardization_.scale;
        for (auto& v : out) v = s * draw_base(rng, base_);
    }

    double sample_w(Rng& rng) const override {
        double acc = 0.0;
        for (std::int64_t i = 0; i < info_.n; ++i) acc += draw_base(rng, base_);
        return acc * standardization_.scale;
    }

    const Enumerator* enumerator() const override { return enumerator_.get(); }
    bool has_covariance() const override { return true; }
    double covariance(std::int32_t i, std::int32_t j) const override {
        return i == j ? 1.0 / static_cast<double>(info_.n) : 0.0;
    }
    std::vector<std::int64_t> noise_footprint(std::int32_t i) const override { return {i}; }

    std::string spec_json() const override {
        json j{{"kind", "iid"}, {"n", info_.n}, {"base", base_name(base_)}};
        return j.dump();
    }

private:
    BaseDist base_;
    std::unique_ptr<IidEnumerator> enumerator_;
};

}  // namespace

ModelPtr make_iid_field(std::int64_t n, BaseDist base) {
    return std::make_shared<IidField>(n, base);
}

// ---------------------------------------------------------------------------
// moving-sum m-dependent field
// ---------------------------------------------------------------------------

namespace {

// X_i sums primitive noise over the one-sided window (i + [0,m]^d) & J, so
// X_i and X_j are independent exactly when the sup-distance exceeds m and the
// radius-m neighborhood system is valid for the field.
class MovingSumField final : public FieldModel {
public:
    MovingSumField(const std::vector<std::int64_t>& shape, std::int64_t m, BaseDist base)
        : base_(base) {
        system_ = NeighborhoodSystem::lattice_m_dependent(shape, m);
        const std::int64_t n = system_.size();
        const std::size_t d = shape.size();

        windows_.resize(n);
        std::vector<std::int64_t> coord(d, 0);
        for (std::int64_t i = 0; i < n; ++i) {
            std::vector<std::int64_t> lo = coord, hi(d), cur = coord;
            for (std::size_t k = 0; k < d; ++k) hi[k] = std::min(shape[k] - 1, coord[k] + m);
            IndexSet win;
            for (;;) {
                std::int64_t flat = 0;
                for (std::size_t k = 0; k < d; ++k) flat = flat * shape[k] + cur[k];
                win.push_back(static_cast<std::int32_t>(flat));
                std::size_t k = d;
                bool done = false;
                while (k-- > 0) {
                    if (++cur[k] <= hi[k]) break;
                    cur[k] = lo[k];
                    if (k == 0) done = true;
                }
                if (done) break;
            }
            std::sort(win.begin(), win.end());
            windows_[i] = std::move(win);
            for (std::size_t k = d; k-- > 0;) {
                if (++coord[k] < shape[k]) break;
                coord[k] = 0;
            }
        }

        coverage_.assign(n, 0.0);
        for (const auto& win : windows_)
            for (std::int32_t k : win) coverage_[k] += 1.0;
        double var_raw = 0.0;
        for (double c : coverage_) var_raw += c * c;
        standardization_ = {true, 1.0 / std::sqrt(var_raw), 0.0};

        info_.kind = "moving_sum";
        info_.n = n;
        info_.base = base;
        info_.shape = shape;
        info_.m = m;
        info_.raw_mean = 0.0;
        info_.raw_variance = var_raw;
        if (base == BaseDist::Rademacher && n <= 20)
            enumerator_ = std::make_unique<Enum>(this);
    }

    void sample_into(Rng& rng, std::span<double> out) const override {
        const std::int64_t n = info_.n;
        static thread_local std::vector<double> noise;
        noise.resize(n);
        for (std::int64_t k = 0; k < n; ++k) noise[k] = draw_base(rng, base_);
        const double s = standardization_.scale;
        for (std::int64_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::int32_t k : windows_[i]) acc += noise[k];
            out[i] = s * acc;
        }
    }

    double sample_w(Rng& rng) const override {
        double acc = 0.0;
        for (std::int64_t k = 0; k < info_.n; ++k)
            acc += coverage_[k] * draw_base(rng, base_);
        return acc * standardization_.scale;
    }

    const Enumerator* enumerator() const override { return enumerator_.get(); }

    bool has_covariance() const override { return true; }
    double covariance(std::int32_t i, std::int32_t j) const override {
        const auto& wi = windows_[i];
        const auto& wj = windows_[j];
        std::size_t a = 0, b = 0, overlap = 0;
        while (a < wi.size() && b < wj.size()) {
            if (wi[a] < wj[b]) ++a;
            else if (wj[b] < wi[a]) ++b;
            else { ++overlap; ++a; ++b; }
        }
        const double s = standardization_.scale;
        return s * s * static_cast<double>(overlap);
    }

    std::vector<std::int64_t> noise_footprint(std::int32_t i) const override {
        return std::vector<std::int64_t>(windows_[i].begin(), windows_[i].end());
    }

    std::string spec_json() const override {
        json j{{"kind", "moving_sum"}, {"shape", *info_.shape}, {"m", *info_.m},
               {"base", base_name(base_)}};
        return j.dump();
    }

private:
    class Enum final : public Enumerator {
    public:
        explicit Enum(const MovingSumField* f) : f_(f) {}
        std::uint64_t size() const override { return 1ULL << f_->info_.n; }
        double outcome(std::uint64_t k, std::span<double> out) const override {
            const std::int64_t n = f_->info_.n;
            const double s = f_->standardization_.scale;
            for (std::int64_t i = 0; i < n; ++i) {
                std::int64_t acc = 0;
                for (std::int32_t e : f_->windows_[i]) acc += ((k >> e) & 1U) ? 1 : -1;
                out[i] = s * static_cast<double>(acc);
            }
            return std::ldexp(1.0, -static_cast<int>(n));
        }

    private:
        const MovingSumField* f_;
    };

    BaseDist base_;
    std::vector<IndexSet> windows_;
    std::vector<double> coverage_;
    std::unique_ptr<Enum> enumerator_;
};

}  // namespace

ModelPtr make_moving_sum_field(const std::vector<std::int64_t>& shape, std::int64_t m,
                               BaseDist base) {
    return std::make_shared<MovingSumField>(shape, m, base);
}

// ---------------------------------------------------------------------------
// local maxima on a regular graph
// ---------------------------------------------------------------------------

namespace {

class LocalMaximaField final : public FieldModel {
public:
    LocalMaximaField(std::int64_t nv,
                     const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
        if (nv < 1) throw structural_error("graph needs at least one vertex");
        adj_.assign(nv, {});
        for (auto [u, v] : edges) {
            if (u < 0 || u >= nv || v < 0 || v >= nv)
                throw structural_error("edge endpoint out of range");
            if (u == v) throw structural_error("self-loop in graph");
            adj_[u].push_back(static_cast<std::int32_t>(v));
            adj_[v].push_back(static_cast<std::int32_t>(u));
        }
        for (auto& nb : adj_) {
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        }
        const std::int64_t degree = static_cast<std::int64_t>(adj_[0].size());
        for (const auto& nb : adj_)
            if (static_cast<std::int64_t>(nb.size()) != degree)
                throw structural_error("local maxima field needs a regular graph");
        if (degree < 1) throw structural_error("local maxima field needs degree >= 1");

        // Distance-2 pairs and shared-neighbor counts.
        dist2_.assign(nv, {});
        double sigma2 = 0.0;
        const double dp1 = static_cast<double>(degree + 1);
        std::vector<std::int32_t> shared(nv, 0);
        for (std::int64_t i = 0; i < nv; ++i) {
            std::vector<std::int32_t> cand;
            for (std::int32_t u : adj_[i])
                for (std::int32_t v : adj_[u]) {
                    if (v == i) continue;
                    if (std::binary_search(adj_[i].begin(), adj_[i].end(), v)) continue;
                    if (!shared[v]) cand.push_back(v);
                    ++shared[v];
                }
            std::sort(cand.begin(), cand.end());
            for (std::int32_t j : cand) {
                const double s = static_cast<double>(shared[j]);
                dist2_[i].emplace_back(j, shared[j]);
                sigma2 += s / ((2.0 * degree + 2.0 - s) * dp1 * dp1);
                shared[j] = 0;
            }
        }
        if (!(sigma2 > 0.0))
            throw degeneracy_error("local maxima count is degenerate: Var(W) = 0");

        mean_raw_ = static_cast<double>(nv) / dp1;
        var_raw_ = sigma2;
        mu_ = 1.0 / dp1;
        standardization_ = {true, 1.0 / std::sqrt(sigma2), 0.0};

        // X_i reads the ranks on {i} u N_i, so the dependence radius is 2 in
        // the rank graph; B and C come from the union closure.
        std::vector<std::pair<std::int64_t, std::int64_t>> d2edges;
        for (std::int64_t i = 0; i < nv; ++i) {
            for (std::int32_t u : adj_[i])
                if (u > i) d2edges.emplace_back(i, u);
            for (auto [j, s] : dist2_[i])
                if (j > i) d2edges.emplace_back(i, j);
        }
        system_ = NeighborhoodSystem::from_adjacency(nv, d2edges)
                      .closure_extend()
                      .truncated(Level::LD3);

        info_.kind = "local_maxima";
        info_.n = nv;
        info_.graph_degree = degree;
        info_.raw_mean = mean_raw_;
        info_.raw_variance = var_raw_;

        double lognf = 0.0;
        for (std::int64_t k = 2; k <= nv; ++k) lognf += std::log2(static_cast<double>(k));
        if (lognf <= 20.0) enumerator_ = std::make_unique<Enum>(this);
    }

    void sample_into(Rng& rng, std::span<double> out) const override {
        const std::int64_t nv = info_.n;
        static thread_local std::vector<double> ranks;
        ranks.resize(nv);
        for (std::int64_t v = 0; v < nv; ++v) ranks[v] = rng.next_unit();
        fill_indicators(ranks, out);
    }

    const Enumerator* enumerator() const override { return enumerator_.get(); }

    bool has_covariance() const override { return true; }
    double covariance(std::int32_t i, std::int32_t j) const override {
        const double s2 = standardization_.scale * standardization_.scale;
        if (i == j) return mu_ * (1.0 - mu_) * s2;
        if (std::binary_search(adj_[i].begin(), adj_[i].end(), j)) return -mu_ * mu_ * s2;
        for (auto [v, s] : dist2_[i]) {
            if (v == j) {
                const double d = static_cast<double>(*info_.graph_degree);
                const double dp1 = d + 1.0;
                return s2 * static_cast<double>(s) / ((2.0 * d + 2.0 - s) * dp1 * dp1);
            }
        }
        return 0.0;
    }

    std::vector<std::int64_t> noise_footprint(std::int32_t i) const override {
        std::vector<std::int64_t> fp{i};
        for (std::int32_t u : adj_[i]) fp.push_back(u);
        std::sort(fp.begin(), fp.end());
        return fp;
    }

    std::string spec_json() const override {
        json edges = json::array();
        for (std::int64_t i = 0; i < info_.n; ++i)
            for (std::int32_t u : adj_[i])
                if (u > i) edges.push_back(json::array({i, u}));
        json j{{"kind", "local_maxima"}, {"vertices", info_.n}, {"edges", edges}};
        return j.dump();
    }

private:
    // Ties cannot occur with continuous draws; permutation ranks from the
    // enumerator are distinct by construction.
    void fill_indicators(const std::vector<double>& ranks, std::span<double> out) const {
        const std::int64_t nv = info_.n;
        const double s = standardization_.scale;
        for (std::int64_t i = 0; i < nv; ++i) {
            bool is_max = true;
            for (std::int32_t u : adj_[i]) {
                if (ranks[u] > ranks[i] || (ranks[u] == ranks[i] && u > i)) {
                    is_max = false;
                    break;
                }
            }
            out[i] = s * ((is_max ? 1.0 : 0.0) - mu_);
        }
    }

    class Enum final : public Enumerator {
    public:
        explicit Enum(const LocalMaximaField* f) : f_(f) {
            nf_ = 1;
            for (std::int64_t k = 2; k <= f->info_.n; ++k) nf_ *= static_cast<std::uint64_t>(k);
        }
        std::uint64_t size() const override { return nf_; }
        double outcome(std::uint64_t k, std::span<double> out) const override {
            const std::int64_t nv = f_->info_.n;
            // Factoradic unranking into a permutation of 0..nv-1.
            std::vector<std::int32_t> pool(nv), perm(nv);
            std::iota(pool.begin(), pool.end(), 0);
            std::uint64_t rest = k;
            for (std::int64_t pos = 0; pos < nv; ++pos) {
                const std::uint64_t radix = static_cast<std::uint64_t>(nv - pos);
                const std::uint64_t pick = rest % radix;
                rest /= radix;
                perm[pos] = pool[pick];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            std::vector<double> ranks(nv);
            for (std::int64_t pos = 0; pos < nv; ++pos)
                ranks[perm[pos]] = static_cast<double>(pos);
            f_->fill_indicators(ranks, out);
            return 1.0 / static_cast<double>(nf_);
        }

    private:
        const LocalMaximaField* f_;
        std::uint64_t nf_;
    };

    std::vector<IndexSet> adj_;
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> dist2_;  // (j, s(i,j))
    double mu_ = 0.0, mean_raw_ = 0.0, var_raw_ = 0.0;
    std::unique_ptr<Enum> enumerator_;
};

}  // namespace

ModelPtr make_local_maxima_field(std::int64_t n_vertices,
                                 const std::vector<std::pair<std::int64_t, std::int64_t>>& edges) {
    return std::make_shared<LocalMaximaField>(n_vertices, edges);
}

ModelPtr make_local_maxima_cycle(std::int64_t n_vertices) {
    if (n_vertices < 3) throw structural_error("cycle needs at least 3 vertices");
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    for (std::int64_t i = 0; i < n_vertices; ++i) edges.emplace_back(i, (i + 1) % n_vertices);
    return make_local_maxima_field(n_vertices, edges);
}

// ---------------------------------------------------------------------------
// Erickson one-dependent sequence
// ---------------------------------------------------------------------------

std::vector<std::int64_t> erickson_bsq_sequence(std::int64_t n) {
    if (n < 1) throw structural_error("erickson sequence needs n >= 1");
    std::vector<std::int64_t> bsq(n + 1, 0);
    bsq[1] = 1;
    if (n >= 2) bsq[2] = 2;
    for (std::int64_t k = 2; k < n; ++k) {
        // B_k^2 > sqrt(k) compared in exact integer arithmetic.
        if (bsq[k] * bsq[k] > k) bsq[k + 1] = bsq[k - 1];
        else bsq[k + 1] = bsq[k] + 1;
    }
    return bsq;
}

namespace {

class EricksonField final : public FieldModel {
public:
    explicit EricksonField(std::int64_t n) {
        if (n < 2) throw structural_error("erickson field needs n >= 2");
        auto bsq = erickson_bsq_sequence(n);
        bn_sq_ = bsq[n];

        slot_.resize(n);
        sign_.resize(n);
        slot_[0] = 0;
        sign_[0] = 1;
        std::int32_t slots = 1;
        if (n >= 2) {
            slot_[1] = slots++;
            sign_[1] = 1;
        }
        bool prev_negate = false;
        for (std::int64_t k = 2; k < n; ++k) {
            if (bsq[k] * bsq[k] > k) {
                // X_{k+1} = -X_k; a negation always follows a fresh step, so
                // the sequence stays one-dependent.
                if (prev_negate)
                    throw degeneracy_error("erickson pattern produced consecutive negations");
                slot_[k] = slot_[k - 1];
                sign_[k] = -sign_[k - 1];
                prev_negate = true;
            } else {
                slot_[k] = slots++;
                sign_[k] = 1;
                prev_negate = false;
            }
        }
        n_slots_ = slots;

        std::vector<std::int32_t> coef(slots, 0);
        for (std::int64_t i = 0; i < n; ++i) coef[slot_[i]] += sign_[i];
        std::int64_t var = 0;
        for (std::int64_t s = 0; s < slots; ++s) {
            var += static_cast<std::int64_t>(coef[s]) * coef[s];
            if (coef[s] != 0) alive_.push_back(static_cast<std::int32_t>(s));
        }
        if (var != bn_sq_)
            throw degeneracy_error("erickson variance bookkeeping mismatch");

        system_ = NeighborhoodSystem::lattice_m_dependent({n}, 1);
        standardization_ = {true, 1.0 / std::sqrt(static_cast<double>(bn_sq_)), 0.0};
        info_.kind = "erickson";
        info_.n = n;
        info_.base = BaseDist::Rademacher;
        info_.raw_mean = 0.0;
        info_.raw_variance = static_cast<double>(bn_sq_);
        info_.erickson_bsq = bn_sq_;
        if (n_slots_ <= 20) enumerator_ = std::make_unique<Enum>(this);
    }

    void sample_into(Rng& rng, std::span<double> out) const override {
        static thread_local std::vector<double> noise;
        noise.resize(n_slots_);
        for (std::int32_t s = 0; s < n_slots_; ++s) noise[s] = rng.next_sign();
        const double s = standardization_.scale;
        for (std::int64_t i = 0; i < info_.n; ++i)
            out[i] = s * sign_[i] * noise[slot_[i]];
    }

    // Only the slots whose negation falls beyond n survive in S_n.
    double sample_w(Rng& rng) const override {
        double acc = 0.0;
        for (std::size_t k = 0; k < alive_.size(); ++k) acc += rng.next_sign();
        return acc * standardization_.scale;
    }

    const Enumerator* enumerator() const override { return enumerator_.get(); }

    bool has_covariance() const override { return true; }
    double covariance(std::int32_t i, std::int32_t j) const override {
        if (slot_[i] != slot_[j]) return 0.0;
        const double s = standardization_.scale;
        return s * s * sign_[i] * sign_[j];
    }

    std::vector<std::int64_t> noise_footprint(std::int32_t i) const override {
        return {slot_[i]};
    }

    std::string spec_json() const override {
        json j{{"kind", "erickson"}, {"n", info_.n}};
        return j.dump();
    }

private:
    class Enum final : public Enumerator {
    public:
        explicit Enum(const EricksonField* f) : f_(f) {}
        std::uint64_t size() const override { return 1ULL << f_->n_slots_; }
        double outcome(std::uint64_t k, std::span<double> out) const override {
            const double s = f_->standardization_.scale;
            for (std::int64_t i = 0; i < f_->info_.n; ++i) {
                const double eps = ((k >> f_->slot_[i]) & 1U) ? 1.0 : -1.0;
                out[i] = s * f_->sign_[i] * eps;
            }
            return std::ldexp(1.0, -static_cast<int>(f_->n_slots_));
        }

    private:
        const EricksonField* f_;
    };

    std::int64_t bn_sq_ = 0;
    std::int32_t n_slots_ = 0;
    std::vector<std::int32_t> slot_;
    std::vector<std::int8_t> sign_;
    std::vector<std::int32_t> alive_;
    std::unique_ptr<Enum> enumerator_;
};

}  // namespace

ModelPtr make_erickson_field(std::int64_t n) { return std::make_shared<EricksonField>(n); }

// ---------------------------------------------------------------------------
// JSON spec, enumeration helpers
// ---------------------------------------------------------------------------

ModelPtr model_from_json(const std::string& text) {
    json j = json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "iid") {
        return make_iid_field(j.at("n").get<std::int64_t>(),
                              base_from_name(j.at("base").get<std::string>()));
    }
    if (kind == "moving_sum") {
        return make_moving_sum_field(j.at("shape").get<std::vector<std::int64_t>>(),
                                     j.at("m").get<std::int64_t>(),
                                     base_from_name(j.at("base").get<std::string>()));
    }
    if (kind == "local_maxima") {
        if (j.contains("cycle")) return make_local_maxima_cycle(j.at("cycle").get<std::int64_t>());
        if (j.contains("edges_file")) {
            std::ifstream in(j.at("edges_file").get<std::string>());
            if (!in) throw usage_error("cannot open edges_file");
            auto [labels, edges] = NeighborhoodSystem::parse_edge_list(in);
            std::vector<std::pair<std::int64_t, std::int64_t>> es;
            auto id = [&](const std::string& s) -> std::int64_t {
                for (std::size_t i = 0; i < labels.size(); ++i)
                    if (labels[i] == s) return static_cast<std::int64_t>(i);
                throw structural_error("unknown vertex: " + s);
            };
            for (auto& [u, v] : edges) es.emplace_back(id(u), id(v));
            return make_local_maxima_field(static_cast<std::int64_t>(labels.size()), es);
        }
        std::vector<std::pair<std::int64_t, std::int64_t>> es;
        for (const auto& e : j.at("edges"))
            es.emplace_back(e.at(0).get<std::int64_t>(), e.at(1).get<std::int64_t>());
        return make_local_maxima_field(j.at("vertices").get<std::int64_t>(), es);
    }
    if (kind == "erickson") return make_erickson_field(j.at("n").get<std::int64_t>());
    throw usage_error("unknown model kind: " + kind);
}

std::vector<std::pair<double, double>> exact_enumerate(const FieldModel& model) {
    const Enumerator* en = model.enumerator();
    if (!en) throw capability_error("model has no exact enumerator");
    const std::uint64_t m = en->size();
    std::vector<std::pair<double, double>> raw;
    raw.reserve(m);
    std::vector<double> buf(static_cast<std::size_t>(model.size()));
    for (std::uint64_t k = 0; k < m; ++k) {
        const double p = en->outcome(k, buf);
        double w = 0.0;
        for (double v : buf) w += v;
        raw.emplace_back(w, p);
    }
    std::sort(raw.begin(), raw.end());
    // Atoms of the discrete models are separated by at least the lattice
    // span, far above accumulated rounding; merge within 1e-9.
    std::vector<std::pair<double, double>> atoms;
    for (const auto& [w, p] : raw) {
        if (!atoms.empty() && w - atoms.back().first <= 1e-9) atoms.back().second += p;
        else atoms.emplace_back(w, p);
    }
    return atoms;
}

std::optional<std::pair<std::int32_t, std::int32_t>> structural_independence_violation(
    const FieldModel& model) {
    const auto& sys = model.system();
    const std::int64_t n = sys.size();
    std::map<std::int64_t, std::vector<std::int32_t>> owners;
    for (std::int32_t i = 0; i < n; ++i)
        for (std::int64_t e : model.noise_footprint(i)) owners[e].push_back(i);
    for (const auto& [e, own] : owners) {
        for (std::int32_t i : own) {
            const auto& a = sys.a(i);
            for (std::int32_t j : own) {
                if (!std::binary_search(a.begin(), a.end(), j))
                    return std::make_pair(i, j);
            }
        }
    }
    return std::nullopt;
}

}  // namespace locdep
