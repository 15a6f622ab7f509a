#include "locdep/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "locdep/empirics.hpp"
#include "locdep/errors.hpp"
#include "locdep/rng.hpp"

namespace locdep {

using nlohmann::json;

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (salt + 1));
    return splitmix64(s);
}

double default_p(const std::string& theorem) { return theorem == "2.2" ? 4.0 : 3.0; }

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json distance_to_json(const EmpiricalDistance& d) {
    json j{{"ks", d.ks},
           {"dkw_radius", d.dkw_radius},
           {"replicates", d.replicates},
           {"mode", d.mode},
           {"delta", d.delta}};
    if (!d.profile.empty()) {
        json prof = json::array();
        for (const auto& p : d.profile)
            prof.push_back({{"z", p.z}, {"abs_diff", p.abs_diff}, {"se", p.se}});
        j["profile"] = std::move(prof);
    }
    return j;
}

json bound_to_json(const BoundReport& b) {
    json j{{"theorem", b.theorem}, {"value", b.value}, {"se", b.se}, {"c_free", b.c_free}};
    if (b.z) j["z"] = *b.z;
    json ing = json::object();
    for (const auto& [k, v] : b.ingredients) ing[k] = v;
    j["ingredients"] = std::move(ing);
    return j;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (!j.is_object()) throw usage_error("config: must be a JSON object");
    if (j.contains("schema") && j.at("schema").get<int>() != kSchemaVersion)
        throw usage_error("config.schema: unsupported version");
    if (!j.contains("model")) throw usage_error("config.model: required");
    c.model = j.at("model");
    if (j.contains("system")) c.system = j.at("system");
    if (j.contains("theorems")) {
        for (const auto& t : j.at("theorems")) {
            const std::string id = t.get<std::string>();
            if (!theorem_id_valid(id)) throw usage_error("config.theorems: unknown id " + id);
            c.theorems.push_back(id);
        }
    }
    if (j.contains("replicates")) {
        const auto r = j.at("replicates").get<std::int64_t>();
        if (r < 1) throw usage_error("config.replicates: must be >= 1");
        c.replicates = static_cast<std::uint64_t>(r);
    }
    if (!j.contains("seed")) throw usage_error("config.seed: required (no wall-clock default)");
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("delta")) {
        c.delta = j.at("delta").get<double>();
        if (!(c.delta > 0.0 && c.delta < 1.0)) throw usage_error("config.delta: must be in (0,1)");
    }
    if (j.contains("p")) {
        c.p = j.at("p").get<double>();
        if (!(*c.p > 2.0 && *c.p <= 4.0)) throw usage_error("config.p: must be in (2, 4]");
    }
    if (j.contains("zgrid")) c.zgrid = j.at("zgrid").get<std::vector<double>>();
    if (j.contains("sizes")) {
        c.sizes = j.at("sizes").get<std::vector<std::int64_t>>();
        for (auto n : c.sizes)
            if (n < 1) throw usage_error("config.sizes: entries must be >= 1");
    }
    if (j.contains("threads")) {
        c.threads = j.at("threads").get<int>();
        if (c.threads < 1) throw usage_error("config.threads: must be >= 1");
    }
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    return c;
}

json ExperimentConfig::to_json() const {
    json j{{"schema", kSchemaVersion}, {"model", model},       {"system", system},
           {"theorems", theorems},     {"replicates", replicates}, {"seed", seed},
           {"delta", delta},           {"threads", threads}};
    if (p) j["p"] = *p;
    if (!zgrid.empty()) j["zgrid"] = zgrid;
    if (!sizes.empty()) j["sizes"] = sizes;
    if (!out_dir.empty()) j["out"] = out_dir;
    return j;
}

namespace {

struct ResolvedExperiment {
    ModelPtr model;
    std::optional<NeighborhoodSystem> explicit_system;
    const NeighborhoodSystem& system() const {
        return explicit_system ? *explicit_system : model->system();
    }
};

ResolvedExperiment resolve(const ExperimentConfig& config) {
    ResolvedExperiment r;
    r.model = model_from_json(config.model.dump());
    if (!(config.system.is_string() && config.system.get<std::string>() == "derive")) {
        r.explicit_system = NeighborhoodSystem::from_json_string(config.system.dump());
        auto violations = r.explicit_system->validate();
        if (!violations.empty())
            throw structural_error("config.system: invalid (" + violations.front().index + ": " +
                                   violations.front().message + ")");
        if (r.explicit_system->size() != r.model->size())
            throw structural_error("config.system: size does not match the model");
    }
    return r;
}

}  // namespace

json run_experiment(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ResolvedExperiment resolved = resolve(config);
    const ModelPtr& model = resolved.model;
    const NeighborhoodSystem* system = &resolved.system();

    EmpiricalDistance distance =
        config.zgrid.empty()
            ? kolmogorov_distance(*model, config.replicates, config.seed, config.delta,
                                  config.threads)
            : nonuniform_profile(*model, config.replicates, config.seed, config.zgrid,
                                 config.delta, config.threads);

    // Shared ingredient caches across the requested theorems.
    std::optional<RTerms> rterms;
    std::optional<SigmaLambda> sl;
    std::optional<KappaStats> kappa;
    std::map<double, MomentSummary> moments;

    auto get_rterms = [&]() -> const RTerms& {
        if (!rterms) {
            EstimateOptions opt;
            opt.replicates = config.replicates;
            opt.seed = config.seed;
            opt.threads = config.threads;
            rterms = estimate_r_terms(*model, *system, opt);
        }
        return *rterms;
    };
    auto get_kappa = [&]() -> const KappaStats& {
        if (!kappa) kappa = system->kappa_stats();
        return *kappa;
    };
    auto get_moments = [&](double p) -> const MomentSummary& {
        auto it = moments.find(p);
        if (it == moments.end()) {
            EstimateOptions opt;
            opt.replicates = config.replicates;
            opt.seed = config.seed;
            opt.threads = config.threads;
            it = moments.emplace(p, estimate_moments(*model, *system, p, opt)).first;
        }
        return it->second;
    };
    auto lattice_md = [&]() -> std::pair<std::int64_t, std::int64_t> {
        if (system->lattice()) {
            return {system->lattice()->m,
                    static_cast<std::int64_t>(system->lattice()->shape.size())};
        }
        throw capability_error("theorem 2.6 needs an m-dependent lattice system");
    };
    auto theta_x = [&](const MomentSummary& mom) {
        double best = -1.0;
        std::int32_t arg = 0;
        for (std::int64_t i = 0; i < mom.n; ++i)
            if (mom.exp_[i] > best) {
                best = mom.exp_[i];
                arg = static_cast<std::int32_t>(i);
            }
        const double theta = std::pow(best, 1.0 / mom.p);
        const double se = mom.exp_se.empty() || best <= 0.0
                              ? 0.0
                              : mom.exp_se[arg] * std::pow(best, 1.0 / mom.p - 1.0) / mom.p;
        return std::make_pair(theta, se);
    };

    std::vector<BoundReport> bounds;
    const std::vector<double> zs = config.zgrid.empty() ? std::vector<double>{0.0} : config.zgrid;
    for (const std::string& id : config.theorems) {
        const double p = config.p.value_or(default_p(id));
        if (id == "2.1") {
            bounds.push_back(theorem_21_bound(get_rterms()));
        } else if (id == "2.2") {
            bounds.push_back(theorem_22_bound(get_moments(p), get_kappa()));
        } else if (id == "2.3") {
            if (!sl) sl = sigma_lambda(*model, *system);
            bounds.push_back(theorem_23_bound(get_rterms(), *sl));
        } else if (id == "2.4") {
            bounds.push_back(theorem_24_bound(get_moments(p), get_kappa()));
        } else if (id == "2.5-rate") {
            for (double z : zs) bounds.push_back(theorem_25_rate(get_moments(p), get_kappa(), z));
        } else if (id == "2.6u") {
            auto [m, d] = lattice_md();
            bounds.push_back(theorem_26u_bound(get_moments(p), m, d));
        } else if (id == "2.6n-rate") {
            auto [m, d] = lattice_md();
            for (double z : zs) bounds.push_back(theorem_26n_rate(get_moments(p), m, d, z));
        } else if (id == "2.7u" || id == "2.7n-rate") {
            if (!model->info().graph_degree)
                throw capability_error("theorem 2.7 needs a graph model");
            auto [theta, theta_se] = theta_x(get_moments(p));
            const std::int64_t deg = *model->info().graph_degree;
            if (id == "2.7u") {
                bounds.push_back(theorem_27u_bound(theta, theta_se, p, deg, model->size()));
            } else {
                for (double z : zs)
                    bounds.push_back(theorem_27n_rate(theta, theta_se, p, deg, model->size(), z));
            }
        } else if (id == "2.8u" || id == "2.8n-rate") {
            const auto& info = model->info();
            if (info.kind != "local_maxima" || !info.graph_degree || !info.raw_variance)
                throw capability_error("theorem 2.8 needs a local-maxima model");
            const double sigma = std::sqrt(*info.raw_variance);
            if (id == "2.8u") {
                bounds.push_back(theorem_28u_rate(*info.graph_degree, model->size(), sigma));
            } else {
                for (double z : zs)
                    bounds.push_back(theorem_28n_rate(*info.graph_degree, model->size(), sigma, z));
            }
        } else {
            throw usage_error("config.theorems: unknown id " + id);
        }
    }

    json jbounds = json::array();
    json jverdicts = json::array();
    for (const auto& b : bounds) {
        jbounds.push_back(bound_to_json(b));
        if (!b.c_free) {
            const Verdict v = dominance_verdict(distance, b);
            jverdicts.push_back(
                {{"theorem", b.theorem}, {"pass", v.pass}, {"margin", v.margin}});
        }
    }

    const auto t1 = std::chrono::steady_clock::now();
    json report{{"schema", kSchemaVersion},
                {"version", kVersion},
                {"config", config.to_json()},
                {"model_hash", hash_hex(fnv1a64(model->spec_json()))},
                {"distance", distance_to_json(distance)},
                {"bounds", std::move(jbounds)},
                {"verdicts", std::move(jverdicts)},
                {"wall_time_s", std::chrono::duration<double>(t1 - t0).count()}};
    return report;
}

namespace {

json model_spec_with_size(const json& spec, std::int64_t n) {
    json out = spec;
    if (out.contains("n")) out["n"] = n;
    else if (out.contains("shape")) out["shape"] = json::array({n});
    else if (out.contains("cycle")) out["cycle"] = n;
    else throw usage_error("config.model: kind does not support a size ladder");
    return out;
}

}  // namespace

json run_rate_study(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.sizes.size() < 3)
        throw usage_error("config.sizes: rate study needs a ladder of >= 3 sizes");

    json table = json::array();
    std::vector<RatePoint> points;
    for (std::size_t k = 0; k < config.sizes.size(); ++k) {
        const std::int64_t n = config.sizes[k];
        auto spec = model_spec_with_size(config.model, n);
        ModelPtr model = model_from_json(spec.dump());
        const std::uint64_t size_seed = derive_seed(config.seed, k);
        EmpiricalDistance d = kolmogorov_distance(*model, config.replicates, size_seed,
                                                  config.delta, config.threads);
        table.push_back({{"n", n},
                         {"ks", d.ks},
                         {"dkw_radius", d.dkw_radius},
                         {"mode", d.mode},
                         {"replicates", d.replicates}});
        points.push_back({static_cast<double>(n), d.ks, 1.0});
    }
    const RateFit fit = rate_fit(points);

    const auto t1 = std::chrono::steady_clock::now();
    json report{{"schema", kSchemaVersion},
                {"version", kVersion},
                {"config", config.to_json()},
                {"model_hash", hash_hex(fnv1a64(config.model.dump()))},
                {"table", std::move(table)},
                {"fit",
                 {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"slope_se", fit.slope_se},
                  {"ci", {fit.slope_ci_lo, fit.slope_ci_hi}}}},
                {"wall_time_s", std::chrono::duration<double>(t1 - t0).count()}};
    return report;
}

bool report_all_pass(const json& report) {
    if (!report.contains("verdicts")) return true;
    for (const auto& v : report.at("verdicts"))
        if (!v.at("pass").get<bool>()) return false;
    return true;
}

std::vector<std::string> write_profile_csv(const json& report, const std::string& out_dir) {
    std::vector<std::string> written;
    if (!report.contains("distance") || !report.at("distance").contains("profile"))
        return written;
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / "profile.csv";
    std::ofstream out(path);
    if (!out) throw usage_error("cannot write " + path.string());
    out << "z,abs_diff,se\n";
    for (const auto& p : report.at("distance").at("profile")) {
        char line[128];
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.at("z").get<double>(),
                      p.at("abs_diff").get<double>(), p.at("se").get<double>());
        out << line;
    }
    written.push_back(path.string());
    return written;
}

}  // namespace locdep
