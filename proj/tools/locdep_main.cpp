#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "locdep/errors.hpp"
#include "locdep/experiment.hpp"
#include "locdep/verify.hpp"

namespace {

using locdep::ExperimentConfig;
using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw locdep::usage_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replicates;
    std::optional<int> threads;
    std::string out_dir;
};

ExperimentConfig load_config(const std::string& path, const Overrides& ov) {
    ExperimentConfig c = ExperimentConfig::from_json(load_json_file(path));
    if (ov.seed) c.seed = *ov.seed;
    if (ov.replicates) {
        if (*ov.replicates < 1) throw locdep::usage_error("--replicates: must be >= 1");
        c.replicates = *ov.replicates;
    }
    if (ov.threads) {
        if (*ov.threads < 1) throw locdep::usage_error("--threads: must be >= 1");
        c.threads = *ov.threads;
    }
    if (!ov.out_dir.empty()) c.out_dir = ov.out_dir;
    return c;
}

void emit_report(const json& report, const std::string& out_dir, const char* filename) {
    std::cout << report.dump(2) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const auto path = std::filesystem::path(out_dir) / filename;
        std::ofstream out(path);
        if (!out) throw locdep::usage_error("cannot write " + path.string());
        out << report.dump(2) << "\n";
        for (const auto& csv : locdep::write_profile_csv(report, out_dir))
            std::cerr << "wrote " << csv << "\n";
        std::cerr << "wrote " << path.string() << "\n";
    }
}

int emit_suite(const std::vector<locdep::SuiteResult>& results) {
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]\n";
        if (!r.pass) ++failures;
    }
    return failures;
}

void add_overrides(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Override the config master seed");
    cmd->add_option("--replicates", ov.replicates, "Override the replicate count");
    cmd->add_option("--threads", ov.threads, "Worker threads (never changes results)");
    cmd->add_option("--out", ov.out_dir, "Directory for the JSON report and CSV profiles");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berry-Esseen bounds and empirical normal-approximation checks for locally "
                 "dependent random fields"};
    app.require_subcommand(1);

    std::string config_path, report_path;
    Overrides ov;

    auto* cmd_bounds = app.add_subcommand(
        "bounds", "Assemble theorem bounds, measure the Kolmogorov distance, judge dominance");
    cmd_bounds->add_option("--config", config_path, "Experiment config JSON")->required();
    add_overrides(cmd_bounds, ov);

    auto* cmd_distance =
        app.add_subcommand("distance", "Measure distances only (KS and optional z-profile)");
    cmd_distance->add_option("--config", config_path, "Experiment config JSON")->required();
    add_overrides(cmd_distance, ov);

    auto* cmd_rate = app.add_subcommand("rate", "Run the size ladder and fit the log-log rate");
    cmd_rate->add_option("--config", config_path, "Experiment config JSON with a sizes ladder")
        ->required();
    add_overrides(cmd_rate, ov);

    std::string suite = "all";
    int suite_models = 50;
    std::uint64_t suite_seed = 20240901;
    auto* cmd_verify = app.add_subcommand(
        "verify", "Run the identity, moment-inequality, concentration and Stein property suites");
    cmd_verify->add_option("--suite", suite,
                           "identity | lemma31 | lemma32 | prop31 | stein | all");
    cmd_verify->add_option("--models", suite_models, "Randomized models per suite");
    cmd_verify->add_option("--seed", suite_seed, "Suite master seed");

    auto* cmd_report = app.add_subcommand("report", "Pretty-print a report JSON");
    cmd_report->add_option("--in", report_path, "Report file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_bounds->parsed()) {
            ExperimentConfig c = load_config(config_path, ov);
            json report = locdep::run_experiment(c);
            emit_report(report, c.out_dir, "report.json");
            return locdep::report_all_pass(report) ? 0 : 1;
        }
        if (cmd_distance->parsed()) {
            ExperimentConfig c = load_config(config_path, ov);
            c.theorems.clear();
            json report = locdep::run_experiment(c);
            emit_report(report, c.out_dir, "distance.json");
            return 0;
        }
        if (cmd_rate->parsed()) {
            ExperimentConfig c = load_config(config_path, ov);
            json report = locdep::run_rate_study(c);
            emit_report(report, c.out_dir, "rate.json");
            return 0;
        }
        if (cmd_verify->parsed()) {
            int failures = 0;
            if (suite == "identity" || suite == "all")
                failures += emit_suite(locdep::run_identity_suite());
            if (suite == "lemma31" || suite == "all")
                failures += emit_suite(locdep::run_lemma31_suite(suite_models, suite_seed));
            if (suite == "lemma32" || suite == "all")
                failures += emit_suite(locdep::run_lemma32_suite(suite_models, suite_seed + 1));
            if (suite == "prop31" || suite == "all")
                failures += emit_suite(locdep::run_prop31_suite(
                    std::min(suite_models, 10), 10, suite_seed + 2));
            if (suite == "stein" || suite == "all")
                failures += emit_suite(locdep::run_stein_suite());
            return failures == 0 ? 0 : 1;
        }
        if (cmd_report->parsed()) {
            json report = load_json_file(report_path);
            std::printf("schema %d, version %s\n", report.value("schema", 0),
                        report.value("version", "?").c_str());
            if (report.contains("model_hash"))
                std::printf("model %s\n", report.at("model_hash").get<std::string>().c_str());
            if (report.contains("distance")) {
                const auto& d = report.at("distance");
                std::printf("distance: ks=%.6g dkw=%.6g mode=%s replicates=%llu\n",
                            d.at("ks").get<double>(), d.at("dkw_radius").get<double>(),
                            d.at("mode").get<std::string>().c_str(),
                            static_cast<unsigned long long>(d.at("replicates").get<std::uint64_t>()));
            }
            if (report.contains("bounds")) {
                for (const auto& b : report.at("bounds")) {
                    std::printf("bound %-10s value=%-12.6g se=%-10.4g %s\n",
                                b.at("theorem").get<std::string>().c_str(),
                                b.at("value").get<double>(), b.at("se").get<double>(),
                                b.at("c_free").get<bool>() ? "(C-free rate)" : "");
                }
            }
            if (report.contains("verdicts")) {
                for (const auto& v : report.at("verdicts")) {
                    std::printf("verdict %-8s %s margin=%.6g\n",
                                v.at("theorem").get<std::string>().c_str(),
                                v.at("pass").get<bool>() ? "PASS" : "FAIL",
                                v.at("margin").get<double>());
                }
            }
            if (report.contains("fit")) {
                const auto& f = report.at("fit");
                std::printf("rate fit: slope=%.4f +- %.4f (95%% ci [%.4f, %.4f])\n",
                            f.at("slope").get<double>(), f.at("slope_se").get<double>(),
                            f.at("ci")[0].get<double>(), f.at("ci")[1].get<double>());
            }
            if (report.contains("table")) {
                for (const auto& row : report.at("table"))
                    std::printf("  n=%-8lld ks=%.6g dkw=%.6g\n",
                                static_cast<long long>(row.at("n").get<std::int64_t>()),
                                row.at("ks").get<double>(), row.at("dkw_radius").get<double>());
            }
            return 0;
        }
    } catch (const locdep::usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
