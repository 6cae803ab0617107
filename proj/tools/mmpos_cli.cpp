#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmpos/pipeline.hpp"

namespace {

mmpos::ScenarioConfig load_with_overrides(const std::string& path,
                                          const std::vector<std::string>& overrides) {
    mmpos::ScenarioConfig cfg = mmpos::load_scenario(path);
    for (const std::string& o : overrides) mmpos::apply_override(cfg, o);
    return cfg;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    if (out.empty()) throw mmpos::ConfigError("--values: no values given");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-point vehicular positioning simulator and estimator"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    long seed = -1;
    bool dump_signals = false;

    CLI::App* run = app.add_subcommand("run", "Run the full pipeline on a scenario");
    run->add_option("config", config_path, "Scenario JSON file")->required();
    run->add_option("--override", overrides, "name=value configuration override");
    run->add_option("--out", out_dir, "Directory for point clouds and report.json");
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_flag("--dump-signals", dump_signals, "Also write the raw phasor tensor");

    std::string sweep_param, sweep_values;
    std::size_t sweep_seeds = 20;
    CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep");
    sweep->add_option("config", config_path, "Scenario JSON file")->required();
    sweep->add_option("--param", sweep_param, "tv_distance, num_mirrors, or M")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated parameter values")->required();
    sweep->add_option("--seeds", sweep_seeds, "Seeds per value (default 20)");
    sweep->add_option("--override", overrides, "name=value configuration override");
    sweep->add_option("--out", out_dir, "Directory for the CSV output");

    CLI::App* resolve = app.add_subcommand("resolve", "Resolution and sampling report");
    resolve->add_option("config", config_path, "Scenario JSON file")->required();
    resolve->add_option("--override", overrides, "name=value configuration override");

    CLI11_PARSE(app, argc, argv);

    try {
        mmpos::ScenarioConfig cfg = load_with_overrides(config_path, overrides);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

        if (run->parsed()) {
            const mmpos::RunArtifacts art = mmpos::run_scenario(cfg);
            if (!out_dir.empty()) mmpos::write_artifacts(out_dir, art, dump_signals, cfg);
            std::cout << art.report.to_json();
        } else if (sweep->parsed()) {
            const mmpos::SweepResult res =
                mmpos::run_sweep(cfg, sweep_param, parse_values(sweep_values), sweep_seeds);
            std::ostringstream extra;
            if (!res.empirical_trace.empty()) {
                extra << "M,empirical_trace,analytic_trace\n";
                const std::vector<double> values = parse_values(sweep_values);
                extra.precision(9);
                for (std::size_t i = 0; i < res.empirical_trace.size(); ++i)
                    extra << values[i] << ',' << res.empirical_trace[i] << ','
                          << res.analytic_trace[i] << '\n';
            }
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                std::ofstream((std::filesystem::path(out_dir) / "sweep.csv").string()) << res.csv;
                if (!res.empirical_trace.empty())
                    std::ofstream((std::filesystem::path(out_dir) / "covariance.csv").string())
                        << extra.str();
            }
            std::cout << res.csv;
            std::cout << extra.str();
        } else if (resolve->parsed()) {
            std::cout << mmpos::resolve_report(cfg);
        }
    } catch (const mmpos::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
