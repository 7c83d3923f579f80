#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfslab/bfslab.hpp"

namespace {

int load_config(const std::string& path, const std::string& output_override,
                bfslab::SuiteConfig& cfg) {
    std::ifstream is(path);
    if (!is) {
        std::cerr << "error: cannot open config file '" << path << "'\n";
        return 2;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }
    try {
        cfg = bfslab::parse_config(j);
    } catch (const bfslab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!output_override.empty()) {
        cfg.output = output_override;
    } else if (const char* env = std::getenv("BFSLAB_OUTPUT")) {
        cfg.output = env;
    }
    return 0;
}

void print_summary(const bfslab::ExperimentReport& rep) {
    std::cout << "suite " << rep.suite << ": " << rep.aggregate.count << " cases, "
              << rep.aggregate.violations << " violations, empirical sup "
              << bfslab::fmt_real(rep.aggregate.empirical_sup);
    if (rep.ceiling) std::cout << " (ceiling " << bfslab::fmt_real(*rep.ceiling) << ")";
    if (rep.aggregate.refinement_delta)
        std::cout << ", refinement delta " << bfslab::fmt_real(*rep.aggregate.refinement_delta);
    std::cout << " -> " << (rep.passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& n : rep.notes) std::cout << "  note: " << n << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bfslab: inequality experiments for function-space norms, "
                 "Littlewood-Paley analysis, and heat maximal regularity"};
    app.require_subcommand(1);

    std::string config_path, output_override;

    auto* run = app.add_subcommand("run", "run a suite from a JSON config");
    run->add_option("--config", config_path, "path to the JSON config")->required();
    run->add_option("--output", output_override, "override the output path prefix");

    auto* refine = app.add_subcommand(
        "refine", "run a suite at (N, cells) and (2N, 2 cells) and compare aggregates");
    refine->add_option("--config", config_path, "path to the JSON config")->required();
    refine->add_option("--output", output_override, "override the output path prefix");

    auto* list = app.add_subcommand("list-suites", "list the available suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list->parsed()) {
        for (const auto& name : bfslab::suite_names()) std::cout << name << "\n";
        return 0;
    }

    bfslab::SuiteConfig cfg;
    if (int rc = load_config(config_path, output_override, cfg); rc != 0) return rc;

    try {
        if (run->parsed()) {
            auto rep = bfslab::run_suite(cfg);
            bfslab::persist_report(cfg.output, rep, cfg);
            print_summary(rep);
            return rep.passed() ? 0 : 1;
        }
        auto outcome = bfslab::refine_suite(cfg);
        bfslab::persist_report(cfg.output, outcome.combined, cfg);
        print_summary(outcome.combined);
        std::cout << "refine: base sup " << bfslab::fmt_real(outcome.base_sup) << ", refined sup "
                  << bfslab::fmt_real(outcome.refined_sup) << ", delta "
                  << bfslab::fmt_real(outcome.delta) << " -> "
                  << (outcome.passed ? "PASS" : "FAIL") << "\n";
        return outcome.passed ? 0 : 1;
    } catch (const bfslab::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
