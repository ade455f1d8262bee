#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "robest/checks.hpp"
#include "robest/config.hpp"
#include "robest/error.hpp"
#include "robest/report.hpp"
#include "robest/run.hpp"
#include "robest/scenarios.hpp"

namespace {

constexpr int kExitOk           = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical    = 3;

int run_command(const std::string& config_path, const std::optional<std::string>& out_dir,
                const std::optional<std::string>& mode, const std::optional<std::uint64_t>& seed,
                const std::optional<double>& dt) {
    std::ifstream is(config_path);
    if (!is) throw robest::PreconditionError("cannot read config file " + config_path);
    nlohmann::json doc = nlohmann::json::parse(is);
    // The seed drives random scenario generation during parsing.
    if (seed) doc["seed"] = *seed;

    robest::RunConfig cfg = robest::run_config_from_json(doc);
    if (out_dir) cfg.out_dir = *out_dir;
    if (mode) cfg.analysis.mode = robest::analysis_mode_from_string(*mode);
    if (dt) cfg.analysis.dt = *dt;

    const robest::RunSummary summary = robest::run(cfg);
    for (const auto& a : summary.analyses) {
        std::cout << a.name << ": N=" << robest::format_double(a.horizon) << " mu=" << robest::format_double(a.mu);
        for (const auto& [source, metric] : a.metrics)
            std::cout << " R_" << robest::to_string(source) << "=" << robest::format_double(metric.R);
        std::cout << '\n';
        for (const auto& w : a.warnings) std::cerr << "warning: " << a.name << ": " << w << '\n';
    }
    std::cout << "wrote " << summary.artifacts.size() << " files to " << cfg.out_dir.string() << '\n';
    return kExitOk;
}

int scenarios_command() {
    for (const auto& s : robest::paper_scenarios()) {
        std::cout << "preset:" << s.name << "  (" << s.truth.spec.size() << " parameter"
                  << (s.truth.spec.size() == 1 ? "" : "s") << ") " << s.description << '\n';
    }
    std::cout << "random:{n, delta, count, kind}  seeded random stable pairs (kind dynamics|initial_condition)\n";
    return kExitOk;
}

int check_command(std::size_t population) {
    robest::CheckOptions options;
    options.population = population;
    bool all_ok        = true;
    for (const auto& r : robest::run_property_suites(options)) {
        const char* status = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
        std::cout << "[" << status << "] " << r.id << ". " << r.name << " -- " << r.detail << '\n';
        all_ok &= r.passed || r.informational;
    }
    return all_ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robest: sensitivity-based parametric robustness of estimation error"};
    app.require_subcommand(1);

    auto*                        run = app.add_subcommand("run", "analyze the scenarios of a JSON config");
    std::string                  config_path;
    std::optional<std::string>   out_dir, mode;
    std::optional<std::uint64_t> seed;
    std::optional<double>        dt;
    run->add_option("--config", config_path, "config file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--mode", mode, "strict | precond")->check(CLI::IsMember({"strict", "precond"}));
    run->add_option("--seed", seed, "seed for random scenarios");
    run->add_option("--dt", dt, "integration step override")->check(CLI::PositiveNumber);

    auto* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");
    bool  list      = false;
    scenarios->add_flag("--list", list, "print the scenario catalogue");

    auto*       check      = app.add_subcommand("check", "run the property suites");
    std::size_t population = 100;
    check->add_option("--population", population, "random systems per suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(config_path, out_dir, mode, seed, dt);
        if (*scenarios) return scenarios_command();
        if (*check) return check_command(population);
    } catch (const robest::PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const robest::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
