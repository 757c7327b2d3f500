#include <iostream>

#include <CLI11.hpp>

#include "loewner/pipeline.hpp"

// Exit status: 0 when every check passes, 1 when a check fails or a module
// error occurs (the summary is still written), 2 on configuration errors.
int main(int argc, char** argv) {
    CLI::App app{"Loewner chain toolkit"};
    app.require_subcommand(1);
    std::string config_path, scenario, out_dir;
    std::optional<double> tol, k;
    bool quiet = false;
    for (const auto& name : loewner::pipeline_commands()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " pipeline");
        auto* cfg = sub->add_option("--config", config_path, "scenario config (JSON)");
        sub->add_option("--scenario", scenario, "built-in scenario name")->excludes(cfg);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--tol", tol, "integrator tolerance (overrides time.tol)");
        sub->add_option("--k", k, "quasiconformality constant (overrides criteria.k)");
        sub->add_flag("--quiet", quiet, "do not print the summary");
    }
    app.add_subcommand("list", "print the built-in scenario names");
    CLI11_PARSE(app, argc, argv);

    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "list") {
        for (const auto& n : loewner::builtin_names()) std::cout << n << '\n';
        return 0;
    }
    loewner::ScenarioConfig cfg;
    try {
        if (!config_path.empty()) cfg = loewner::parse_config(config_path);
        else if (!scenario.empty()) cfg = loewner::builtin_config(scenario);
        else throw loewner::ConfigError({"one of --config or --scenario is required"});
        if (tol) cfg.time.tol = *tol;
        if (k) cfg.criteria.k = *k;
        if (tol || k) {
            auto errs = loewner::validate(cfg);
            if (!errs.empty()) throw loewner::ConfigError(errs);
        }
    } catch (const loewner::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    std::filesystem::path dir = out_dir.empty() ? cfg.outputs.dir : out_dir;
    auto summary = loewner::run_pipeline(cfg, sub->get_name(), dir);
    if (!quiet) std::cout << summary.dump(2) << '\n';
    if (summary.contains("error")) std::cerr << "error: " << summary["error"].get<std::string>() << '\n';
    return summary["pass"].get<bool>() ? 0 : 1;
}
