// nullcone: configuration-driven experiment runner.
// Exit status: 0 success, 2 tolerance failure, 1 error.

#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "nullcone/kernels.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    bool seed_free = false;
    bool repro = false;
};

int run(const std::string& experiment, const Options& opt) {
    nc::Config cfg = opt.config.empty() ? nc::Config() : nc::Config::load(opt.config);
    if (opt.repro) cfg.set("repro", "true");
    const nc::cli::RunConfig rc = nc::cli::parse_run_config(cfg, experiment);
    // Scalar kernels give the reference bit pattern on every machine.
    if (rc.repro) nc::kernels::force_isa(nc::kernels::Isa::Scalar);
    const auto dir = nc::io::resolve_output_dir(opt.out, rc.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const nc::cli::Artifacts a = nc::cli::run_experiment(rc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nc::cli::write_artifacts(a, rc, cfg, dir, secs);

    std::cout << rc.experiment << ": " << a.summary.dump() << "\n";
    std::cout << "artifacts: " << dir.string() << "\n";
    if (!a.ok()) {
        for (const auto& f : a.failures) std::cerr << "tolerance failure: " << f << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Null cone Dirac solver: constraints, Goursat and Cauchy evolution, diagnostics"};
    app.require_subcommand(1);
    Options opt;
    std::string chosen;
    for (const std::string& name : nc::cli::kExperiments) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", opt.config, "configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out,
                        std::string("output directory (overrides ") + nc::io::kOutputEnv + ")");
        sub->add_flag("--seed-free", opt.seed_free, "reserved; every run is deterministic");
        sub->add_flag("--repro", opt.repro, "bitwise reproducible outputs");
        sub->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        return run(chosen, opt);
    } catch (const nc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << chosen << ": " << e.what() << "\n";
    }
    return 1;
}
