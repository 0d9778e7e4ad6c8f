#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "halfflow/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"halfflow: pseudo-spectral laboratory for the half-harmonic "
                 "gradient flow on the circle"};
    app.require_subcommand(1);

    std::string config_path, out_dir, trace_dir, radii, at;
    std::uint64_t seed = 0;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"calibrate", "measure the quadrature normalization constants"},
        {"flow", "run the gradient flow and emit trace/snapshots/report"},
        {"scan", "concentration scan over a flow output directory"},
        {"bubble", "rescaled bubble extraction from a flow output directory"},
        {"variational", "exponentially weighted space-time minimization"},
        {"wente", "compensation-ratio survey over random divergence-free pairs"},
        {"accept", "run the acceptance criteria and print the pass/fail table"},
    };
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--seed", seed, "RNG seed override");
        sub->add_option("--out", out_dir, "output directory override");
        const std::string name = cmd.name;
        if (name == "scan" || name == "bubble")
            sub->add_option("--trace", trace_dir, "flow output directory to read");
        if (name == "scan")
            sub->add_option("--radii", radii, "comma-separated scan radii");
        if (name == "bubble")
            sub->add_option("--at", at, "extraction point t,x,R");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    halfflow::CliOverrides overrides;
    if (sub->count("--seed") > 0) overrides.seed = seed;
    if (sub->count("--out") > 0) overrides.out = out_dir;
    const std::string name = sub->get_name();
    if ((name == "scan" || name == "bubble") && sub->count("--trace") > 0)
        overrides.trace = trace_dir;
    if (name == "scan" && sub->count("--radii") > 0) overrides.radii = radii;
    if (name == "bubble" && sub->count("--at") > 0) overrides.at = at;

    return halfflow::run_experiment(name, config_path, overrides);
}
