#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "fdlsd/text.hpp"
#include "fdlsd/version.hpp"

int main(int argc, char** argv) {
    using namespace fdlsd::cli;

    CLI::App app{"Sample dropout and feature diversity learning experiments", "fdlsd"};
    app.set_version_flag("--version", fdlsd::kVersion);
    app.require_subcommand(1);

    CommandOptions opts;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::string param;
    std::string values;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (dotted key=value lines)")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "training seed, overrides the config");
        sub->add_flag("--quiet", opts.quiet, "no progress output");
    };

    CLI::App* gen = app.add_subcommand("gen", "write the source/target corpus and the hard-id sidecar");
    add_common(gen);
    CLI::App* run = app.add_subcommand("run", "train once and write report, curves, checkpoint, manifest");
    add_common(run);
    CLI::App* sweep = app.add_subcommand("sweep", "one run per value of a parameter, plus sweep.csv");
    add_common(sweep);
    sweep->add_option("--param", param, "rho, delta, fdl_enabled, alpha or eps")->required();
    sweep->add_option("--values", values, "comma separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    opts.config_path = config_path;
    opts.out_dir = out_dir;
    for (CLI::App* sub : {gen, run, sweep}) {
        if (sub->parsed() && sub->count("--seed")) opts.seed = seed;
    }

    if (gen->parsed()) return cmd_gen(opts);
    if (run->parsed()) return cmd_run(opts);

    std::vector<std::string> list;
    for (auto tok : fdlsd::text::split(values, ',')) {
        const auto v = fdlsd::text::trim(tok);
        if (!v.empty()) list.emplace_back(v);
    }
    return cmd_sweep(opts, param, list);
}
