#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmpidan/cli.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TMPIDAN_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
        }
    }
    return 0;
}

void add_common_options(CLI::App* cmd, tmpidan::RunSpec& spec, std::string& scenario) {
    cmd->add_option("--domain", spec.domain, "clutter, hanoi, or kitchen")
        ->check(CLI::IsMember({"clutter", "hanoi", "kitchen"}));
    cmd->add_option("--objects", spec.objects, "number of clutter objects");
    cmd->add_option("--disks", spec.disks, "number of Hanoi disks");
    cmd->add_option("--robots", spec.robots, "number of robots (clutter)");
    cmd->add_option("--targets", spec.targets, "number of target objects (clutter)");
    cmd->add_option("--seed", spec.config.seed, "base RNG seed (TMPIDAN_SEED as fallback)");
    cmd->add_option("--reps", spec.repetitions, "repetitions per configuration");
    cmd->add_option("--depth-limit", spec.config.depth_limit, "network depth limit");
    cmd->add_option("--motion-budget-ms", spec.config.motion_budget_ms,
                    "per-plan motion budget in milliseconds");
    cmd->add_option("--fail-prob", spec.config.fail_prob, "execution failure probability");
    cmd->add_flag("--ideal-motion", spec.config.ideal_motion,
                  "oracle motion: every plan feasible, full reach");
    cmd->add_option("--out", spec.out_path, "output file (default stdout)");
    cmd->add_option("--format", spec.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--scenario", scenario, "scenario file instead of a generator");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TMP-IDAN: task and motion planning over iteratively deepened AND/OR graph networks"};
    app.require_subcommand(1);

    tmpidan::RunSpec spec;
    spec.config.seed = default_seed();
    std::string scenario;
    std::vector<int> sweep;
    std::string plot_out;
    std::string validate_path;

    CLI::App* run = app.add_subcommand("run", "run one configuration and emit metrics rows");
    add_common_options(run, spec, scenario);

    CLI::App* bench = app.add_subcommand("bench", "sweep a parameter and emit raw + aggregate metrics");
    add_common_options(bench, spec, scenario);
    bench->add_option("--sweep", sweep, "sweep values (objects, or disks for hanoi)")
        ->delimiter(',');
    bench->add_option("--plot-out", plot_out, "write (d, tp_s) pairs to this CSV");

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file's invariants");
    validate->add_option("scenario", validate_path, "scenario file")->required();

    CLI::App* gen = app.add_subcommand("gen", "emit a generated scenario document");
    add_common_options(gen, spec, scenario);

    CLI11_PARSE(app, argc, argv);
    if (!scenario.empty()) spec.scenario_path = scenario;

    if (run->parsed()) return tmpidan::cmd_run(spec, std::cout, std::cerr);
    if (bench->parsed()) {
        if (sweep.empty()) sweep = {spec.domain == "hanoi" ? spec.disks : spec.objects};
        return tmpidan::cmd_bench(spec, sweep, plot_out, std::cout, std::cerr);
    }
    if (validate->parsed()) return tmpidan::cmd_validate(validate_path, std::cerr);
    if (gen->parsed()) return tmpidan::cmd_gen(spec, std::cout, std::cerr);
    return 1;
}
