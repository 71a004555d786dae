#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

using seqsync::app::CommandOptions;

namespace {

void add_network_flags(CLI::App* cmd, CommandOptions& o)
{
    cmd->add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--fault", o.fault, "fault type: none, slg, dlg, ll, tlg");
    cmd->add_option("--zf", o.zf, "fault impedance, p.u. (A@D or number)");
}

void add_current_flags(CLI::App* cmd, CommandOptions& o)
{
    cmd->add_option("--iplus", o.iplus, "on-fault positive-sequence current A@D");
    cmd->add_option("--iminus", o.iminus, "on-fault negative-sequence current A@D");
}

void add_limit_flags(CLI::App* cmd, CommandOptions& o)
{
    cmd->add_option("--seq", o.seq, "sequence whose amplitude is raised: pos or neg");
    cmd->add_option("--other", o.other, "fixed current of the other sequence A@D");
    cmd->add_option("--step", o.step, "traversal step, p.u.");
    cmd->add_flag("--decoupled", o.decoupled, "closed-form limit ignoring coupling");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-sequence synchronization stability analysis"};
    app.require_subcommand(1);
    CommandOptions o;

    auto* coeffs = app.add_subcommand("coeffs", "coupling coefficients of a fault");
    add_network_flags(coeffs, o);
    coeffs->add_flag("--json", o.json, "JSON output");

    auto* limit = app.add_subcommand("limit", "injection limit at one current angle");
    add_network_flags(limit, o);
    add_limit_flags(limit, o);
    limit->add_option("--angle", o.angle_deg, "current angle, degrees")->required();
    limit->add_flag("--json", o.json, "JSON output");

    auto* region = app.add_subcommand("region", "allowable-region boundary as CSV");
    add_network_flags(region, o);
    add_limit_flags(region, o);
    region->add_option("--angle-step", o.angle_step_deg, "angle step, degrees");
    region->add_option("--out", o.out, "CSV path (default stdout)");
    region->add_option("--svg", o.svg, "polar plot path");

    auto* equilibrium = app.add_subcommand("equilibrium", "solve the on-fault equilibrium");
    add_network_flags(equilibrium, o);
    add_current_flags(equilibrium, o);

    auto* simulate = app.add_subcommand("simulate", "time-domain fault scenario");
    add_network_flags(simulate, o);
    add_current_flags(simulate, o);
    simulate->add_option("--mode", o.mode, "dsogi_pll or dsogi_fll");
    simulate->add_option("--dt", o.dt, "integration step, s");
    simulate->add_option("--t-end", o.t_end, "end time, s");
    simulate->add_option("--out", o.out, "trace CSV path");
    simulate->add_option("--verdict", o.verdict, "verdict JSON path (default stdout)");
    simulate->add_option("--svg", o.svg, "time-series plot path");

    auto* validate = app.add_subcommand("validate", "check the coefficient model against the phase-domain solver");
    validate->add_option("--draws", o.draws, "random draws");
    validate->add_option("--seed", o.seed, "random seed");

    auto* config = app.add_subcommand("config", "print the resolved configuration");
    add_network_flags(config, o);
    add_current_flags(config, o);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : seqsync::app::kExitConfig;
    }
    const auto* cmd = app.get_subcommands().front();
    return seqsync::app::run_command(cmd->get_name(), o, std::cout, std::cerr);
}
