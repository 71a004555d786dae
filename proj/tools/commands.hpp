#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>

#include "config.hpp"
#include "seqsync/limits.hpp"
#include "seqsync/oracle.hpp"

namespace seqsync::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitNoEquilibrium = 2,
    kExitNumerical = 3,
};

/// Flags shared by every subcommand; unset optionals keep the config value.
struct CommandOptions {
    std::string config_path;
    std::optional<std::string> fault;
    std::optional<std::string> zf;
    std::optional<std::string> iplus;
    std::optional<std::string> iminus;
    std::optional<std::string> mode;
    std::optional<double> dt;
    std::optional<double> t_end;

    std::string seq = "pos";
    double angle_deg = 0.0;
    std::optional<std::string> other;
    std::optional<double> step;
    double angle_step_deg = 5.0;
    bool decoupled = false;

    bool json = false;
    std::string out;
    std::string svg;
    std::string verdict;

    std::size_t draws = 100;
    std::uint64_t seed = 1;
};

/// Config file (or defaults) with the command-line overrides applied.
ConfigDocument resolve_config(const CommandOptions& opts);

/// Runs one subcommand; exceptions are mapped to exit codes and reported on err.
int run_command(std::string_view name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

nlohmann::json coefficients_json(const SequenceCoefficients& k, FaultType type);
nlohmann::json limit_json(const LimitResult& r);
nlohmann::json equilibrium_json(const EquilibriumResult& r);
nlohmann::json verdict_json(const LosVerdict& v, const Trace& trace);
nlohmann::json validation_json(const OracleComparison& c);

enum class ResultKind { Coefficients, Limit, Equilibrium, Verdict, Validation };

/// Checks a result record against its documented schema; throws ConfigError
/// naming the first offending field.
void check_result_schema(const nlohmann::json& record, ResultKind kind);

void write_region_csv(std::ostream& os, const RegionBoundary& region);

} // namespace seqsync::app
