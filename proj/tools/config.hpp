#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <string_view>

#include "seqsync/dynsim.hpp"
#include "seqsync/limits.hpp"

namespace seqsync::app {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Amplitude and angle (radians) of an `A@D` phasor string.
struct Polar {
    double amplitude = 0.0;
    double angle = 0.0;
};

/// Parses `A@D` (amplitude @ degrees); a bare number means angle 0.
Polar parse_phasor(std::string_view text);
std::string format_phasor(double amplitude, double angle_rad);

struct ConfigDocument {
    CircuitParameters circuit = reference_circuit();
    FaultSpec fault = default_fault();
    CurrentReference ref_prefault;
    CurrentReference ref_fault;
    SyncConfig sync;
    double t_end = 3.0;
    double dt = 1e-4;
    bool freq_adaptive_z = true;
    double record_interval = 1e-3;
    SolverOptions solver;
    TraversalOptions traversal;

    static FaultSpec default_fault();
    Scenario scenario() const;
};

/// Schema-checked parse; unknown keys and wrong types raise ConfigError.
ConfigDocument parse_config(const nlohmann::json& doc);
ConfigDocument load_config(const std::string& path);

/// Serialized form of a document, accepted back by parse_config.
nlohmann::json to_json(const ConfigDocument& cfg);

} // namespace seqsync::app
