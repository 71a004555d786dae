#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "seqsync/equilibrium.hpp"
#include "seqsync/seqnet.hpp"
#include "seqsync/synchro.hpp"

namespace seqsync {

struct TerminalVoltage {
    Complex u_pos;   // positive-sequence terminal voltage
    Complex u_neg;   // negative-sequence terminal voltage (counterclockwise phasor)
    Complex u;       // space vector u_pos + conj(u_neg)
};

/// Quasi-static terminal voltage with the injections placed in the
/// synchronizer frames theta_hat_pos / theta_hat_neg.
TerminalVoltage terminal_voltage(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                                 double theta_g, double theta_hat_pos, double theta_hat_neg);

/// Frame angles of an equilibrium (delta_pos, delta_neg) at grid angle theta_g.
std::pair<double, double> frame_angles(double delta_pos, double delta_neg, double theta_g);

/// Inverse of frame_angles.
std::pair<double, double> delta_angles(double theta_hat_pos, double theta_hat_neg, double theta_g);

struct Scenario {
    CircuitParameters circuit = reference_circuit();
    FaultSpec fault;
    CurrentReference ref_prefault;
    CurrentReference ref_fault;
    SyncConfig sync;
    double t_end = 3.0;
    double dt = 1e-4;
    bool freq_adaptive_z = true;
    double record_interval = 1e-3;
    /// Grid angular frequency; defaults to circuit.omega0.
    std::optional<double> omega_grid;
    /// Synchronizer state at t = 0; defaults to the settled pre-fault state.
    std::optional<SyncState> initial;

    void validate() const;
    double grid_omega() const { return omega_grid.value_or(circuit.omega0); }
};

class NumericalOverflow : public std::runtime_error {
public:
    NumericalOverflow(const std::string& what, double t) : std::runtime_error(what), time(t) {}
    double time;
};

inline constexpr double kOverflowMagnitude = 1e6;

/// Precomputed network data shared by every integration stage.
class ScenarioModel {
public:
    explicit ScenarioModel(const Scenario& s);

    const Scenario& scenario() const { return *scenario_; }
    bool fault_active(double t) const;
    const CurrentReference& reference(double t) const;

    /// Coefficients at time t. With frequency-adaptive impedances the
    /// positive-current terms use omega_pos and the negative-current terms
    /// omega_neg.
    SequenceCoefficients coefficients(double t, double omega_pos, double omega_neg) const;

    /// Settled pre-fault synchronizer state at t = 0.
    SyncState settled_state() const;

private:
    const Scenario* scenario_;
    PathImpedances paths_;
    SequenceCoefficients healthy_;
    SequenceCoefficients faulted_;
};

/// Integrated state with every output field refreshed for time t.
struct StepOutputs {
    SyncState state;
    double theta_pos = 0.0;   // frame angles in use (arctangent angles in FLL mode)
    double theta_neg = 0.0;
    double f_pos_hz = 0.0;
    double f_neg_hz = 0.0;
    DqVoltages dq;
    TerminalVoltage terminal;
};

/// Refresh outputs (frequencies, frames, dq) of a state at time t.
StepOutputs evaluate(const ScenarioModel& model, const SyncState& state, double t);

/// One fixed-step RK4 step; throws NumericalOverflow past kOverflowMagnitude.
SyncState step(const ScenarioModel& model, const SyncState& state, double t, double dt);

struct Trace {
    std::vector<double> t;
    std::vector<double> f_pos_hz;
    std::vector<double> f_neg_hz;
    std::vector<double> theta_pos;   // normalized
    std::vector<double> theta_neg;
    std::vector<double> ud_pos;
    std::vector<double> uq_pos;
    std::vector<double> ud_neg;
    std::vector<double> uq_neg;
    std::vector<double> umag_pos;
    std::vector<double> umag_neg;
    std::vector<double> i_pos;       // applied amplitudes
    std::vector<double> i_neg;
    std::vector<double> delta_pos;   // frame angles relative to the grid
    std::vector<double> delta_neg;
    bool diverged = false;
    double t_diverged = 0.0;

    std::size_t size() const { return t.size(); }
};

enum class LosSignature { None, Drift, Chatter };

std::string_view to_string(LosSignature s);

struct LosVerdict {
    bool lost = false;
    std::optional<double> t_los;
    InstabilityType dominant = InstabilityType::Stable;
    LosSignature signature = LosSignature::None;
};

struct LosThresholds {
    double f_nominal_hz = 50.0;
    /// Start of detection after t_begin; the estimator transient at fault
    /// inception is not a loss of synchronism.
    double settle_s = 0.2;
    double drift_band_hz = 5.0;
    double drift_sustain_s = 0.05;
    double chatter_ud = 0.02;
    double chatter_p2p_hz = 5.0;
    double chatter_window_s = 0.05;
    /// Chatter must recur for this long; a longer pause restarts the count.
    double chatter_sustain_s = 0.05;
    double chatter_gap_s = 0.1;
    /// A sequence whose estimate stays below this amplitude has no frame to lose.
    double min_amplitude = 1e-4;
};

/// Loss-of-synchronism detection over samples with t in [t_begin, t_end).
///
/// DRIFT: mean |f - f_nominal| over a sustain window beyond the band.
/// CHATTER: u_d below the floor while f spans more than chatter_p2p_hz over
/// the surrounding window, recurring for chatter_sustain_s. Sequences whose
/// estimate never reaches min_amplitude in the window are skipped. A trace that
/// diverged numerically counts as lost at its divergence time.
LosVerdict detect_los(const Trace& trace, double t_begin, double t_end, const LosThresholds& th = {});

struct RunResult {
    Trace trace;
    LosVerdict verdict;
    SyncState final_state;
    StepOutputs final_outputs;
};

RunResult run_scenario(const Scenario& scenario, const LosThresholds& th = {});

void write_trace_csv(std::ostream& os, const Trace& trace);

} // namespace seqsync
