#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

#include "seqsync/phasor.hpp"
#include "seqsync/seqnet.hpp"

namespace seqsync {

enum class Sequence { Pos, Neg };

std::string_view to_string(Sequence s);

/// Current injection relative to the synchronization frames.
/// theta_i_pos = -pi/2 is overexcited positive-sequence reactive current,
/// theta_i_neg = +pi/2 is underexcited negative-sequence reactive current.
struct CurrentReference {
    double i_pos = 0.0;
    double theta_i_pos = 0.0;
    double i_neg = 0.0;
    double theta_i_neg = 0.0;

    static CurrentReference zero() { return {}; }
    void validate() const;
};

/// d/q voltages of both sequences in their own synchronous frames.
/// The negative-sequence pair follows the u_d - j u_q convention.
struct DqVoltages {
    double ud_pos = 0.0;
    double uq_pos = 0.0;
    double ud_neg = 0.0;
    double uq_neg = 0.0;
};

/// Why no qualifying equilibrium exists.
enum class EquilibriumFailure {
    None,
    NoOrientation,      // q-axis voltages cannot both vanish on a stable branch
    ReversedPos,        // stable orientation exists only with u_d+ <= 0
    ReversedNeg,        // stable orientation exists only with u_d- <= 0
};

struct EquilibriumResult {
    bool found = false;
    double delta_pos = 0.0;
    double delta_neg = 0.0;
    double ud_pos = 0.0;
    double uq_pos = 0.0;
    double ud_neg = 0.0;
    double uq_neg = 0.0;
    bool cond_orientation = false;   // u_d > 0 in both sequences
    bool cond_feedback = false;      // negative-feedback slopes
    double residual_norm = 0.0;
    EquilibriumFailure failure = EquilibriumFailure::NoOrientation;
};

enum class InstabilityType { Stable, PosType1, PosType2, NegType1, NegType2 };

std::string_view to_string(InstabilityType t);

struct SolverOptions {
    double grid_step_deg = 2.0;
    double uq_tolerance = 1e-10;
    double ud_threshold = 1e-9;
    int max_newton_iterations = 60;
    /// Newton is tried from here before the grid scan (continuation).
    std::optional<std::pair<double, double>> warm_start;
};

class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, EquilibriumResult best)
        : std::runtime_error(what), best_candidate(best)
    {
    }
    EquilibriumResult best_candidate;
};

/// Frame-rotated terminal voltages at the angle pair (delta_pos, delta_neg).
DqVoltages dq_voltages(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                       double delta_pos, double delta_neg);

/// Slopes d(u_q+)/d(delta+) and -d(u_q-)/d(delta-). A stable orientation
/// needs both strictly negative.
std::pair<double, double> feedback_slopes(const SequenceCoefficients& k, const CurrentReference& ref,
                                          double ug_pos, double delta_pos, double delta_neg);

/// Steady-state angle pair with both q-axis voltages zero, positive d-axis
/// voltages and negative-feedback orientation. Seeds damped Newton from a
/// torus grid scan; found = false once every seed is exhausted.
EquilibriumResult solve_equilibrium(const SequenceCoefficients& k, const CurrentReference& ref,
                                    double ug_pos, const SolverOptions& opts = {});

/// Stable when an equilibrium exists, otherwise the most violated
/// injection-limit boundary.
InstabilityType classify(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                         const SolverOptions& opts = {});

} // namespace seqsync
