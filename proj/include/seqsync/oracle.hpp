#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "seqsync/seqnet.hpp"

namespace seqsync {

class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fault branch between the fault node and ground: one impedance per phase to
/// a common point, then z_g to ground. nullopt marks an open branch.
struct FaultBranch {
    std::optional<Complex> za;
    std::optional<Complex> zb;
    std::optional<Complex> zc;
    std::optional<Complex> zg;
};

/// Phase-A-special fault branch of each fault type.
FaultBranch fault_branch(FaultType type, Complex z_f);

/// Converter injections as space-vector phasors with absolute angles.
/// i_neg_cw is the clockwise negative-sequence vector, e.g.
/// I- exp(-j(theta_hat_neg + theta_i_neg)).
struct SequenceInjection {
    Complex i_pos{};
    Complex i_neg_cw{};
};

struct PhaseNetworkSolution {
    Complex u_pos;                        // terminal positive-sequence voltage
    Complex u_neg;                        // terminal negative-sequence voltage, same convention as terminal_voltage
    Complex u;                            // space vector u_pos + conj(u_neg)
    std::array<Complex, 3> v_seq{};       // fault-node V0, V1, V2
    std::array<Complex, 3> i_seq{};       // fault-branch I0, I1, I2
    std::array<Complex, 3> v_phase{};     // fault-node Va, Vb, Vc
    std::array<Complex, 3> i_phase{};     // fault-branch Ia, Ib, Ic
    Complex v_neutral{};
    double kirchhoff_residual = 0.0;
};

/// Steady-state solve of the connected sequence networks with the fault
/// branch imposed in phase quantities. Throws SingularSystem when the
/// assembled system is rank-deficient.
PhaseNetworkSolution solve_phase_network(const CircuitParameters& circuit, const FaultSpec& fault,
                                         const SequenceInjection& injected, double theta_g = 0.0,
                                         double freq_scale = 1.0);

struct OracleComparison {
    std::size_t draws = 0;
    double max_relative_error = 0.0;
    double max_kirchhoff_residual = 0.0;
};

/// Random circuits, faults and injections; compares the coefficient model
/// against solve_phase_network. Three-phase faults draw no negative current.
OracleComparison compare_with_model(std::size_t draws, std::uint64_t seed);

} // namespace seqsync
