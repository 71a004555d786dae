#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "seqsync/phasor.hpp"

namespace seqsync {

/// Series R + jX branch, per-unit. x is the reactance at the nominal
/// frequency, so the branch evaluated at a frequency ratio s is r + j s x.
struct BranchImpedance {
    double r = 0.0;
    double x = 0.0;

    /// Branch quoted as "x/ratio + jx", i.e. by reactance and X/R ratio.
    static BranchImpedance from_xr_ratio(double x, double xr_ratio) { return {x / xr_ratio, x}; }

    Complex at(double freq_scale) const { return {r, freq_scale * x}; }
};

/// Single-converter grid connection: choke, T1, line 1, T2, line 2, grid.
/// Transformer zero-sequence impedances equal their positive-sequence values;
/// lines and grid have zero-sequence impedance three times positive.
struct CircuitParameters {
    BranchImpedance z_choke;
    BranchImpedance z_t1;
    BranchImpedance z_t2;
    BranchImpedance z_l1;
    BranchImpedance z_l2;
    BranchImpedance z_g;
    double ug_pos = 1.0;                  // grid positive-sequence voltage, p.u.
    double theta_g = 0.0;                 // grid source angle offset, rad
    double omega0 = kTwoPi * 50.0;        // nominal angular frequency, rad/s

    void validate() const;
};

/// 110 kV / 9 MVA system used throughout the analyses; grid at 120 kV.
CircuitParameters reference_circuit();

/// Per-unit value of an impedance given in ohms on the 110 kV / 9 MVA base.
double ohms_to_pu(double ohms, double base_kv = 110.0, double base_mva = 9.0);

enum class FaultType { None, SLG, DLG, LL, TLG };

std::string_view to_string(FaultType t);
FaultType parse_fault_type(std::string_view name);

struct FaultSpec {
    FaultType type = FaultType::None;
    Complex z_f{};           // fault impedance, p.u.
    double t_on = 0.1;       // s
    double t_clear = 3.0;    // s

    void validate() const;
};

/// Sequence path impedances seen from the fault node.
/// zl_* is the converter-side path (towards the measurement node), zg_* the
/// grid-side path. Positive and negative values are equal (transposed lines).
struct PathImpedances {
    Complex zg_pos;
    Complex zg_zero;
    Complex zl_pos;
    Complex zl_zero;
};

/// Coupling coefficients of the terminal-voltage model. k1/k4 scale the grid
/// voltage into the positive/negative terminal voltage; z2/z5 are the
/// self impedances and z3/z6 the cross-sequence coupling impedances.
struct SequenceCoefficients {
    Complex k1;
    Complex z2;
    Complex z3;
    Complex k4;
    Complex z5;
    Complex z6;
};

class DegenerateNetwork : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Path impedances with every branch evaluated at r + j freq_scale x.
/// The choke is not part of any path: the measurement node lies between the
/// choke and T1.
PathImpedances compose_paths(const CircuitParameters& circuit, double freq_scale = 1.0);

/// Coupling coefficients for the given fault. Throws DegenerateNetwork when a
/// denominator vanishes.
SequenceCoefficients compute_coefficients(const PathImpedances& paths, const FaultSpec& fault);

/// Healthy-network coefficients: k1 = 1, k4 = z3 = z6 = 0, z2 = z5 = zg + zl.
SequenceCoefficients healthy_coefficients(const PathImpedances& paths);

/// Parallel combination a // b.
Complex parallel(Complex a, Complex b);

} // namespace seqsync
