#pragma once

#include <stdexcept>
#include <string_view>

#include "seqsync/equilibrium.hpp"
#include "seqsync/phasor.hpp"

namespace seqsync {

/// DSOGI_PLL: dual SRF-PLLs on the separated sequences.
/// DSOGI_FLL: frequency-locked filter, angles by arctangent.
enum class SyncMode { DsogiPll, DsogiFll };

std::string_view to_string(SyncMode m);
SyncMode parse_sync_mode(std::string_view name);

struct SyncConfig {
    SyncMode mode = SyncMode::DsogiFll;
    double k = 1.414;           // SOGI gain
    double kp_fll = 0.0;
    double ki_fll = 0.0;
    double kp_pll = 100.0;
    double ki_pll = 2000.0;
    double omega0 = kTwoPi * 50.0;

    void validate() const;
};

/// Complete state of the synchronization unit.
///
/// u_hat_pos rotates counterclockwise, u_hat_neg clockwise. The in-phase and
/// quadrature outputs of the real-coefficient form are recovered as
/// U = u_hat_pos + u_hat_neg and V = u_hat_pos - u_hat_neg.
/// omega_hat, omega_pos and omega_neg are outputs refreshed by the integrator.
struct SyncState {
    Complex u_hat_pos{};
    Complex u_hat_neg{};
    double omega_hat = kTwoPi * 50.0;
    double eps_fll = 0.0;
    double theta_pos = 0.0;
    double theta_neg = 0.0;
    double omega_pos = kTwoPi * 50.0;
    double omega_neg = kTwoPi * 50.0;
    double xi_pos = 0.0;
    double xi_neg = 0.0;
};

struct CcfDerivative {
    Complex d_u_hat_pos;
    Complex d_u_hat_neg;
};

/// Complex-coefficient sequence filter driven by the terminal voltage,
/// centred on state.omega_hat.
CcfDerivative ccf_derivative(const SyncState& state, Complex input_u, const SyncConfig& cfg);

/// Frequency error Im[(U - U_hat) conj(V_hat)].
double fll_error(const SyncState& state, Complex input_u);

struct FllAdaptation {
    double omega_hat = 0.0;   // adapted centre frequency
    double d_eps = 0.0;       // integrator input
};

FllAdaptation fll_adaptation(const SyncState& state, Complex input_u, const SyncConfig& cfg);

struct PllDerivatives {
    double d_theta_pos = 0.0;
    double d_xi_pos = 0.0;
    double d_theta_neg = 0.0;
    double d_xi_neg = 0.0;
    double omega_pos = 0.0;
    double omega_neg = 0.0;
};

/// SRF-PLL pair. The negative-sequence loop runs with reversed sign because
/// its frame turns clockwise.
PllDerivatives pll_derivatives(const SyncState& state, const DqVoltages& dq, const SyncConfig& cfg);

/// Sequence estimates in the frames theta_pos / theta_neg.
DqVoltages extract_dq(const SyncState& state);
DqVoltages extract_dq(const SyncState& state, double theta_pos, double theta_neg);

class ZeroAmplitude : public std::runtime_error {
public:
    explicit ZeroAmplitude(Sequence s)
        : std::runtime_error(s == Sequence::Pos ? "positive-sequence estimate has zero amplitude"
                                                : "negative-sequence estimate has zero amplitude"),
          sequence(s)
    {
    }
    Sequence sequence;
};

inline constexpr double kAtanAmplitudeFloor = 1e-9;

struct AtanAngles {
    double theta_pos = 0.0;
    double theta_neg = 0.0;
};

/// theta_pos = arg(u_hat_pos), theta_neg = arg(conj(u_hat_neg)).
/// Throws ZeroAmplitude when an estimate is below kAtanAmplitudeFloor.
AtanAngles angle_by_atan(const SyncState& state);

/// Same, but falls back to the state's theta_* for a vanished estimate.
AtanAngles angle_by_atan_or_hold(const SyncState& state) noexcept;

} // namespace seqsync
