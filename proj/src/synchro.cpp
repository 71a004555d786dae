#include "seqsync/synchro.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace seqsync {

std::string_view to_string(SyncMode m)
{
    return m == SyncMode::DsogiPll ? "dsogi_pll" : "dsogi_fll";
}

SyncMode parse_sync_mode(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "dsogi_pll" || s == "pll") return SyncMode::DsogiPll;
    if (s == "dsogi_fll" || s == "fll") return SyncMode::DsogiFll;
    throw std::invalid_argument("unknown sync mode '" + std::string(name) + "'");
}

void SyncConfig::validate() const
{
    if (!(k > 0.0)) {
        throw std::invalid_argument("SOGI gain k must be positive");
    }
    if (kp_fll < 0.0 || ki_fll < 0.0 || kp_pll < 0.0 || ki_pll < 0.0) {
        throw std::invalid_argument("loop gains must be non-negative");
    }
    if (!(omega0 > 0.0)) {
        throw std::invalid_argument("omega0 must be positive");
    }
}

CcfDerivative ccf_derivative(const SyncState& s, Complex u, const SyncConfig& cfg)
{
    const Complex j{0.0, 1.0};
    const Complex err = u - s.u_hat_pos - s.u_hat_neg;
    const double w = s.omega_hat;
    const double g = 0.5 * cfg.k * w;
    return {j * w * s.u_hat_pos + g * err, -j * w * s.u_hat_neg + g * err};
}

double fll_error(const SyncState& s, Complex u)
{
    const Complex filtered = s.u_hat_pos + s.u_hat_neg;
    const Complex quadrature = s.u_hat_pos - s.u_hat_neg;
    return ((u - filtered) * std::conj(quadrature)).imag();
}

FllAdaptation fll_adaptation(const SyncState& s, Complex u, const SyncConfig& cfg)
{
    const double e = fll_error(s, u);
    return {cfg.omega0 + cfg.kp_fll * e + cfg.ki_fll * s.eps_fll, e};
}

PllDerivatives pll_derivatives(const SyncState& s, const DqVoltages& dq, const SyncConfig& cfg)
{
    PllDerivatives d;
    d.omega_pos = cfg.omega0 + cfg.kp_pll * dq.uq_pos + cfg.ki_pll * s.xi_pos;
    d.omega_neg = cfg.omega0 - cfg.kp_pll * dq.uq_neg - cfg.ki_pll * s.xi_neg;
    d.d_theta_pos = d.omega_pos;
    d.d_theta_neg = d.omega_neg;
    d.d_xi_pos = dq.uq_pos;
    d.d_xi_neg = dq.uq_neg;
    return d;
}

DqVoltages extract_dq(const SyncState& s, double theta_pos, double theta_neg)
{
    const Complex p = s.u_hat_pos * unit(-theta_pos);
    const Complex n = std::conj(s.u_hat_neg) * unit(-theta_neg);
    return {p.real(), p.imag(), n.real(), -n.imag()};
}

DqVoltages extract_dq(const SyncState& s)
{
    return extract_dq(s, s.theta_pos, s.theta_neg);
}

AtanAngles angle_by_atan(const SyncState& s)
{
    if (std::abs(s.u_hat_pos) < kAtanAmplitudeFloor) {
        throw ZeroAmplitude(Sequence::Pos);
    }
    if (std::abs(s.u_hat_neg) < kAtanAmplitudeFloor) {
        throw ZeroAmplitude(Sequence::Neg);
    }
    return {std::arg(s.u_hat_pos), std::arg(std::conj(s.u_hat_neg))};
}

AtanAngles angle_by_atan_or_hold(const SyncState& s) noexcept
{
    AtanAngles a{s.theta_pos, s.theta_neg};
    if (std::abs(s.u_hat_pos) >= kAtanAmplitudeFloor) {
        a.theta_pos = std::arg(s.u_hat_pos);
    }
    if (std::abs(s.u_hat_neg) >= kAtanAmplitudeFloor) {
        a.theta_neg = std::arg(std::conj(s.u_hat_neg));
    }
    return a;
}

} // namespace seqsync
