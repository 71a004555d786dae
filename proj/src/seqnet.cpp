#include "seqsync/seqnet.hpp"

#include <algorithm>
#include <cctype>

namespace seqsync {

namespace {

constexpr double kDenominatorFloor = 1e-12;

Complex checked_div(Complex num, Complex den, const char* what)
{
    if (std::abs(den) < kDenominatorFloor) {
        throw DegenerateNetwork(std::string("vanishing denominator in ") + what);
    }
    return num / den;
}

void require_branch(const BranchImpedance& b, const char* name)
{
    if (!(b.r >= 0.0) || !(b.x >= 0.0)) {
        throw std::invalid_argument(std::string("branch ") + name + " must have r >= 0 and x >= 0");
    }
}

} // namespace

void CircuitParameters::validate() const
{
    require_branch(z_choke, "choke");
    require_branch(z_t1, "t1");
    require_branch(z_t2, "t2");
    require_branch(z_l1, "l1");
    require_branch(z_l2, "l2");
    require_branch(z_g, "grid");
    if (!(ug_pos > 0.0)) {
        throw std::invalid_argument("ug_pos must be positive");
    }
    if (!(omega0 > 0.0)) {
        throw std::invalid_argument("omega0 must be positive");
    }
}

void FaultSpec::validate() const
{
    if (!std::isfinite(z_f.real()) || !std::isfinite(z_f.imag())) {
        throw std::invalid_argument("fault impedance must be finite");
    }
    if (!(t_on < t_clear)) {
        throw std::invalid_argument("fault t_on must precede t_clear");
    }
}

double ohms_to_pu(double ohms, double base_kv, double base_mva)
{
    return ohms / (base_kv * base_kv / base_mva);
}

CircuitParameters reference_circuit()
{
    CircuitParameters c;
    c.z_choke = BranchImpedance::from_xr_ratio(0.15, 50.0);
    c.z_t1 = BranchImpedance::from_xr_ratio(0.06, 30.0);
    c.z_t2 = BranchImpedance::from_xr_ratio(0.16, 30.0);
    c.z_l1 = {0.02, 0.05};
    c.z_l2 = {0.06, 0.3};
    c.z_g = {0.04, 0.2};
    c.ug_pos = 120.0 / 110.0;
    c.theta_g = 0.0;
    c.omega0 = kTwoPi * 50.0;
    return c;
}

std::string_view to_string(FaultType t)
{
    switch (t) {
    case FaultType::None: return "none";
    case FaultType::SLG: return "slg";
    case FaultType::DLG: return "dlg";
    case FaultType::LL: return "ll";
    case FaultType::TLG: return "tlg";
    }
    return "?";
}

FaultType parse_fault_type(std::string_view name)
{
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "none" || s == "healthy") return FaultType::None;
    if (s == "slg") return FaultType::SLG;
    if (s == "dlg") return FaultType::DLG;
    if (s == "ll") return FaultType::LL;
    if (s == "tlg" || s == "3lg") return FaultType::TLG;
    throw std::invalid_argument("unknown fault type '" + std::string(name) + "'");
}

Complex parallel(Complex a, Complex b)
{
    return checked_div(a * b, a + b, "parallel combination");
}

PathImpedances compose_paths(const CircuitParameters& c, double s)
{
    PathImpedances p;
    p.zl_pos = c.z_t1.at(s) + c.z_l1.at(s) + c.z_t2.at(s) + c.z_l2.at(s);
    // T2 is grounded wye on the HV side; its LV delta blocks zero sequence.
    p.zl_zero = c.z_t2.at(s) + 3.0 * c.z_l2.at(s);
    p.zg_pos = c.z_g.at(s);
    p.zg_zero = 3.0 * c.z_g.at(s);
    return p;
}

SequenceCoefficients healthy_coefficients(const PathImpedances& p)
{
    const Complex z = p.zg_pos + p.zl_pos;
    return {Complex{1.0, 0.0}, z, Complex{}, Complex{}, z, Complex{}};
}

SequenceCoefficients compute_coefficients(const PathImpedances& p, const FaultSpec& fault)
{
    const Complex gp = p.zg_pos;
    const Complex gn = p.zg_pos;
    const Complex zl = p.zl_pos;
    const Complex zf = fault.z_f;

    SequenceCoefficients k;
    switch (fault.type) {
    case FaultType::None:
        return healthy_coefficients(p);

    case FaultType::SLG: {
        const Complex z0 = parallel(p.zg_zero, p.zl_zero) + 3.0 * zf;
        const Complex den = gp + gn + z0;
        k.k1 = checked_div(gp + z0, den, "SLG");
        k.z2 = checked_div(gp * (gn + z0), den, "SLG") + zl;
        k.z3 = -checked_div(gp * gn, den, "SLG");
        k.k4 = -checked_div(gn, den, "SLG");
        k.z5 = checked_div(gn * (gp + z0), den, "SLG") + zl;
        k.z6 = -checked_div(gn * gp, den, "SLG");
        return k;
    }

    case FaultType::DLG: {
        const Complex z0 = parallel(p.zg_zero, p.zl_zero) + 3.0 * zf;
        const Complex den = gp + 2.0 * z0;
        k.k1 = checked_div(z0, den, "DLG");
        k.z2 = checked_div(gp * z0, den, "DLG") + zl;
        k.z3 = checked_div(gp * z0, den, "DLG");
        k.k4 = checked_div(z0, den, "DLG");
        k.z5 = checked_div(gn * z0, den, "DLG") + zl;
        k.z6 = checked_div(gp * z0, den, "DLG");
        return k;
    }

    case FaultType::LL: {
        const Complex den = gp + gn + zf;
        k.k1 = checked_div(gn + zf, den, "LL");
        k.z2 = checked_div(gp * (gn + zf), den, "LL") + zl;
        k.z3 = checked_div(gp * gn, den, "LL");
        k.k4 = checked_div(gn, den, "LL");
        k.z5 = checked_div(gn * (gp + zf), den, "LL") + zl;
        k.z6 = checked_div(gn * gp, den, "LL");
        return k;
    }

    case FaultType::TLG: {
        // The symmetrical fault leaves no negative-sequence entries; z5 is
        // zero rather than the physical self impedance.
        const Complex den = gp + zf;
        k.k1 = checked_div(zf, den, "TLG");
        k.z2 = checked_div(gp * zf, den, "TLG") + zl;
        k.z3 = Complex{};
        k.k4 = Complex{};
        k.z5 = Complex{};
        k.z6 = Complex{};
        return k;
    }
    }
    throw std::invalid_argument("unhandled fault type");
}

} // namespace seqsync
