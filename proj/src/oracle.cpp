#include "seqsync/oracle.hpp"

#include <Eigen/Dense>
#include <random>

#include "seqsync/dynsim.hpp"

namespace seqsync {

FaultBranch fault_branch(FaultType type, Complex z_f)
{
    switch (type) {
    case FaultType::None: return {};
    case FaultType::SLG: return {Complex{0.0, 0.0}, std::nullopt, std::nullopt, z_f};
    case FaultType::DLG: return {std::nullopt, Complex{0.0, 0.0}, Complex{0.0, 0.0}, z_f};
    case FaultType::LL: return {std::nullopt, 0.5 * z_f, 0.5 * z_f, std::nullopt};
    case FaultType::TLG: return {z_f, z_f, z_f, Complex{0.0, 0.0}};
    }
    return {};
}

PhaseNetworkSolution solve_phase_network(const CircuitParameters& circuit, const FaultSpec& fault,
                                         const SequenceInjection& injected, double theta_g, double freq_scale)
{
    using Mat = Eigen::Matrix<Complex, 7, 7>;
    using Vec = Eigen::Matrix<Complex, 7, 1>;
    // unknowns: V0 V1 V2 I0 I1 I2 Vn
    enum { V0, V1, V2, I0, I1, I2, VN };

    const auto p = compose_paths(circuit, freq_scale);
    const Complex shift = unit(kPi / 3.0);
    const Complex e = circuit.ug_pos * unit(theta_g);
    const Complex j1 = injected.i_pos * shift;
    const Complex j2 = std::conj(injected.i_neg_cw) / shift;

    const Complex a = unit(2.0 * kPi / 3.0);
    const Complex fort[3][3] = {{1.0, 1.0, 1.0}, {1.0, a * a, a}, {1.0, a, a * a}};

    Mat m = Mat::Zero();
    Vec rhs = Vec::Zero();

    // sequence networks seen from the fault node
    m(0, V0) = 1.0 / p.zg_zero + 1.0 / p.zl_zero;
    m(0, I0) = 1.0;
    m(1, V1) = 1.0 / p.zg_pos;
    m(1, I1) = 1.0;
    rhs(1) = e / p.zg_pos + j1;
    m(2, V2) = 1.0 / p.zg_pos;
    m(2, I2) = 1.0;
    rhs(2) = j2;

    const auto br = fault_branch(fault.type, fault.z_f);
    const std::optional<Complex> phase[3] = {br.za, br.zb, br.zc};
    bool any_closed = false;
    for (int x = 0; x < 3; ++x) {
        const int row = 3 + x;
        if (phase[x]) {
            any_closed = true;
            for (int s = 0; s < 3; ++s) {
                m(row, V0 + s) = fort[x][s];
                m(row, I0 + s) = -*phase[x] * fort[x][s];
            }
            m(row, VN) = -1.0;
        }
        else {
            for (int s = 0; s < 3; ++s) {
                m(row, I0 + s) = fort[x][s];
            }
        }
    }
    // sum of phase currents is 3 I0
    if (!any_closed) {
        m(6, VN) = 1.0;
    }
    else if (br.zg) {
        m(6, VN) = 1.0;
        m(6, I0) = -3.0 * *br.zg;
    }
    else {
        m(6, I0) = 1.0;
    }

    Eigen::FullPivLU<Mat> lu(m);
    lu.setThreshold(1e-12);
    if (lu.rank() < 7) {
        throw SingularSystem("fault-node system is rank-deficient");
    }
    const Vec x = lu.solve(rhs);

    PhaseNetworkSolution out;
    out.kirchhoff_residual = (m * x - rhs).norm();
    for (int s = 0; s < 3; ++s) {
        out.v_seq[static_cast<std::size_t>(s)] = x(V0 + s);
        out.i_seq[static_cast<std::size_t>(s)] = x(I0 + s);
    }
    for (int ph = 0; ph < 3; ++ph) {
        Complex v{};
        Complex i{};
        for (int s = 0; s < 3; ++s) {
            v += fort[ph][s] * x(V0 + s);
            i += fort[ph][s] * x(I0 + s);
        }
        out.v_phase[static_cast<std::size_t>(ph)] = v;
        out.i_phase[static_cast<std::size_t>(ph)] = i;
    }
    out.v_neutral = x(VN);
    out.u_pos = (x(V1) + p.zl_pos * j1) / shift;
    out.u_neg = (x(V2) + p.zl_pos * j2) * shift;
    out.u = out.u_pos + std::conj(out.u_neg);
    return out;
}

OracleComparison compare_with_model(std::size_t draws, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit_r(0.0, 1.0);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    auto branch = [&](double xmax) {
        const double x = 0.01 + xmax * unit_r(rng);
        return BranchImpedance{x * (0.05 + 0.5 * unit_r(rng)), x};
    };
    const FaultType types[] = {FaultType::None, FaultType::SLG, FaultType::DLG, FaultType::LL, FaultType::TLG};

    OracleComparison cmp;
    for (std::size_t n = 0; n < draws; ++n) {
        CircuitParameters c = reference_circuit();
        c.z_t1 = branch(0.2);
        c.z_t2 = branch(0.2);
        c.z_l1 = branch(0.4);
        c.z_l2 = branch(0.4);
        c.z_g = branch(0.3);
        c.ug_pos = 0.8 + 0.4 * unit_r(rng);

        FaultSpec f;
        f.type = types[n % 5];
        f.z_f = unit_r(rng) < 0.3 ? Complex{}
                                  : Complex{0.05 * unit_r(rng), 0.05 * unit_r(rng)};

        CurrentReference ref;
        ref.i_pos = 1.5 * unit_r(rng);
        ref.theta_i_pos = ang(rng);
        ref.i_neg = f.type == FaultType::TLG ? 0.0 : 1.0 * unit_r(rng);
        ref.theta_i_neg = ang(rng);
        const double theta_g = ang(rng);
        const double th_pos = ang(rng);
        const double th_neg = ang(rng);

        const auto k = compute_coefficients(compose_paths(c), f);
        const auto model = terminal_voltage(k, ref, c.ug_pos, theta_g, th_pos, th_neg);

        SequenceInjection inj;
        inj.i_pos = ref.i_pos * unit(th_pos + ref.theta_i_pos);
        inj.i_neg_cw = ref.i_neg * unit(-(th_neg + ref.theta_i_neg));
        const auto sol = solve_phase_network(c, f, inj, theta_g);

        const double diff = std::hypot(std::abs(model.u_pos - sol.u_pos), std::abs(model.u_neg - sol.u_neg));
        const double scale = std::hypot(std::abs(sol.u_pos), std::abs(sol.u_neg));
        cmp.max_relative_error = std::max(cmp.max_relative_error, diff / std::max(scale, 1e-12));
        cmp.max_kirchhoff_residual = std::max(cmp.max_kirchhoff_residual, sol.kirchhoff_residual);
        ++cmp.draws;
    }
    return cmp;
}

} // namespace seqsync
