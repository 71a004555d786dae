#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "seqsync/oracle.hpp"

using namespace seqsync;
using namespace seqsync::testing;

TEST_CASE("healthy network without injection")
{
    const auto c = reference_circuit();
    const auto sol = solve_phase_network(c, {}, {});
    CHECK(std::abs(sol.u_pos - c.ug_pos * unit(-kPi / 3.0)) < 1e-12);
    CHECK(std::abs(sol.u_neg) < 1e-12);
    CHECK(sol.kirchhoff_residual < 1e-12);
}

TEST_CASE("bolted single line-to-ground fault carries equal sequence currents")
{
    FaultSpec f;
    f.type = FaultType::SLG;
    const auto sol = solve_phase_network(reference_circuit(), f, {{0.3, -0.2}, {0.1, 0.05}});
    CHECK(std::abs(sol.i_seq[0] - sol.i_seq[1]) < 1e-9);
    CHECK(std::abs(sol.i_seq[1] - sol.i_seq[2]) < 1e-9);
    CHECK(std::abs(sol.v_phase[0]) < 1e-9);
    CHECK(std::abs(sol.i_phase[1]) < 1e-9);
    CHECK(std::abs(sol.i_phase[2]) < 1e-9);
}

TEST_CASE("bolted line-to-line fault")
{
    FaultSpec f;
    f.type = FaultType::LL;
    const auto sol = solve_phase_network(reference_circuit(), f, {{0.2, 0.1}, {0.0, 0.3}});
    CHECK(std::abs(sol.v_phase[1] - sol.v_phase[2]) < 1e-9);
    CHECK(std::abs(sol.i_phase[1] + sol.i_phase[2]) < 1e-9);
    CHECK(std::abs(sol.i_phase[0]) < 1e-9);
}

TEST_CASE("coefficient model agrees with the phase-domain solve")
{
    const auto cmp = compare_with_model(100, 7);
    CHECK(cmp.draws == 100);
    CHECK(cmp.max_relative_error < 1e-9);
    CHECK(cmp.max_kirchhoff_residual < 1e-10);
}

TEST_CASE("superposition in the injections")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL}) {
        const auto c = random_circuit(rng);
        FaultSpec f;
        f.type = type;
        f.z_f = {0.01, 0.005};
        const SequenceInjection a{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const SequenceInjection b{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const SequenceInjection ab{a.i_pos + b.i_pos, a.i_neg_cw + b.i_neg_cw};
        const auto s0 = solve_phase_network(c, f, {});
        const auto sa = solve_phase_network(c, f, a);
        const auto sb = solve_phase_network(c, f, b);
        const auto sab = solve_phase_network(c, f, ab);
        CAPTURE(to_string(type));
        CHECK(std::abs((sab.u_pos - s0.u_pos) - (sa.u_pos - s0.u_pos) - (sb.u_pos - s0.u_pos)) < 1e-12);
        CHECK(std::abs((sab.u_neg - s0.u_neg) - (sa.u_neg - s0.u_neg) - (sb.u_neg - s0.u_neg)) < 1e-12);
    }
}

TEST_CASE("unit probes recover the coefficients")
{
    const Complex a2 = unit(2.0 * kPi / 3.0);
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL, FaultType::TLG}) {
        const auto c = reference_circuit();
        const auto f = reference_fault(type);
        const auto k = compute_coefficients(compose_paths(c), f);
        const auto s0 = solve_phase_network(c, f, {});
        const auto sp = solve_phase_network(c, f, {{1.0, 0.0}, {}});
        const auto sn = solve_phase_network(c, f, {{}, {1.0, 0.0}});
        CAPTURE(to_string(type));
        CHECK(std::abs(s0.u_pos - k.k1 * c.ug_pos * unit(-kPi / 3.0)) < 1e-12);
        CHECK(std::abs(s0.u_neg - k.k4 * c.ug_pos * unit(kPi / 3.0)) < 1e-12);
        CHECK(std::abs((sp.u_pos - s0.u_pos) - k.z2) < 1e-12);
        CHECK(std::abs((sp.u_neg - s0.u_neg) - k.z6 * a2) < 1e-12);
        CHECK(std::abs((sn.u_pos - s0.u_pos) - k.z3 * std::conj(a2)) < 1e-12);
        // the symmetrical fault carries no negative-sequence current, its z5 entry is nominal
        if (type != FaultType::TLG) CHECK(std::abs((sn.u_neg - s0.u_neg) - k.z5) < 1e-12);
    }
}

TEST_CASE("resonant zero-sequence network is singular")
{
    // line and grid zero-sequence admittances cancel, leaving V0 undetermined
    auto c = reference_circuit();
    c.z_g = {0.0, 0.1};
    c.z_l2 = {};
    c.z_t2 = {0.0, -0.3};
    CHECK_THROWS_AS(solve_phase_network(c, {}, {{1.0, 0.0}, {}}), SingularSystem);
}

TEST_CASE("fault branch topology")
{
    const auto slg = fault_branch(FaultType::SLG, {0.01, 0.0});
    CHECK(slg.za.has_value());
    CHECK_FALSE(slg.zb.has_value());
    CHECK(slg.zg.has_value());
    const auto ll = fault_branch(FaultType::LL, {});
    CHECK_FALSE(ll.za.has_value());
    CHECK(ll.zb.has_value());
    CHECK(ll.zc.has_value());
    CHECK_FALSE(ll.zg.has_value());
    const auto none = fault_branch(FaultType::None, {});
    CHECK_FALSE((none.za || none.zb || none.zc || none.zg));
}
