#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace seqsync;
using namespace seqsync::testing;

namespace {

const double kUg = reference_circuit().ug_pos;

} // namespace

TEST_CASE("zero-injection fixed point of the dq map")
{
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL}) {
        const auto k = reference_coefficients(type);
        const auto v = dq_voltages(k, {}, kUg, angle(k.k1), angle(k.k4));
        CHECK(std::abs(v.uq_pos) < 1e-14);
        CHECK(std::abs(v.uq_neg) < 1e-14);
        CHECK(v.ud_pos == doctest::Approx(std::abs(k.k1) * kUg));
        CHECK(v.ud_neg == doctest::Approx(std::abs(k.k4) * kUg));
    }
}

TEST_CASE("dq map is the frame rotation of the terminal voltage")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(-kPi, kPi);
    std::uniform_real_distribution<double> m(0.0, 1.2);
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL, FaultType::TLG}) {
        const auto k = reference_coefficients(type);
        for (int i = 0; i < 50; ++i) {
            const CurrentReference ref{m(rng), a(rng), m(rng), a(rng)};
            const double dp = a(rng), dn = a(rng), tg = a(rng);
            const auto [tp, tn] = frame_angles(dp, dn, tg);
            const auto tv = terminal_voltage(k, ref, kUg, tg, tp, tn);
            const Complex p = tv.u_pos * unit(-tp);
            const Complex n = tv.u_neg * unit(-tn);
            const auto v = dq_voltages(k, ref, kUg, dp, dn);
            CHECK(std::abs(p - Complex{v.ud_pos, v.uq_pos}) < 1e-12);
            CHECK(std::abs(n - Complex{v.ud_neg, -v.uq_neg}) < 1e-12);
        }
    }
}

TEST_CASE("single line-to-ground case closes its phasor polygon")
{
    const auto k = reference_coefficients(FaultType::SLG);
    const CurrentReference ref{0.6, deg_to_rad(-90), 0.3, deg_to_rad(90)};
    const auto r = solve_equilibrium(k, ref, kUg);
    REQUIRE(r.found);
    const auto v = dq_voltages(k, ref, kUg, r.delta_pos, r.delta_neg);
    CHECK(std::abs(v.uq_pos) < 1e-9);
    CHECK(std::abs(v.uq_neg) < 1e-9);
    // grid, self and cross drops sum to a phasor on the d axis
    const Complex sum = k.k1 * kUg * unit(-r.delta_pos) + k.z2 * 0.6 * unit(deg_to_rad(-90)) +
                        k.z3 * 0.3 * unit(r.delta_neg - r.delta_pos + deg_to_rad(90));
    CHECK(std::abs(sum.imag()) < 1e-9);
    CHECK(sum.real() == doctest::Approx(v.ud_pos).epsilon(1e-9));
}

TEST_CASE("zero injection solves to the coefficient angles")
{
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL}) {
        const auto k = reference_coefficients(type);
        const auto r = solve_equilibrium(k, {}, kUg);
        REQUIRE(r.found);
        CHECK(angle_distance(r.delta_pos, angle(k.k1)) < 1e-9);
        CHECK(angle_distance(r.delta_neg, angle(k.k4)) < 1e-9);
    }
}

TEST_CASE("double line-to-ground limit at -30 degrees")
{
    const auto k = reference_coefficients(FaultType::DLG);
    CHECK(solve_equilibrium(k, {0.76, deg_to_rad(-30), 0.5, deg_to_rad(90)}, kUg).found);
    CHECK_FALSE(solve_equilibrium(k, {0.77, deg_to_rad(-30), 0.5, deg_to_rad(90)}, kUg).found);
}

TEST_CASE("line-to-line root matches a dense torus scan")
{
    const auto k = reference_coefficients(FaultType::LL);
    const CurrentReference ref{0.5, deg_to_rad(-90), 0.5, deg_to_rad(90)};
    const auto r = solve_equilibrium(k, ref, kUg);
    REQUIRE(r.found);
    const auto scan = dense_torus_argmin(k, ref, kUg, 0.1);
    REQUIRE(scan.any);
    CHECK(rad_to_deg(angle_distance(r.delta_pos, scan.delta_pos)) < 0.2);
    CHECK(rad_to_deg(angle_distance(r.delta_neg, scan.delta_neg)) < 0.2);
}

TEST_CASE("classification examples")
{
    CHECK(classify(reference_coefficients(FaultType::DLG), {0.85, deg_to_rad(-30), 0.5, deg_to_rad(90)}, kUg) ==
          InstabilityType::PosType1);
    CHECK(classify(reference_coefficients(FaultType::SLG), {0.5, deg_to_rad(-90), 0.5, deg_to_rad(90)}, kUg) ==
          InstabilityType::NegType2);
    CHECK(classify(reference_coefficients(FaultType::SLG), {}, kUg) == InstabilityType::Stable);
}

TEST_CASE("found roots satisfy the orientation and feedback conditions")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> m(0.0, 0.6);
    std::uniform_real_distribution<double> a(-kPi, kPi);
    int found = 0;
    for (int i = 0; i < 200; ++i) {
        const auto type = std::array{FaultType::SLG, FaultType::DLG, FaultType::LL}[i % 3];
        const auto k = reference_coefficients(type);
        const CurrentReference ref{m(rng), a(rng), m(rng), a(rng)};
        const auto r = solve_equilibrium(k, ref, kUg);
        if (!r.found) continue;
        ++found;
        CHECK(r.cond_orientation);
        CHECK(r.cond_feedback);
        const auto v = dq_voltages(k, ref, kUg, r.delta_pos, r.delta_neg);
        CHECK(std::abs(v.uq_pos) < 1e-9);
        CHECK(std::abs(v.uq_neg) < 1e-9);
        CHECK(v.ud_pos > 0.0);
        CHECK(v.ud_neg > 0.0);
        const auto [sp, sn] = feedback_slopes(k, ref, kUg, r.delta_pos, r.delta_neg);
        CHECK(sp < 0.0);
        CHECK(sn < 0.0);
    }
    CHECK(found > 100);
}

TEST_CASE("qualifying root is unique on random stable configurations")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> m(0.0, 0.5);
    std::uniform_real_distribution<double> a(-kPi, kPi);
    int checked = 0;
    while (checked < 50) {
        const auto type = std::array{FaultType::SLG, FaultType::DLG, FaultType::LL}[checked % 3];
        const auto k = reference_coefficients(type);
        const CurrentReference ref{m(rng), a(rng), m(rng), a(rng)};
        const auto r = solve_equilibrium(k, ref, kUg);
        if (!r.found) continue;
        ++checked;
        const auto roots = torus_roots(k, ref, kUg, 0.5);
        CHECK(roots.size() == 1);
        if (!roots.empty()) {
            CHECK(angle_distance(roots[0].first, r.delta_pos) < 1e-6);
            CHECK(angle_distance(roots[0].second, r.delta_neg) < 1e-6);
        }
    }
}

TEST_CASE("roots move continuously with the injection")
{
    const auto k = reference_coefficients(FaultType::DLG);
    const CurrentReference ref{0.5, deg_to_rad(-30), 0.3, deg_to_rad(90)};
    const auto r0 = solve_equilibrium(k, ref, kUg);
    REQUIRE(r0.found);
    for (double d : {-1e-4, 1e-4}) {
        auto p = ref;
        p.i_pos += d;
        const auto r = solve_equilibrium(k, p, kUg);
        REQUIRE(r.found);
        CHECK(angle_distance(r.delta_pos, r0.delta_pos) < 1e-2);
        CHECK(angle_distance(r.delta_neg, r0.delta_neg) < 1e-2);
    }
}
