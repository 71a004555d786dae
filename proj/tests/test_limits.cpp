#include <doctest.h>

#include "oracles.hpp"

using namespace seqsync;
using namespace seqsync::testing;

namespace {

const double kUg = reference_circuit().ug_pos;

bool has_equilibrium(const SequenceCoefficients& k, const CurrentReference& ref)
{
    try {
        return solve_equilibrium(k, ref, kUg).found;
    }
    catch (const NoConvergence&) {
        return false;
    }
}

CurrentReference with_limit(Sequence seq, double theta, double amp, const OtherCurrent& o)
{
    return seq == Sequence::Pos ? CurrentReference{amp, theta, o.amplitude, o.angle}
                                : CurrentReference{o.amplitude, o.angle, amp, theta};
}

} // namespace

TEST_CASE("decoupled limit along the self-impedance axis")
{
    const auto k = reference_coefficients(FaultType::DLG);
    const double ratio = std::abs(k.k1) * kUg / std::abs(k.z2);
    // drop aligned with the grid contribution: no orientation limit
    const auto aligned = decoupled_limit(k, kUg, Sequence::Pos, -angle(k.z2));
    CHECK(std::isinf(aligned.i_limit));
    CHECK(aligned.binding == Binding::Ceiling);
    // drop opposing it: the d-axis bound alone
    const auto opposed = decoupled_limit(k, kUg, Sequence::Pos, normalize_angle(kPi - angle(k.z2)));
    CHECK(opposed.i_limit == doctest::Approx(ratio).epsilon(1e-12));
    CHECK(opposed.binding == Binding::Type2);
}

TEST_CASE("bolted line-to-line type-2 bound")
{
    FaultSpec f;
    f.type = FaultType::LL;
    const auto k = compute_coefficients(compose_paths(reference_circuit()), f);
    for (double deg = -180.0; deg < 180.0; deg += 5.0) {
        const auto r = decoupled_limit(k, kUg, Sequence::Pos, deg_to_rad(deg));
        CHECK(r.i_limit >= kLlPosType2Decoupled * (1.0 - 1e-6));
        if (r.binding == Binding::Type2) {
            CHECK(r.i_limit == doctest::Approx(kLlPosType2Decoupled).epsilon(1e-6));
        }
    }
    CHECK(decoupled_limit(k, kUg, Sequence::Pos, deg_to_rad(90)).i_limit ==
          doctest::Approx(kLlPosType2Decoupled).epsilon(1e-6));
}

TEST_CASE("bolted three-phase fault admits no positive current")
{
    FaultSpec f;
    f.type = FaultType::TLG;
    const auto k = compute_coefficients(compose_paths(reference_circuit()), f);
    for (double deg = -175.0; deg < 180.0; deg += 5.0) {
        const auto r = decoupled_limit(k, kUg, Sequence::Pos, deg_to_rad(deg));
        if (std::abs(std::sin(std::abs(normalize_angle(angle(k.z2) + deg_to_rad(deg))))) > 1e-9) {
            CHECK(r.i_limit == 0.0);
        }
    }
}

TEST_CASE("traversal limits of the reference cases")
{
    TraversalOptions o;
    o.step = 0.01;
    CHECK(traversal_limit(reference_coefficients(FaultType::DLG), kUg, Sequence::Pos, deg_to_rad(-30), {0.5, deg_to_rad(90)}, o)
              .i_limit == doctest::Approx(0.76).epsilon(1e-9));
    const auto slg = reference_coefficients(FaultType::SLG);
    CHECK(std::abs(traversal_limit(slg, kUg, Sequence::Neg, deg_to_rad(-30), {0.5, deg_to_rad(-90)}, o).i_limit - 0.54) <= 0.03);
    CHECK(traversal_limit(slg, kUg, Sequence::Neg, deg_to_rad(90), {0.5, deg_to_rad(-90)}, o).i_limit ==
          doctest::Approx(0.41).epsilon(1e-9));
}

TEST_CASE("traversal with zero other current matches the closed form")
{
    TraversalOptions o;
    o.step = 0.01;
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL}) {
        const auto k = reference_coefficients(type);
        for (auto seq : {Sequence::Pos, Sequence::Neg}) {
            const auto coupled = region_boundary(k, kUg, seq, {}, deg_to_rad(5.0), o);
            const auto closed = decoupled_region(k, kUg, seq, deg_to_rad(5.0));
            REQUIRE(coupled.samples.size() == closed.samples.size());
            for (std::size_t i = 0; i < closed.samples.size(); ++i) {
                const double expect = std::min(closed.samples[i].i_limit, o.ceiling);
                CAPTURE(rad_to_deg(closed.samples[i].theta_i));
                CHECK(coupled.samples[i].i_limit <= expect + 1e-9);
                CHECK(coupled.samples[i].i_limit >= expect - o.step - 1e-9);
            }
        }
    }
}

TEST_CASE("region sample count")
{
    const auto k = reference_coefficients(FaultType::DLG);
    const auto r = region_boundary(k, kUg, Sequence::Pos, {0.5, deg_to_rad(90)}, kPi / 2.0);
    REQUIRE(r.samples.size() == 4);
    for (std::size_t i = 1; i < r.samples.size(); ++i) {
        CHECK(r.samples[i].theta_i > r.samples[i - 1].theta_i);
    }
    CHECK(r.samples.front().theta_i == doctest::Approx(-kPi));
}

TEST_CASE("underexcited negative current shrinks the positive region")
{
    const auto k = reference_coefficients(FaultType::DLG);
    TraversalOptions o;
    const auto coupled = region_boundary(k, kUg, Sequence::Pos, {0.5, deg_to_rad(90)}, deg_to_rad(10.0), o);
    const auto free = region_boundary(k, kUg, Sequence::Pos, {}, deg_to_rad(10.0), o);
    for (std::size_t i = 0; i < coupled.samples.size(); ++i) {
        const double th = coupled.samples[i].theta_i;
        if (th > 0.0) continue;   // overexcited half plane
        CAPTURE(rad_to_deg(th));
        CHECK(coupled.samples[i].i_limit <= free.samples[i].i_limit + 1e-9);
    }
}

TEST_CASE("overexcited positive current expands the negative region")
{
    const auto k = reference_coefficients(FaultType::SLG);
    TraversalOptions o;
    const auto coupled = region_boundary(k, kUg, Sequence::Neg, {0.5, deg_to_rad(-90)}, deg_to_rad(10.0), o);
    const auto closed = decoupled_region(k, kUg, Sequence::Neg, deg_to_rad(10.0));
    for (std::size_t i = 0; i < coupled.samples.size(); ++i) {
        CAPTURE(rad_to_deg(coupled.samples[i].theta_i));
        CHECK(coupled.samples[i].i_limit >= std::min(closed.samples[i].i_limit, o.ceiling) - o.step - 1e-9);
    }
}

TEST_CASE("boundary samples separate stable from unstable amplitudes")
{
    TraversalOptions o;
    for (const auto& row : limit_rows()) {
        const auto k = reference_coefficients(row.fault);
        const OtherCurrent other{row.other_amplitude, deg_to_rad(row.other_angle_deg)};
        const double th = deg_to_rad(row.theta_i_deg);
        const auto r = traversal_limit(k, kUg, row.sequence, th, other, o);
        CAPTURE(row.name);
        REQUIRE(r.binding != Binding::Ceiling);
        CHECK(has_equilibrium(k, with_limit(row.sequence, th, r.i_limit, other)));
        CHECK_FALSE(has_equilibrium(k, with_limit(row.sequence, th, r.i_limit + o.step, other)));
    }
}

TEST_CASE("bisection refines within one step")
{
    TraversalOptions coarse;
    TraversalOptions fine;
    fine.bisection_iterations = 8;
    const auto k = reference_coefficients(FaultType::DLG);
    const OtherCurrent other{0.5, deg_to_rad(90)};
    const auto a = traversal_limit(k, kUg, Sequence::Pos, deg_to_rad(-30), other, coarse);
    const auto b = traversal_limit(k, kUg, Sequence::Pos, deg_to_rad(-30), other, fine);
    CHECK(b.i_limit >= a.i_limit);
    CHECK(b.i_limit < a.i_limit + coarse.step);
    CHECK(has_equilibrium(k, with_limit(Sequence::Pos, deg_to_rad(-30), b.i_limit, other)));
}

TEST_CASE("cross-fault ordering of the decoupled ratios")
{
    auto ratio = [](FaultType t, Sequence s) {
        const auto k = reference_coefficients(t);
        return s == Sequence::Pos ? std::abs(k.k1) * kUg / std::abs(k.z2) : std::abs(k.k4) * kUg / std::abs(k.z5);
    };
    CHECK(ratio(FaultType::DLG, Sequence::Pos) < ratio(FaultType::SLG, Sequence::Pos));
    CHECK(ratio(FaultType::DLG, Sequence::Pos) < ratio(FaultType::LL, Sequence::Pos));
    CHECK(ratio(FaultType::SLG, Sequence::Neg) < ratio(FaultType::DLG, Sequence::Neg));
    CHECK(ratio(FaultType::SLG, Sequence::Neg) < ratio(FaultType::LL, Sequence::Neg));
}

TEST_CASE("sequence coupling moves the limits monotonically")
{
    TraversalOptions o;
    for (auto type : {FaultType::SLG, FaultType::DLG, FaultType::LL}) {
        const auto k = reference_coefficients(type);
        double prev_pos = 1e9;
        double prev_neg = -1.0;
        for (int n = 0; n <= 5; ++n) {
            const double a = 0.1 * n;
            const double pos = traversal_limit(k, kUg, Sequence::Pos, deg_to_rad(-30), {a, deg_to_rad(90)}, o).i_limit;
            const double neg = traversal_limit(k, kUg, Sequence::Neg, deg_to_rad(90), {a, deg_to_rad(-90)}, o).i_limit;
            CAPTURE(to_string(type));
            CAPTURE(a);
            CHECK(pos <= prev_pos + 1e-9);
            CHECK(neg >= prev_neg - 1e-9);
            prev_pos = pos;
            prev_neg = neg;
        }
    }
}
