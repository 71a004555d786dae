#include "seqsync/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace seqsync {

std::string_view to_string(Binding b)
{
    switch (b) {
    case Binding::Type1: return "TYPE1";
    case Binding::Type2: return "TYPE2";
    case Binding::Ceiling: return "CEILING";
    }
    return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CurrentReference with_amplitude(Sequence seq, double theta_i, double amplitude, const OtherCurrent& other)
{
    CurrentReference ref;
    if (seq == Sequence::Pos) {
        ref.i_pos = amplitude;
        ref.theta_i_pos = theta_i;
        ref.i_neg = other.amplitude;
        ref.theta_i_neg = other.angle;
    }
    else {
        ref.i_neg = amplitude;
        ref.theta_i_neg = theta_i;
        ref.i_pos = other.amplitude;
        ref.theta_i_pos = other.angle;
    }
    return ref;
}

struct Probe {
    bool found = false;
    EquilibriumResult result;
};

Probe probe(const SequenceCoefficients& k, double ug, const CurrentReference& ref, const SolverOptions& opts)
{
    Probe p;
    try {
        p.result = solve_equilibrium(k, ref, ug, opts);
        p.found = p.result.found;
    }
    catch (const NoConvergence& e) {
        p.result = e.best_candidate;
        p.found = false;
    }
    return p;
}

Binding binding_of(const EquilibriumResult& r)
{
    switch (r.failure) {
    case EquilibriumFailure::ReversedPos:
    case EquilibriumFailure::ReversedNeg:
        return Binding::Type2;
    default:
        return Binding::Type1;
    }
}

} // namespace

LimitResult decoupled_limit(const SequenceCoefficients& k, double ug_pos, Sequence sequence, double theta_i)
{
    const Complex gain = sequence == Sequence::Pos ? k.k1 : k.k4;
    const Complex self = sequence == Sequence::Pos ? k.z2 : k.z5;
    if (!(std::abs(self) > 0.0)) {
        throw std::invalid_argument("decoupled limit needs a non-zero self impedance");
    }
    const double ratio = std::abs(gain) * ug_pos / std::abs(self);
    const double x = normalize_angle(angle(self) + theta_i);

    LimitResult out;
    out.sequence = sequence;
    out.theta_i = theta_i;
    if (std::cos(x) < 0.0) {
        out.i_limit = ratio;
        out.binding = Binding::Type2;
        return out;
    }
    const double s = std::sin(std::abs(x));
    if (s <= 1e-9) {
        out.i_limit = kInf;
        out.binding = Binding::Ceiling;
        return out;
    }
    out.i_limit = ratio / s;
    out.binding = Binding::Type1;
    return out;
}

LimitResult traversal_limit(const SequenceCoefficients& k, double ug_pos, Sequence sequence, double theta_i,
                            const OtherCurrent& fixed_other, const TraversalOptions& opts)
{
    if (!(opts.step > 0.0) || !(opts.ceiling > opts.step)) {
        throw std::invalid_argument("traversal needs step > 0 and ceiling > step");
    }
    LimitResult out;
    out.sequence = sequence;
    out.theta_i = theta_i;

    SolverOptions solver = opts.solver;
    auto first = probe(k, ug_pos, with_amplitude(sequence, theta_i, 0.0, fixed_other), solver);
    if (!first.found) {
        out.i_limit = 0.0;
        out.binding = binding_of(first.result);
        return out;
    }
    solver.warm_start = std::pair{first.result.delta_pos, first.result.delta_neg};

    const auto max_steps = static_cast<long>(std::floor(opts.ceiling / opts.step + 1e-9));
    double passed = 0.0;
    for (long n = 1; n <= max_steps; ++n) {
        const double amp = static_cast<double>(n) * opts.step;
        auto p = probe(k, ug_pos, with_amplitude(sequence, theta_i, amp, fixed_other), solver);
        if (!p.found) {
            out.binding = binding_of(p.result);
            double lo = passed;
            double hi = amp;
            for (int b = 0; b < opts.bisection_iterations; ++b) {
                const double mid = 0.5 * (lo + hi);
                auto q = probe(k, ug_pos, with_amplitude(sequence, theta_i, mid, fixed_other), solver);
                if (q.found) {
                    lo = mid;
                    solver.warm_start = std::pair{q.result.delta_pos, q.result.delta_neg};
                }
                else {
                    hi = mid;
                    out.binding = binding_of(q.result);
                }
            }
            out.i_limit = lo;
            return out;
        }
        passed = amp;
        solver.warm_start = std::pair{p.result.delta_pos, p.result.delta_neg};
    }
    out.i_limit = passed;
    out.binding = Binding::Ceiling;
    return out;
}

namespace {

std::vector<double> angle_grid(double angle_step)
{
    if (!(angle_step > 0.0)) {
        throw std::invalid_argument("angle_step must be positive");
    }
    std::vector<double> angles;
    const auto n = static_cast<long>(std::ceil(kTwoPi / angle_step - 1e-9));
    angles.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        angles.push_back(-kPi + static_cast<double>(i) * angle_step);
    }
    return angles;
}

} // namespace

RegionBoundary region_boundary(const SequenceCoefficients& k, double ug_pos, Sequence sequence,
                               const OtherCurrent& fixed_other, double angle_step, const TraversalOptions& opts)
{
    const auto angles = angle_grid(angle_step);
    RegionBoundary out;
    out.sequence = sequence;
    out.fixed_other = fixed_other;
    out.samples.resize(angles.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < angles.size(); i = next++) {
            const auto lim = traversal_limit(k, ug_pos, sequence, angles[i], fixed_other, opts);
            out.samples[i] = {angles[i], lim.i_limit, lim.binding};
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto n_threads = std::min<std::size_t>(hw, angles.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    return out;
}

RegionBoundary decoupled_region(const SequenceCoefficients& k, double ug_pos, Sequence sequence, double angle_step)
{
    RegionBoundary out;
    out.sequence = sequence;
    for (double a : angle_grid(angle_step)) {
        const auto lim = decoupled_limit(k, ug_pos, sequence, a);
        out.samples.push_back({a, lim.i_limit, lim.binding});
    }
    return out;
}

InstabilityType classify(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                         const SolverOptions& opts)
{
    try {
        if (solve_equilibrium(k, ref, ug_pos, opts).found) {
            return InstabilityType::Stable;
        }
    }
    catch (const NoConvergence&) {
        // borderline: fall through to the boundary test
    }

    auto excess = [&](Sequence seq, double amp, double theta) -> std::pair<double, Binding> {
        const Complex self = seq == Sequence::Pos ? k.z2 : k.z5;
        if (!(std::abs(self) > 0.0)) {
            return {-1.0, Binding::Type1};
        }
        const auto lim = decoupled_limit(k, ug_pos, seq, theta);
        if (std::isinf(lim.i_limit)) {
            return {-1.0, Binding::Type1};
        }
        if (lim.i_limit <= 0.0) {
            return {amp > 0.0 ? kInf : -1.0, lim.binding};
        }
        return {amp / lim.i_limit - 1.0, lim.binding};
    };
    const auto [ep, bp] = excess(Sequence::Pos, ref.i_pos, ref.theta_i_pos);
    const auto [en, bn] = excess(Sequence::Neg, ref.i_neg, ref.theta_i_neg);
    if (en > ep) {
        return bn == Binding::Type2 ? InstabilityType::NegType2 : InstabilityType::NegType1;
    }
    return bp == Binding::Type2 ? InstabilityType::PosType2 : InstabilityType::PosType1;
}

} // namespace seqsync
