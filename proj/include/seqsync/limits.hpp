#pragma once

#include <vector>

#include "seqsync/equilibrium.hpp"

namespace seqsync {

enum class Binding { Type1, Type2, Ceiling };

std::string_view to_string(Binding b);

/// Amplitude limit of one sequence's injection at a fixed current angle.
/// i_limit is +inf for an unbounded decoupled limit.
struct LimitResult {
    Sequence sequence = Sequence::Pos;
    double theta_i = 0.0;
    double i_limit = 0.0;
    Binding binding = Binding::Type1;
};

/// Current of the sequence that is held fixed during a traversal.
struct OtherCurrent {
    double amplitude = 0.0;
    double angle = 0.0;
};

struct TraversalOptions {
    double step = 0.01;
    double ceiling = 3.0;
    /// Bisection passes after the last passing step; 0 keeps step-grid values.
    int bisection_iterations = 0;
    SolverOptions solver;
};

/// Closed-form limit with the coupling impedances ignored.
///
/// With x = phi + theta_i (phi the angle of z2 or z5) and r = |K| U_g / |Z|:
/// the orientation (type-1) limit is r / sin|x|; when the impedance drop
/// opposes the grid contribution (cos x < 0) the d-axis (type-2) limit r is
/// the tighter one. An unbounded result is reported as +inf with CEILING.
LimitResult decoupled_limit(const SequenceCoefficients& k, double ug_pos, Sequence sequence, double theta_i);

/// Coupled limit: amplitude raised from zero in fixed steps, each checked
/// with the full equilibrium solver, until no equilibrium remains.
LimitResult traversal_limit(const SequenceCoefficients& k, double ug_pos, Sequence sequence, double theta_i,
                            const OtherCurrent& fixed_other, const TraversalOptions& opts = {});

struct RegionSample {
    double theta_i = 0.0;
    double i_limit = 0.0;
    Binding binding = Binding::Type1;
};

struct RegionBoundary {
    Sequence sequence = Sequence::Pos;
    OtherCurrent fixed_other;
    std::vector<RegionSample> samples;   // theta_i strictly increasing over [-pi, pi)
};

/// Allowable-region boundary swept over theta_i in [-pi, pi). Angles are
/// evaluated in parallel.
RegionBoundary region_boundary(const SequenceCoefficients& k, double ug_pos, Sequence sequence,
                               const OtherCurrent& fixed_other, double angle_step,
                               const TraversalOptions& opts = {});

/// Region boundary from the closed-form limits, same angle grid.
RegionBoundary decoupled_region(const SequenceCoefficients& k, double ug_pos, Sequence sequence,
                                double angle_step);

} // namespace seqsync
