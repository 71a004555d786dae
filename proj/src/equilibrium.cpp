#include "seqsync/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

namespace seqsync {

std::string_view to_string(Sequence s)
{
    return s == Sequence::Pos ? "pos" : "neg";
}

std::string_view to_string(InstabilityType t)
{
    switch (t) {
    case InstabilityType::Stable: return "STABLE";
    case InstabilityType::PosType1: return "POS_TYPE1";
    case InstabilityType::PosType2: return "POS_TYPE2";
    case InstabilityType::NegType1: return "NEG_TYPE1";
    case InstabilityType::NegType2: return "NEG_TYPE2";
    }
    return "?";
}

void CurrentReference::validate() const
{
    if (!(i_pos >= 0.0) || !(i_neg >= 0.0)) {
        throw std::invalid_argument("current amplitudes must be non-negative");
    }
}

namespace {

constexpr double kVacuous = 1e-12;

// u+ = a e^{-j dp} + b + c e^{j(dn - dp)}
// u- = d e^{-j dn} + e + f e^{j(dp - dn)}   (read as u_d- - j u_q-)
struct OrientationModel {
    Complex a, b, c, d, e, f;
    bool pos_vacuous = false;
    bool neg_vacuous = false;

    OrientationModel(const SequenceCoefficients& k, const CurrentReference& ref, double ug)
    {
        a = k.k1 * ug;
        b = k.z2 * ref.i_pos * unit(ref.theta_i_pos);
        c = k.z3 * ref.i_neg * unit(ref.theta_i_neg);
        d = k.k4 * ug;
        e = k.z5 * ref.i_neg * unit(ref.theta_i_neg);
        f = k.z6 * ref.i_pos * unit(ref.theta_i_pos);
        pos_vacuous = std::abs(a) < kVacuous && std::abs(b) < kVacuous && std::abs(c) < kVacuous;
        neg_vacuous = std::abs(d) < kVacuous && std::abs(e) < kVacuous && std::abs(f) < kVacuous;
    }

    struct Eval {
        Complex up;          // u_d+ + j u_q+
        Complex un;          // u_d- - j u_q-
        Complex dup_dp, dup_dn, dun_dp, dun_dn;
    };

    Eval eval(double dp, double dn) const
    {
        const Complex ep = unit(-dp);
        const Complex en = unit(-dn);
        const Complex cross_p = c * unit(dn - dp);
        const Complex cross_n = f * unit(dp - dn);
        const Complex j{0.0, 1.0};
        Eval r;
        r.up = a * ep + b + cross_p;
        r.un = d * en + e + cross_n;
        r.dup_dp = -j * (a * ep + cross_p);
        r.dup_dn = j * cross_p;
        r.dun_dn = -j * (d * en + cross_n);
        r.dun_dp = j * cross_n;
        return r;
    }

    // Residual (uq+, uq-) with a vacuous sequence pinned at angle 0.
    std::array<double, 2> residual(const Eval& v, double dp, double dn) const
    {
        return {pos_vacuous ? normalize_angle(dp) : v.up.imag(),
                neg_vacuous ? normalize_angle(dn) : -v.un.imag()};
    }

    std::array<double, 4> jacobian(const Eval& v) const
    {
        std::array<double, 4> jac{v.dup_dp.imag(), v.dup_dn.imag(), -v.dun_dp.imag(), -v.dun_dn.imag()};
        if (pos_vacuous) {
            jac[0] = 1.0;
            jac[1] = 0.0;
        }
        if (neg_vacuous) {
            jac[2] = 0.0;
            jac[3] = 1.0;
        }
        return jac;
    }
};

double norm2(const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); }
double norm_inf(const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); }

struct NewtonOutcome {
    bool converged = false;
    double dp = 0.0;
    double dn = 0.0;
    double residual = std::numeric_limits<double>::infinity();
};

NewtonOutcome newton(const OrientationModel& m, double dp, double dn, const SolverOptions& opts)
{
    NewtonOutcome out;
    auto v = m.eval(dp, dn);
    auto r = m.residual(v, dp, dn);
    for (int it = 0; it < opts.max_newton_iterations; ++it) {
        if (norm_inf(r) < opts.uq_tolerance) {
            out.converged = true;
            break;
        }
        const auto jac = m.jacobian(v);
        const double det = jac[0] * jac[3] - jac[1] * jac[2];
        if (std::abs(det) < 1e-300) {
            break;
        }
        double sp = -(jac[3] * r[0] - jac[1] * r[1]) / det;
        double sn = -(-jac[2] * r[0] + jac[0] * r[1]) / det;
        const double big = std::max(std::abs(sp), std::abs(sn));
        if (big > 0.5) {
            sp *= 0.5 / big;
            sn *= 0.5 / big;
        }
        const double r0 = norm2(r);
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 16; ++ls) {
            const double tp = dp + lambda * sp;
            const double tn = dn + lambda * sn;
            const auto tv = m.eval(tp, tn);
            const auto tr = m.residual(tv, tp, tn);
            if (norm2(tr) < r0) {
                dp = tp;
                dn = tn;
                v = tv;
                r = tr;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            break;
        }
    }
    out.dp = normalize_angle(dp);
    out.dn = normalize_angle(dn);
    out.residual = norm2(r);
    if (!out.converged && norm_inf(r) < opts.uq_tolerance) {
        out.converged = true;
    }
    return out;
}

EquilibriumResult assess(const OrientationModel& m, double dp, double dn, const SolverOptions& opts)
{
    const auto v = m.eval(dp, dn);
    const auto r = m.residual(v, dp, dn);
    EquilibriumResult res;
    res.delta_pos = dp;
    res.delta_neg = dn;
    res.ud_pos = v.up.real();
    res.uq_pos = v.up.imag();
    res.ud_neg = v.un.real();
    res.uq_neg = -v.un.imag();
    res.residual_norm = norm2(r);

    const bool pos_ok = m.pos_vacuous || res.ud_pos > opts.ud_threshold;
    const bool neg_ok = m.neg_vacuous || res.ud_neg > opts.ud_threshold;
    res.cond_orientation = pos_ok && neg_ok;

    const double slope_p = v.dup_dp.imag();
    const double slope_n = v.dun_dn.imag();   // = -d(uq-)/d(dn)
    res.cond_feedback = (m.pos_vacuous || slope_p < 0.0) && (m.neg_vacuous || slope_n < 0.0);

    res.found = res.cond_orientation && res.cond_feedback && norm_inf(r) < opts.uq_tolerance;
    if (res.found) {
        res.failure = EquilibriumFailure::None;
    }
    else if (res.cond_feedback) {
        res.failure = pos_ok ? EquilibriumFailure::ReversedNeg : EquilibriumFailure::ReversedPos;
    }
    else {
        res.failure = EquilibriumFailure::NoOrientation;
    }
    return res;
}

bool same_root(double a1, double b1, double a2, double b2)
{
    return std::abs(normalize_angle(a1 - a2)) < 1e-7 && std::abs(normalize_angle(b1 - b2)) < 1e-7;
}

} // namespace

DqVoltages dq_voltages(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                       double delta_pos, double delta_neg)
{
    const OrientationModel m(k, ref, ug_pos);
    const auto v = m.eval(delta_pos, delta_neg);
    return {v.up.real(), v.up.imag(), v.un.real(), -v.un.imag()};
}

std::pair<double, double> feedback_slopes(const SequenceCoefficients& k, const CurrentReference& ref,
                                          double ug_pos, double delta_pos, double delta_neg)
{
    const OrientationModel m(k, ref, ug_pos);
    const auto v = m.eval(delta_pos, delta_neg);
    return {v.dup_dp.imag(), v.dun_dn.imag()};
}

EquilibriumResult solve_equilibrium(const SequenceCoefficients& k, const CurrentReference& ref,
                                    double ug_pos, const SolverOptions& opts)
{
    const OrientationModel m(k, ref, ug_pos);

    std::vector<NewtonOutcome> roots;
    NewtonOutcome best_failed;
    auto try_seed = [&](double dp, double dn) -> std::optional<EquilibriumResult> {
        const auto nr = newton(m, dp, dn, opts);
        if (!nr.converged) {
            if (nr.residual < best_failed.residual) {
                best_failed = nr;
            }
            return std::nullopt;
        }
        for (const auto& r : roots) {
            if (same_root(r.dp, r.dn, nr.dp, nr.dn)) {
                return std::nullopt;
            }
        }
        roots.push_back(nr);
        auto res = assess(m, nr.dp, nr.dn, opts);
        if (res.found) {
            return res;
        }
        return std::nullopt;
    };

    if (opts.warm_start) {
        if (auto hit = try_seed(opts.warm_start->first, opts.warm_start->second)) {
            return *hit;
        }
    }

    const int n = std::max(4, static_cast<int>(std::lround(360.0 / opts.grid_step_deg)));
    const double h = kTwoPi / n;
    std::vector<double> rp(static_cast<std::size_t>(n) * n);
    std::vector<double> rn(rp.size());
    std::vector<double> rr(rp.size());
    auto idx = [n](int i, int j) { return static_cast<std::size_t>(((i % n) + n) % n) * n + ((j % n) + n) % n; };
    for (int i = 0; i < n; ++i) {
        const double dp = -kPi + i * h;
        for (int j = 0; j < n; ++j) {
            const double dn = -kPi + j * h;
            const auto v = m.eval(dp, dn);
            const auto r = m.residual(v, dp, dn);
            rp[idx(i, j)] = r[0];
            rn[idx(i, j)] = r[1];
            rr[idx(i, j)] = r[0] * r[0] + r[1] * r[1];
        }
    }

    struct Seed {
        double dp, dn, score;
    };
    std::vector<Seed> seeds;
    auto changes = [&](const std::vector<double>& g, int i, int j) {
        const double v0 = g[idx(i, j)];
        const double v1 = g[idx(i + 1, j)];
        const double v2 = g[idx(i, j + 1)];
        const double v3 = g[idx(i + 1, j + 1)];
        const double lo = std::min({v0, v1, v2, v3});
        const double hi = std::max({v0, v1, v2, v3});
        return lo <= 0.0 && hi >= 0.0;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (changes(rp, i, j) && changes(rn, i, j)) {
                const double dp = -kPi + (i + 0.5) * h;
                const double dn = -kPi + (j + 0.5) * h;
                const auto v = m.eval(dp, dn);
                const auto r = m.residual(v, dp, dn);
                seeds.push_back({dp, dn, norm2(r)});
            }
        }
    }
    // Local minima of the squared residual catch tangential roots that the
    // sign-change test can miss.
    std::vector<Seed> minima;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = rr[idx(i, j)];
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if ((di != 0 || dj != 0) && rr[idx(i + di, j + dj)] < v) {
                        is_min = false;
                        break;
                    }
                }
            }
            if (is_min) {
                minima.push_back({-kPi + i * h, -kPi + j * h, std::sqrt(v)});
            }
        }
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& x, const Seed& y) { return x.score < y.score; });
    std::sort(minima.begin(), minima.end(), [](const Seed& x, const Seed& y) { return x.score < y.score; });
    if (minima.size() > 16) {
        minima.resize(16);
    }
    seeds.insert(seeds.end(), minima.begin(), minima.end());

    for (const auto& s : seeds) {
        if (auto hit = try_seed(s.dp, s.dn)) {
            return *hit;
        }
    }

    if (roots.empty()) {
        if (best_failed.residual < 1e-6) {
            throw NoConvergence("Newton stalled near a vanishing residual",
                                assess(m, best_failed.dp, best_failed.dn, opts));
        }
        EquilibriumResult res;
        res.failure = EquilibriumFailure::NoOrientation;
        if (!minima.empty()) {
            res = assess(m, minima.front().dp, minima.front().dn, opts);
            res.found = false;
            res.failure = EquilibriumFailure::NoOrientation;
        }
        return res;
    }

    // Report the most informative rejected root: a stable-slope root that
    // only fails the d-axis sign tells a type-2 story.
    EquilibriumResult fallback = assess(m, roots.front().dp, roots.front().dn, opts);
    for (const auto& r : roots) {
        auto res = assess(m, r.dp, r.dn, opts);
        if (res.cond_feedback) {
            fallback = res;
            break;
        }
    }
    return fallback;
}

} // namespace seqsync
