#include "seqsync/dynsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace seqsync {

TerminalVoltage terminal_voltage(const SequenceCoefficients& k, const CurrentReference& ref, double ug_pos,
                                 double theta_g, double theta_hat_pos, double theta_hat_neg)
{
    constexpr double third = kPi / 3.0;
    const Complex ip = ref.i_pos * unit(theta_hat_pos + ref.theta_i_pos);
    const Complex in = ref.i_neg * unit(theta_hat_neg + ref.theta_i_neg);
    TerminalVoltage v;
    v.u_pos = k.k1 * ug_pos * unit(theta_g - third) + k.z2 * ip + k.z3 * in * unit(-2.0 * third);
    v.u_neg = k.k4 * ug_pos * unit(theta_g + third) + k.z5 * in + k.z6 * ip * unit(2.0 * third);
    v.u = v.u_pos + std::conj(v.u_neg);
    return v;
}

std::pair<double, double> frame_angles(double delta_pos, double delta_neg, double theta_g)
{
    return {delta_pos + theta_g - kPi / 3.0, delta_neg + theta_g + kPi / 3.0};
}

std::pair<double, double> delta_angles(double theta_hat_pos, double theta_hat_neg, double theta_g)
{
    return {normalize_angle(theta_hat_pos - theta_g + kPi / 3.0),
            normalize_angle(theta_hat_neg - theta_g - kPi / 3.0)};
}

void Scenario::validate() const
{
    circuit.validate();
    fault.validate();
    ref_prefault.validate();
    ref_fault.validate();
    sync.validate();
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }
    if (!(fault.t_on >= 0.0 && fault.t_on < fault.t_clear && fault.t_clear <= t_end)) {
        throw std::invalid_argument("need 0 <= t_on < t_clear <= t_end");
    }
    if (!(record_interval >= dt)) {
        throw std::invalid_argument("record_interval must be at least dt");
    }
    if (omega_grid && !(*omega_grid > 0.0)) {
        throw std::invalid_argument("omega_grid must be positive");
    }
}

namespace {

constexpr double kTimeSlack = 1e-12;

SequenceCoefficients blend(const SequenceCoefficients& at_pos, const SequenceCoefficients& at_neg,
                           const SequenceCoefficients& nominal)
{
    return {nominal.k1, at_pos.z2, at_neg.z3, nominal.k4, at_neg.z5, at_pos.z6};
}

} // namespace

ScenarioModel::ScenarioModel(const Scenario& s)
    : scenario_(&s),
      paths_(compose_paths(s.circuit)),
      healthy_(healthy_coefficients(paths_)),
      faulted_(compute_coefficients(paths_, s.fault))
{
}

bool ScenarioModel::fault_active(double t) const
{
    const auto& f = scenario_->fault;
    return f.type != FaultType::None && t >= f.t_on - kTimeSlack && t < f.t_clear - kTimeSlack;
}

const CurrentReference& ScenarioModel::reference(double t) const
{
    const auto& f = scenario_->fault;
    const bool on = t >= f.t_on - kTimeSlack && t < f.t_clear - kTimeSlack;
    return on ? scenario_->ref_fault : scenario_->ref_prefault;
}

SequenceCoefficients ScenarioModel::coefficients(double t, double omega_pos, double omega_neg) const
{
    const bool on = fault_active(t);
    const auto& nominal = on ? faulted_ : healthy_;
    if (!scenario_->freq_adaptive_z) {
        return nominal;
    }
    const double w0 = scenario_->circuit.omega0;
    auto at = [&](double w) {
        const auto p = compose_paths(scenario_->circuit, w / w0);
        return on ? compute_coefficients(p, scenario_->fault) : healthy_coefficients(p);
    };
    if (omega_pos == omega_neg) {
        const auto c = at(omega_pos);
        return blend(c, c, nominal);
    }
    return blend(at(omega_pos), at(omega_neg), nominal);
}

SyncState ScenarioModel::settled_state() const
{
    const auto& s = *scenario_;
    const auto eq = solve_equilibrium(healthy_, s.ref_prefault, s.circuit.ug_pos);
    if (!eq.found) {
        throw std::invalid_argument("pre-fault reference admits no equilibrium");
    }
    const double w = s.grid_omega();
    const double w0 = s.sync.omega0;
    const auto [tp, tn] = frame_angles(eq.delta_pos, eq.delta_neg, s.circuit.theta_g);

    SyncState st;
    st.theta_pos = tp;
    st.theta_neg = tn;
    st.omega_hat = st.omega_pos = st.omega_neg = w;
    if (s.sync.mode == SyncMode::DsogiPll) {
        if (s.sync.ki_pll > 0.0) {
            st.xi_pos = (w - w0) / s.sync.ki_pll;
            st.xi_neg = -(w - w0) / s.sync.ki_pll;
        }
    }
    else if (s.sync.ki_fll > 0.0) {
        st.eps_fll = (w - w0) / s.sync.ki_fll;
    }
    const auto k = s.freq_adaptive_z ? coefficients(0.0, w, w) : healthy_;
    const auto tv = terminal_voltage(k, s.ref_prefault, s.circuit.ug_pos, s.circuit.theta_g, tp, tn);
    st.u_hat_pos = tv.u_pos;
    st.u_hat_neg = std::conj(tv.u_neg);
    return st;
}

namespace {

struct Derivative {
    Complex d_u_hat_pos;
    Complex d_u_hat_neg;
    double d_eps = 0.0;
    double d_theta_pos = 0.0;
    double d_theta_neg = 0.0;
    double d_xi_pos = 0.0;
    double d_xi_neg = 0.0;
};

SyncState advance(const SyncState& s, const Derivative& d, double h)
{
    SyncState r = s;
    r.u_hat_pos += h * d.d_u_hat_pos;
    r.u_hat_neg += h * d.d_u_hat_neg;
    r.eps_fll += h * d.d_eps;
    r.theta_pos += h * d.d_theta_pos;
    r.theta_neg += h * d.d_theta_neg;
    r.xi_pos += h * d.d_xi_pos;
    r.xi_neg += h * d.d_xi_neg;
    return r;
}

/// Angular rate of the phasor x moving with derivative dx.
double rate_of(Complex x, Complex dx, double fallback)
{
    const double m2 = std::norm(x);
    if (m2 < kAtanAmplitudeFloor * kAtanAmplitudeFloor) {
        return fallback;
    }
    return (dx * std::conj(x)).imag() / m2;
}

/// t_net selects the network and reference; a step holds it fixed so that a
/// switching instant on a step boundary is not sampled by the last stage.
Derivative rhs(const ScenarioModel& model, const SyncState& in, double t, double t_net, StepOutputs* out)
{
    const auto& sc = model.scenario();
    const auto& cfg = sc.sync;
    const double theta_g = sc.circuit.theta_g + sc.grid_omega() * t;
    const auto& ref = model.reference(t_net);

    SyncState s = in;
    Derivative d;
    TerminalVoltage tv;
    double f_pos = 0.0;
    double f_neg = 0.0;
    double frame_pos = s.theta_pos;
    double frame_neg = s.theta_neg;
    DqVoltages dq;

    if (cfg.mode == SyncMode::DsogiPll) {
        dq = extract_dq(s);
        const auto pll = pll_derivatives(s, dq, cfg);
        s.omega_pos = pll.omega_pos;
        s.omega_neg = pll.omega_neg;
        s.omega_hat = pll.omega_pos;
        const auto k = model.coefficients(t_net, s.omega_pos, s.omega_neg);
        tv = terminal_voltage(k, ref, sc.circuit.ug_pos, theta_g, frame_pos, frame_neg);
        const auto ccf = ccf_derivative(s, tv.u, cfg);
        d.d_u_hat_pos = ccf.d_u_hat_pos;
        d.d_u_hat_neg = ccf.d_u_hat_neg;
        d.d_theta_pos = pll.d_theta_pos;
        d.d_theta_neg = pll.d_theta_neg;
        d.d_xi_pos = pll.d_xi_pos;
        d.d_xi_neg = pll.d_xi_neg;
        f_pos = pll.omega_pos / kTwoPi;
        f_neg = pll.omega_neg / kTwoPi;
    }
    else {
        const auto ang = angle_by_atan_or_hold(s);
        // keep the unwrapped branch of the integrated angles
        frame_pos = s.theta_pos + normalize_angle(ang.theta_pos - s.theta_pos);
        frame_neg = s.theta_neg + normalize_angle(ang.theta_neg - s.theta_neg);
        // the proportional FLL path depends on the terminal voltage itself,
        // so the impedances follow the integrator's frequency only
        const double w_z = cfg.omega0 + cfg.ki_fll * s.eps_fll;
        const auto k = model.coefficients(t_net, w_z, w_z);
        tv = terminal_voltage(k, ref, sc.circuit.ug_pos, theta_g, frame_pos, frame_neg);
        const auto fll = fll_adaptation(s, tv.u, cfg);
        s.omega_hat = fll.omega_hat;
        const auto ccf = ccf_derivative(s, tv.u, cfg);
        d.d_u_hat_pos = ccf.d_u_hat_pos;
        d.d_u_hat_neg = ccf.d_u_hat_neg;
        d.d_eps = fll.d_eps;
        d.d_theta_pos = rate_of(s.u_hat_pos, ccf.d_u_hat_pos, s.omega_hat);
        d.d_theta_neg = -rate_of(s.u_hat_neg, ccf.d_u_hat_neg, -s.omega_hat);
        s.omega_pos = d.d_theta_pos;
        s.omega_neg = d.d_theta_neg;
        f_pos = d.d_theta_pos / kTwoPi;
        f_neg = d.d_theta_neg / kTwoPi;
        dq = extract_dq(s, frame_pos, frame_neg);
    }

    if (out != nullptr) {
        s.theta_pos = frame_pos;
        s.theta_neg = frame_neg;
        out->state = s;
        out->theta_pos = frame_pos;
        out->theta_neg = frame_neg;
        out->f_pos_hz = f_pos;
        out->f_neg_hz = f_neg;
        out->dq = dq;
        out->terminal = tv;
    }
    return d;
}

bool overflowed(const SyncState& s)
{
    auto bad = [](double v) { return !std::isfinite(v) || std::abs(v) > kOverflowMagnitude; };
    return bad(std::abs(s.u_hat_pos)) || bad(std::abs(s.u_hat_neg)) || bad(s.eps_fll) || bad(s.xi_pos) ||
           bad(s.xi_neg) || !std::isfinite(s.theta_pos) || !std::isfinite(s.theta_neg);
}

} // namespace

StepOutputs evaluate(const ScenarioModel& model, const SyncState& state, double t)
{
    StepOutputs out;
    rhs(model, state, t, t, &out);
    return out;
}

SyncState step(const ScenarioModel& model, const SyncState& s, double t, double dt)
{
    const double t_net = t + 0.5 * dt;
    const auto k1 = rhs(model, s, t, t_net, nullptr);
    const auto k2 = rhs(model, advance(s, k1, 0.5 * dt), t + 0.5 * dt, t_net, nullptr);
    const auto k3 = rhs(model, advance(s, k2, 0.5 * dt), t + 0.5 * dt, t_net, nullptr);
    const auto k4 = rhs(model, advance(s, k3, dt), t + dt, t_net, nullptr);

    Derivative sum;
    sum.d_u_hat_pos = k1.d_u_hat_pos + 2.0 * k2.d_u_hat_pos + 2.0 * k3.d_u_hat_pos + k4.d_u_hat_pos;
    sum.d_u_hat_neg = k1.d_u_hat_neg + 2.0 * k2.d_u_hat_neg + 2.0 * k3.d_u_hat_neg + k4.d_u_hat_neg;
    sum.d_eps = k1.d_eps + 2.0 * k2.d_eps + 2.0 * k3.d_eps + k4.d_eps;
    sum.d_theta_pos = k1.d_theta_pos + 2.0 * k2.d_theta_pos + 2.0 * k3.d_theta_pos + k4.d_theta_pos;
    sum.d_theta_neg = k1.d_theta_neg + 2.0 * k2.d_theta_neg + 2.0 * k3.d_theta_neg + k4.d_theta_neg;
    sum.d_xi_pos = k1.d_xi_pos + 2.0 * k2.d_xi_pos + 2.0 * k3.d_xi_pos + k4.d_xi_pos;
    sum.d_xi_neg = k1.d_xi_neg + 2.0 * k2.d_xi_neg + 2.0 * k3.d_xi_neg + k4.d_xi_neg;

    SyncState next = advance(s, sum, dt / 6.0);
    if (model.scenario().sync.mode == SyncMode::DsogiFll) {
        const auto ang = angle_by_atan_or_hold(next);
        next.theta_pos += normalize_angle(ang.theta_pos - next.theta_pos);
        next.theta_neg += normalize_angle(ang.theta_neg - next.theta_neg);
    }
    if (overflowed(next)) {
        throw NumericalOverflow("state magnitude exceeded overflow bound", t + dt);
    }
    return next;
}

std::string_view to_string(LosSignature s)
{
    switch (s) {
    case LosSignature::None: return "NONE";
    case LosSignature::Drift: return "DRIFT";
    case LosSignature::Chatter: return "CHATTER";
    }
    return "?";
}

namespace {

struct Detection {
    bool fired = false;
    double t = 0.0;
};

/// Mean frequency over each trailing sustain window, so that fast repeated
/// pole slips count as well as a steady offset.
Detection first_drift(const Trace& tr, std::size_t a, std::size_t b, const std::vector<double>& f,
                      const LosThresholds& th)
{
    std::size_t lo = a;
    double sum = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        sum += f[i];
        while (tr.t[i] - tr.t[lo] > th.drift_sustain_s + 1e-12) {
            sum -= f[lo++];
        }
        if (tr.t[i] - tr.t[lo] < th.drift_sustain_s - 1e-12) continue;
        const double mean = sum / static_cast<double>(i - lo + 1);
        if (std::abs(mean - th.f_nominal_hz) > th.drift_band_hz) {
            return {true, tr.t[lo]};
        }
    }
    return {};
}

Detection first_chatter(const Trace& tr, std::size_t a, std::size_t b, const std::vector<double>& f,
                        const std::vector<double>& ud, const LosThresholds& th)
{
    const double half = 0.5 * th.chatter_window_s;
    std::size_t lo = a;
    std::size_t hi = a;
    std::optional<double> first;
    double last = 0.0;
    for (std::size_t i = a; i < b; ++i) {
        while (lo < i && tr.t[lo] < tr.t[i] - half) ++lo;
        while (hi < b && tr.t[hi] <= tr.t[i] + half) ++hi;
        if (!(ud[i] < th.chatter_ud)) continue;
        const auto [mn, mx] = std::minmax_element(f.begin() + static_cast<long>(lo), f.begin() + static_cast<long>(hi));
        if (!(*mx - *mn > th.chatter_p2p_hz)) continue;
        if (!first || tr.t[i] - last > th.chatter_gap_s) {
            first = tr.t[i];
        }
        last = tr.t[i];
        if (last - *first >= th.chatter_sustain_s - 1e-12) {
            return {true, *first};
        }
    }
    return {};
}

} // namespace

LosVerdict detect_los(const Trace& tr, double t_begin, double t_end, const LosThresholds& th)
{
    const double from = t_begin + th.settle_s;
    std::size_t a = 0;
    while (a < tr.size() && tr.t[a] < from - 1e-12) ++a;
    std::size_t b = a;
    while (b < tr.size() && tr.t[b] < t_end - 1e-12) ++b;

    LosVerdict v;
    auto present = [&](const std::vector<double>& mag) {
        if (mag.size() != tr.size()) return true;
        for (std::size_t i = a; i < b; ++i) {
            if (mag[i] >= th.min_amplitude) return true;
        }
        return false;
    };
    auto consider = [&](const std::vector<double>& f, const std::vector<double>& ud, const std::vector<double>& mag,
                        InstabilityType drift_type, InstabilityType chatter_type) {
        if (!present(mag)) return;
        const auto chatter = first_chatter(tr, a, b, f, ud, th);
        const auto drift = first_drift(tr, a, b, f, th);
        if (!chatter.fired && !drift.fired) return;
        // a collapsing u_d marks the loss as chatter even when the mean frequency also departs
        const double t = chatter.fired && drift.fired ? std::min(chatter.t, drift.t) : (chatter.fired ? chatter.t : drift.t);
        if (v.lost && !(t < *v.t_los)) return;
        v.lost = true;
        v.t_los = t;
        v.dominant = chatter.fired ? chatter_type : drift_type;
        v.signature = chatter.fired ? LosSignature::Chatter : LosSignature::Drift;
    };
    consider(tr.f_pos_hz, tr.ud_pos, tr.umag_pos, InstabilityType::PosType1, InstabilityType::PosType2);
    consider(tr.f_neg_hz, tr.ud_neg, tr.umag_neg, InstabilityType::NegType1, InstabilityType::NegType2);

    if (tr.diverged && tr.t_diverged >= t_begin - 1e-12 && tr.t_diverged < t_end - 1e-12 && !v.lost) {
        v.lost = true;
        v.t_los = tr.t_diverged;
        v.signature = LosSignature::Drift;
        const bool pos = tr.size() == 0 || std::abs(tr.f_pos_hz.back() - th.f_nominal_hz) >=
                                               std::abs(tr.f_neg_hz.back() - th.f_nominal_hz);
        v.dominant = pos ? InstabilityType::PosType1 : InstabilityType::NegType1;
    }
    return v;
}

namespace {

void record(Trace& tr, const StepOutputs& o, double t, const ScenarioModel& model)
{
    const auto& sc = model.scenario();
    const auto& ref = model.reference(t);
    const double theta_g = sc.circuit.theta_g + sc.grid_omega() * t;
    const auto [dp, dn] = delta_angles(o.theta_pos, o.theta_neg, theta_g);
    tr.t.push_back(t);
    tr.f_pos_hz.push_back(o.f_pos_hz);
    tr.f_neg_hz.push_back(o.f_neg_hz);
    tr.theta_pos.push_back(normalize_angle(o.theta_pos));
    tr.theta_neg.push_back(normalize_angle(o.theta_neg));
    tr.ud_pos.push_back(o.dq.ud_pos);
    tr.uq_pos.push_back(o.dq.uq_pos);
    tr.ud_neg.push_back(o.dq.ud_neg);
    tr.uq_neg.push_back(o.dq.uq_neg);
    tr.umag_pos.push_back(std::abs(o.state.u_hat_pos));
    tr.umag_neg.push_back(std::abs(o.state.u_hat_neg));
    tr.i_pos.push_back(ref.i_pos);
    tr.i_neg.push_back(ref.i_neg);
    tr.delta_pos.push_back(dp);
    tr.delta_neg.push_back(dn);
}

} // namespace

RunResult run_scenario(const Scenario& sc, const LosThresholds& th)
{
    sc.validate();
    const ScenarioModel model(sc);
    SyncState s = sc.initial ? *sc.initial : model.settled_state();

    const auto n_steps = static_cast<long>(std::llround(sc.t_end / sc.dt));
    const long stride = std::max(1L, static_cast<long>(std::llround(sc.record_interval / sc.dt)));

    RunResult res;
    auto& tr = res.trace;
    tr.t.reserve(static_cast<std::size_t>(n_steps / stride + 2));
    record(tr, evaluate(model, s, 0.0), 0.0, model);
    double t = 0.0;
    for (long n = 0; n < n_steps; ++n) {
        t = static_cast<double>(n) * sc.dt;
        try {
            s = step(model, s, t, sc.dt);
        }
        catch (const NumericalOverflow& e) {
            tr.diverged = true;
            tr.t_diverged = e.time;
            break;
        }
        t = static_cast<double>(n + 1) * sc.dt;
        if ((n + 1) % stride == 0) {
            record(tr, evaluate(model, s, t), t, model);
        }
    }
    res.final_state = s;
    res.final_outputs = evaluate(model, s, t);
    res.verdict = detect_los(tr, sc.fault.t_on, std::min(sc.fault.t_clear, sc.t_end), th);
    return res;
}

void write_trace_csv(std::ostream& os, const Trace& tr)
{
    os << "t,f_pos_hz,f_neg_hz,theta_pos,theta_neg,ud_pos,uq_pos,ud_neg,uq_neg,umag_pos,umag_neg\n";
    char buf[32];
    auto put = [&](double v, bool last) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << buf << (last ? '\n' : ',');
    };
    for (std::size_t i = 0; i < tr.size(); ++i) {
        put(tr.t[i], false);
        put(tr.f_pos_hz[i], false);
        put(tr.f_neg_hz[i], false);
        put(tr.theta_pos[i], false);
        put(tr.theta_neg[i], false);
        put(tr.ud_pos[i], false);
        put(tr.uq_pos[i], false);
        put(tr.ud_neg[i], false);
        put(tr.uq_neg[i], false);
        put(tr.umag_pos[i], false);
        put(tr.umag_neg[i], true);
    }
}

} // namespace seqsync
