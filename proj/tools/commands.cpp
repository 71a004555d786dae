#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "svg.hpp"

namespace seqsync::app {

using nlohmann::json;

namespace {

std::string fmt(double v, const char* spec = "%.6g")
{
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

Sequence parse_sequence(const std::string& s)
{
    if (s == "pos" || s == "+") return Sequence::Pos;
    if (s == "neg" || s == "-") return Sequence::Neg;
    throw ConfigError("--seq must be 'pos' or 'neg', got '" + s + "'");
}

json complex_json(Complex z)
{
    return {{"magnitude", std::abs(z)}, {"angle_deg", rad_to_deg(angle(z))}, {"re", z.real()}, {"im", z.imag()}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    return f;
}

SequenceCoefficients fault_coefficients(const ConfigDocument& cfg)
{
    return compute_coefficients(compose_paths(cfg.circuit), cfg.fault);
}

OtherCurrent other_current(const CommandOptions& opts, const ConfigDocument& cfg, Sequence seq)
{
    if (opts.other) {
        const auto p = parse_phasor(*opts.other);
        return {p.amplitude, p.angle};
    }
    // the held sequence defaults to the configured on-fault reference
    if (seq == Sequence::Pos) return {cfg.ref_fault.i_neg, cfg.ref_fault.theta_i_neg};
    return {cfg.ref_fault.i_pos, cfg.ref_fault.theta_i_pos};
}

TraversalOptions traversal_options(const CommandOptions& opts, const ConfigDocument& cfg)
{
    auto t = cfg.traversal;
    if (opts.step) t.step = *opts.step;
    if (!(t.step > 0.0) || !(t.ceiling > t.step)) throw ConfigError("need step > 0 and ceiling > step");
    return t;
}

int cmd_coeffs(const CommandOptions& opts, std::ostream& out)
{
    const auto cfg = resolve_config(opts);
    const auto k = fault_coefficients(cfg);
    if (opts.json) {
        out << coefficients_json(k, cfg.fault.type).dump(2) << '\n';
        return kExitOk;
    }
    const std::pair<const char*, Complex> rows[] = {{"k1", k.k1}, {"z2", k.z2}, {"z3", k.z3},
                                                    {"k4", k.k4}, {"z5", k.z5}, {"z6", k.z6}};
    out << "fault " << to_string(cfg.fault.type) << '\n';
    for (const auto& [name, z] : rows) {
        out << name << " = " << fmt(std::abs(z)) << "∠" << fmt(rad_to_deg(angle(z))) << "°  ("
            << fmt(z.real()) << (z.imag() < 0 ? " - j" : " + j") << fmt(std::abs(z.imag())) << ")\n";
    }
    return kExitOk;
}

int cmd_limit(const CommandOptions& opts, std::ostream& out)
{
    const auto cfg = resolve_config(opts);
    const auto k = fault_coefficients(cfg);
    const auto seq = parse_sequence(opts.seq);
    const double theta = deg_to_rad(opts.angle_deg);
    const auto r = opts.decoupled
                       ? decoupled_limit(k, cfg.circuit.ug_pos, seq, theta)
                       : traversal_limit(k, cfg.circuit.ug_pos, seq, theta, other_current(opts, cfg, seq),
                                         traversal_options(opts, cfg));
    if (opts.json) {
        out << limit_json(r).dump(2) << '\n';
    }
    else {
        out << (std::isfinite(r.i_limit) ? fmt(r.i_limit) : std::string("inf")) << ' ' << to_string(r.binding) << '\n';
    }
    return kExitOk;
}

int cmd_region(const CommandOptions& opts, std::ostream& out)
{
    const auto cfg = resolve_config(opts);
    const auto k = fault_coefficients(cfg);
    const auto seq = parse_sequence(opts.seq);
    if (!(opts.angle_step_deg > 0.0)) throw ConfigError("--angle-step must be positive");
    const double step = deg_to_rad(opts.angle_step_deg);
    const auto decoupled = decoupled_region(k, cfg.circuit.ug_pos, seq, step);
    const auto region = opts.decoupled ? decoupled
                                       : region_boundary(k, cfg.circuit.ug_pos, seq, other_current(opts, cfg, seq),
                                                         step, traversal_options(opts, cfg));
    if (opts.out.empty()) {
        write_region_csv(out, region);
    }
    else {
        auto f = open_output(opts.out);
        write_region_csv(f, region);
    }
    if (!opts.svg.empty()) {
        auto f = open_output(opts.svg);
        std::vector<RegionBoundary> regions{region};
        std::vector<std::string> labels{opts.decoupled ? "decoupled" : "coupled"};
        if (!opts.decoupled) {
            regions.push_back(decoupled);
            labels.emplace_back("decoupled");
        }
        f << region_svg(regions, labels);
    }
    return kExitOk;
}

int cmd_equilibrium(const CommandOptions& opts, std::ostream& out)
{
    const auto cfg = resolve_config(opts);
    const auto k = fault_coefficients(cfg);
    const auto r = solve_equilibrium(k, cfg.ref_fault, cfg.circuit.ug_pos, cfg.solver);
    auto rec = equilibrium_json(r);
    rec["classification"] = std::string(to_string(classify(k, cfg.ref_fault, cfg.circuit.ug_pos, cfg.solver)));
    out << rec.dump(2) << '\n';
    return r.found ? kExitOk : kExitNoEquilibrium;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out)
{
    const auto cfg = resolve_config(opts);
    const auto res = run_scenario(cfg.scenario());
    if (!opts.out.empty()) {
        auto f = open_output(opts.out);
        write_trace_csv(f, res.trace);
    }
    if (!opts.svg.empty()) {
        auto f = open_output(opts.svg);
        f << trace_svg(res.trace);
    }
    const auto v = verdict_json(res.verdict, res.trace).dump(2);
    if (opts.verdict.empty()) {
        out << v << '\n';
    }
    else {
        auto f = open_output(opts.verdict);
        f << v << '\n';
    }
    return kExitOk;
}

int cmd_validate(const CommandOptions& opts, std::ostream& out)
{
    const auto c = compare_with_model(opts.draws, opts.seed);
    const auto rec = validation_json(c);
    out << rec.dump(2) << '\n';
    return rec.at("pass").get<bool>() ? kExitOk : kExitNumerical;
}

int cmd_config(const CommandOptions& opts, std::ostream& out)
{
    out << to_json(resolve_config(opts)).dump(2) << '\n';
    return kExitOk;
}

void require(const json& r, const char* key, json::value_t type, bool nullable = false)
{
    if (!r.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    const auto& v = r.at(key);
    if (nullable && v.is_null()) return;
    const bool ok = type == json::value_t::number_float ? v.is_number() : v.type() == type;
    if (!ok) throw ConfigError(std::string("field '") + key + "' has the wrong type");
}

void require_only(const json& r, std::initializer_list<const char*> keys)
{
    for (const auto& [key, _] : r.items()) {
        bool ok = false;
        for (const char* k : keys) ok = ok || key == k;
        if (!ok) throw ConfigError("unexpected field '" + key + "'");
    }
}

void require_enum(const json& r, const char* key, std::initializer_list<const char*> values)
{
    const auto s = r.at(key).get<std::string>();
    for (const char* v : values) {
        if (s == v) return;
    }
    throw ConfigError(std::string("field '") + key + "' has unknown value '" + s + "'");
}

} // namespace

ConfigDocument resolve_config(const CommandOptions& opts)
{
    ConfigDocument cfg = opts.config_path.empty() ? parse_config(json::object()) : load_config(opts.config_path);
    try {
        if (opts.fault) cfg.fault.type = parse_fault_type(*opts.fault);
        if (opts.mode) cfg.sync.mode = parse_sync_mode(*opts.mode);
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (opts.zf) {
        const auto p = parse_phasor(*opts.zf);
        cfg.fault.z_f = std::polar(p.amplitude, p.angle);
    }
    if (opts.iplus) {
        const auto p = parse_phasor(*opts.iplus);
        cfg.ref_fault.i_pos = p.amplitude;
        cfg.ref_fault.theta_i_pos = p.angle;
    }
    if (opts.iminus) {
        const auto p = parse_phasor(*opts.iminus);
        cfg.ref_fault.i_neg = p.amplitude;
        cfg.ref_fault.theta_i_neg = p.angle;
    }
    if (opts.dt) cfg.dt = *opts.dt;
    if (opts.t_end) {
        cfg.t_end = *opts.t_end;
        cfg.fault.t_clear = std::min(cfg.fault.t_clear, cfg.t_end);
    }
    try {
        cfg.fault.validate();
        cfg.scenario().validate();
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

int run_command(std::string_view name, const CommandOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        if (name == "coeffs") return cmd_coeffs(opts, out);
        if (name == "limit") return cmd_limit(opts, out);
        if (name == "region") return cmd_region(opts, out);
        if (name == "equilibrium") return cmd_equilibrium(opts, out);
        if (name == "simulate") return cmd_simulate(opts, out);
        if (name == "validate") return cmd_validate(opts, out);
        if (name == "config") return cmd_config(opts, out);
        err << "unknown command '" << name << "'\n";
        return kExitConfig;
    }
    catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const NoConvergence& e) {
        err << "numerical failure: " << e.what() << '\n';
        out << equilibrium_json(e.best_candidate).dump(2) << '\n';
        return kExitNumerical;
    }
    catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

json coefficients_json(const SequenceCoefficients& k, FaultType type)
{
    return {{"fault", std::string(to_string(type))}, {"k1", complex_json(k.k1)}, {"z2", complex_json(k.z2)},
            {"z3", complex_json(k.z3)},              {"k4", complex_json(k.k4)}, {"z5", complex_json(k.z5)},
            {"z6", complex_json(k.z6)}};
}

json limit_json(const LimitResult& r)
{
    return {{"sequence", std::string(to_string(r.sequence))},
            {"theta_i_deg", rad_to_deg(r.theta_i)},
            {"i_limit", number_or_null(r.i_limit)},
            {"binding", std::string(to_string(r.binding))}};
}

json equilibrium_json(const EquilibriumResult& r)
{
    const char* failure = "none";
    switch (r.failure) {
    case EquilibriumFailure::None: failure = "none"; break;
    case EquilibriumFailure::NoOrientation: failure = "no_orientation"; break;
    case EquilibriumFailure::ReversedPos: failure = "reversed_pos"; break;
    case EquilibriumFailure::ReversedNeg: failure = "reversed_neg"; break;
    }
    return {{"found", r.found},
            {"delta_pos_deg", rad_to_deg(r.delta_pos)},
            {"delta_neg_deg", rad_to_deg(r.delta_neg)},
            {"ud_pos", r.ud_pos},
            {"uq_pos", r.uq_pos},
            {"ud_neg", r.ud_neg},
            {"uq_neg", r.uq_neg},
            {"cond_orientation", r.cond_orientation},
            {"cond_feedback", r.cond_feedback},
            {"residual_norm", r.residual_norm},
            {"failure", failure}};
}

json verdict_json(const LosVerdict& v, const Trace& tr)
{
    json rec = {{"lost", v.lost},
                {"t_los", v.t_los ? json(*v.t_los) : json(nullptr)},
                {"dominant", std::string(to_string(v.dominant))},
                {"signature", std::string(to_string(v.signature))},
                {"diverged", tr.diverged},
                {"t_diverged", tr.diverged ? json(tr.t_diverged) : json(nullptr)}};
    if (tr.size() > 0) {
        rec["final"] = {{"t", tr.t.back()},
                        {"delta_pos_deg", number_or_null(rad_to_deg(tr.delta_pos.back()))},
                        {"delta_neg_deg", number_or_null(rad_to_deg(tr.delta_neg.back()))},
                        {"ud_pos", number_or_null(tr.ud_pos.back())},
                        {"ud_neg", number_or_null(tr.ud_neg.back())},
                        {"f_pos_hz", number_or_null(tr.f_pos_hz.back())},
                        {"f_neg_hz", number_or_null(tr.f_neg_hz.back())}};
    }
    return rec;
}

json validation_json(const OracleComparison& c)
{
    const bool pass = c.max_relative_error < 1e-9 && c.max_kirchhoff_residual < 1e-10;
    return {{"draws", c.draws},
            {"max_relative_error", c.max_relative_error},
            {"max_kirchhoff_residual", c.max_kirchhoff_residual},
            {"pass", pass}};
}

void check_result_schema(const json& r, ResultKind kind)
{
    using vt = json::value_t;
    constexpr auto num = vt::number_float;
    if (!r.is_object()) throw ConfigError("result must be an object");
    switch (kind) {
    case ResultKind::Coefficients:
        require_only(r, {"fault", "k1", "z2", "z3", "k4", "z5", "z6"});
        require(r, "fault", vt::string);
        require_enum(r, "fault", {"none", "slg", "dlg", "ll", "tlg"});
        for (const char* key : {"k1", "z2", "z3", "k4", "z5", "z6"}) {
            require(r, key, vt::object);
            const auto& c = r.at(key);
            require_only(c, {"magnitude", "angle_deg", "re", "im"});
            for (const char* f : {"magnitude", "angle_deg", "re", "im"}) require(c, f, num);
        }
        break;
    case ResultKind::Limit:
        require_only(r, {"sequence", "theta_i_deg", "i_limit", "binding"});
        require(r, "sequence", vt::string);
        require_enum(r, "sequence", {"pos", "neg"});
        require(r, "theta_i_deg", num);
        require(r, "i_limit", num, true);
        require(r, "binding", vt::string);
        require_enum(r, "binding", {"TYPE1", "TYPE2", "CEILING"});
        break;
    case ResultKind::Equilibrium:
        require_only(r, {"found", "delta_pos_deg", "delta_neg_deg", "ud_pos", "uq_pos", "ud_neg", "uq_neg",
                         "cond_orientation", "cond_feedback", "residual_norm", "failure", "classification"});
        require(r, "found", vt::boolean);
        for (const char* f : {"delta_pos_deg", "delta_neg_deg", "ud_pos", "uq_pos", "ud_neg", "uq_neg", "residual_norm"}) {
            require(r, f, num);
        }
        require(r, "cond_orientation", vt::boolean);
        require(r, "cond_feedback", vt::boolean);
        require(r, "failure", vt::string);
        require_enum(r, "failure", {"none", "no_orientation", "reversed_pos", "reversed_neg"});
        if (r.contains("classification")) {
            require(r, "classification", vt::string);
            require_enum(r, "classification", {"STABLE", "POS_TYPE1", "POS_TYPE2", "NEG_TYPE1", "NEG_TYPE2"});
        }
        break;
    case ResultKind::Verdict:
        require_only(r, {"lost", "t_los", "dominant", "signature", "diverged", "t_diverged", "final"});
        require(r, "lost", vt::boolean);
        require(r, "t_los", num, true);
        require(r, "dominant", vt::string);
        require_enum(r, "dominant", {"STABLE", "POS_TYPE1", "POS_TYPE2", "NEG_TYPE1", "NEG_TYPE2"});
        require(r, "signature", vt::string);
        require_enum(r, "signature", {"NONE", "DRIFT", "CHATTER"});
        require(r, "diverged", vt::boolean);
        require(r, "t_diverged", num, true);
        if (r.contains("final")) {
            const auto& f = r.at("final");
            require_only(f, {"t", "delta_pos_deg", "delta_neg_deg", "ud_pos", "ud_neg", "f_pos_hz", "f_neg_hz"});
            require(f, "t", num);
            for (const char* k : {"delta_pos_deg", "delta_neg_deg", "ud_pos", "ud_neg", "f_pos_hz", "f_neg_hz"}) {
                require(f, k, num, true);
            }
        }
        break;
    case ResultKind::Validation:
        require_only(r, {"draws", "max_relative_error", "max_kirchhoff_residual", "pass"});
        require(r, "draws", vt::number_unsigned);
        require(r, "max_relative_error", num);
        require(r, "max_kirchhoff_residual", num);
        require(r, "pass", vt::boolean);
        break;
    }
}

void write_region_csv(std::ostream& os, const RegionBoundary& region)
{
    os << "theta_deg,i_limit_pu,binding\n";
    for (const auto& s : region.samples) {
        os << fmt(rad_to_deg(s.theta_i), "%.12g") << ','
           << (std::isfinite(s.i_limit) ? fmt(s.i_limit, "%.12g") : std::string("inf")) << ','
           << to_string(s.binding) << '\n';
    }
}

} // namespace seqsync::app
