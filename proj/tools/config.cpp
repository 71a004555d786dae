#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace seqsync::app {

using nlohmann::json;

namespace {

double parse_number(std::string_view s, std::string_view what)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("invalid number '" + std::string(s) + "' in " + std::string(what));
    }
    return v;
}

void check_keys(const json& obj, std::string_view section, std::initializer_list<std::string_view> allowed)
{
    if (!obj.is_object()) {
        throw ConfigError("section '" + std::string(section) + "' must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) {
            throw ConfigError("unknown key '" + key + "' in '" + std::string(section) + "'");
        }
    }
}

double get_number(const json& obj, const char* key, double fallback, std::string_view section)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError("'" + std::string(section) + "." + key + "' must be a number");
    }
    return v.get<double>();
}

bool get_bool(const json& obj, const char* key, bool fallback, std::string_view section)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) {
        throw ConfigError("'" + std::string(section) + "." + key + "' must be a boolean");
    }
    return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, std::string_view section)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError("'" + std::string(section) + "." + key + "' must be a string");
    }
    return v.get<std::string>();
}

double impedance_base(double kv, double mva) { return kv * kv / mva; }

BranchImpedance parse_branch(const json& v, const std::string& name, double z_base, const BranchImpedance& fallback)
{
    check_keys(v, name, {"r", "x", "xr", "r_ohm", "x_ohm"});
    const bool pu = v.contains("r") || v.contains("x") || v.contains("xr");
    const bool ohm = v.contains("r_ohm") || v.contains("x_ohm");
    if (pu && ohm) {
        throw ConfigError("'" + name + "' mixes per-unit and ohmic entries");
    }
    BranchImpedance b = fallback;
    if (ohm) {
        b.r = get_number(v, "r_ohm", 0.0, name) / z_base;
        b.x = get_number(v, "x_ohm", 0.0, name) / z_base;
    }
    else if (v.contains("xr")) {
        if (v.contains("r") || !v.contains("x")) {
            throw ConfigError("'" + name + "' with 'xr' needs 'x' and no 'r'");
        }
        const double ratio = get_number(v, "xr", 1.0, name);
        if (!(ratio > 0.0)) throw ConfigError("'" + name + ".xr' must be positive");
        b = BranchImpedance::from_xr_ratio(get_number(v, "x", 0.0, name), ratio);
    }
    else {
        b.r = get_number(v, "r", 0.0, name);
        b.x = get_number(v, "x", 0.0, name);
    }
    if (b.r < 0.0 || b.x < 0.0) {
        throw ConfigError("'" + name + "' needs r >= 0 and x >= 0");
    }
    return b;
}

Complex parse_impedance_value(const json& v, std::string_view what)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_string()) {
        const auto p = parse_phasor(v.get<std::string>());
        return std::polar(p.amplitude, p.angle);
    }
    if (v.is_object()) {
        check_keys(v, what, {"r", "x"});
        return {get_number(v, "r", 0.0, what), get_number(v, "x", 0.0, what)};
    }
    throw ConfigError("'" + std::string(what) + "' must be a number, phasor string or {r, x}");
}

CurrentReference parse_reference(const json& v, std::string_view what)
{
    check_keys(v, what, {"pos", "neg"});
    CurrentReference ref;
    if (v.contains("pos")) {
        if (!v.at("pos").is_string()) throw ConfigError(std::string(what) + ".pos must be an A@D string");
        const auto p = parse_phasor(v.at("pos").get<std::string>());
        ref.i_pos = p.amplitude;
        ref.theta_i_pos = p.angle;
    }
    if (v.contains("neg")) {
        if (!v.at("neg").is_string()) throw ConfigError(std::string(what) + ".neg must be an A@D string");
        const auto p = parse_phasor(v.at("neg").get<std::string>());
        ref.i_neg = p.amplitude;
        ref.theta_i_neg = p.angle;
    }
    return ref;
}

json branch_json(const BranchImpedance& b) { return {{"r", b.r}, {"x", b.x}}; }

} // namespace

Polar parse_phasor(std::string_view text)
{
    const auto at = text.find('@');
    Polar p;
    if (at == std::string_view::npos) {
        p.amplitude = parse_number(text, "phasor");
    }
    else {
        p.amplitude = parse_number(text.substr(0, at), "phasor amplitude");
        p.angle = deg_to_rad(parse_number(text.substr(at + 1), "phasor angle"));
    }
    if (p.amplitude < 0.0) {
        throw ConfigError("phasor amplitude must be non-negative: '" + std::string(text) + "'");
    }
    p.angle = normalize_angle(p.angle);
    return p;
}

std::string format_phasor(double amplitude, double angle_rad)
{
    std::ostringstream os;
    os.precision(12);
    os << amplitude << '@' << rad_to_deg(angle_rad);
    return os.str();
}

FaultSpec ConfigDocument::default_fault()
{
    FaultSpec f;
    f.type = FaultType::None;
    f.z_f = {ohms_to_pu(0.01), 0.0};
    f.t_on = 0.1;
    f.t_clear = 3.0;
    return f;
}

Scenario ConfigDocument::scenario() const
{
    Scenario s;
    s.circuit = circuit;
    s.fault = fault;
    s.ref_prefault = ref_prefault;
    s.ref_fault = ref_fault;
    s.sync = sync;
    s.sync.omega0 = circuit.omega0;
    s.t_end = t_end;
    s.dt = dt;
    s.freq_adaptive_z = freq_adaptive_z;
    s.record_interval = record_interval;
    return s;
}

ConfigDocument parse_config(const json& doc)
{
    check_keys(doc, "config", {"circuit", "fault", "current", "sync", "scenario", "solver"});
    ConfigDocument cfg;

    if (doc.contains("circuit")) {
        const auto& c = doc.at("circuit");
        check_keys(c, "circuit",
                   {"base_kv", "base_mva", "ug_pu", "ug_kv", "f0_hz", "theta_g_deg", "z_choke", "z_t1", "z_t2", "z_l1",
                    "z_l2", "z_g"});
        const double kv = get_number(c, "base_kv", 110.0, "circuit");
        const double mva = get_number(c, "base_mva", 9.0, "circuit");
        if (!(kv > 0.0) || !(mva > 0.0)) throw ConfigError("circuit bases must be positive");
        const double zb = impedance_base(kv, mva);
        if (c.contains("ug_pu") && c.contains("ug_kv")) throw ConfigError("give either ug_pu or ug_kv");
        if (c.contains("ug_kv")) cfg.circuit.ug_pos = get_number(c, "ug_kv", 120.0, "circuit") / kv;
        cfg.circuit.ug_pos = get_number(c, "ug_pu", cfg.circuit.ug_pos, "circuit");
        cfg.circuit.omega0 = kTwoPi * get_number(c, "f0_hz", 50.0, "circuit");
        cfg.circuit.theta_g = deg_to_rad(get_number(c, "theta_g_deg", 0.0, "circuit"));
        auto branch = [&](const char* key, BranchImpedance& b) {
            if (c.contains(key)) b = parse_branch(c.at(key), std::string("circuit.") + key, zb, b);
        };
        branch("z_choke", cfg.circuit.z_choke);
        branch("z_t1", cfg.circuit.z_t1);
        branch("z_t2", cfg.circuit.z_t2);
        branch("z_l1", cfg.circuit.z_l1);
        branch("z_l2", cfg.circuit.z_l2);
        branch("z_g", cfg.circuit.z_g);
        if (c.contains("z_f")) throw ConfigError("fault impedance belongs in 'fault'");

        if (doc.contains("fault") && doc.at("fault").contains("z_f_ohm")) {
            cfg.fault.z_f = parse_impedance_value(doc.at("fault").at("z_f_ohm"), "fault.z_f_ohm") / zb;
        }
    }
    else if (doc.contains("fault") && doc.at("fault").contains("z_f_ohm")) {
        cfg.fault.z_f = parse_impedance_value(doc.at("fault").at("z_f_ohm"), "fault.z_f_ohm") / impedance_base(110.0, 9.0);
    }

    if (doc.contains("fault")) {
        const auto& f = doc.at("fault");
        check_keys(f, "fault", {"type", "z_f", "z_f_ohm", "t_on", "t_clear"});
        if (f.contains("z_f") && f.contains("z_f_ohm")) throw ConfigError("give either fault.z_f or fault.z_f_ohm");
        try {
            cfg.fault.type = parse_fault_type(get_string(f, "type", "none", "fault"));
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (f.contains("z_f")) cfg.fault.z_f = parse_impedance_value(f.at("z_f"), "fault.z_f");
        cfg.fault.t_on = get_number(f, "t_on", cfg.fault.t_on, "fault");
        cfg.fault.t_clear = get_number(f, "t_clear", cfg.fault.t_clear, "fault");
    }

    if (doc.contains("current")) {
        const auto& c = doc.at("current");
        check_keys(c, "current", {"prefault", "fault"});
        if (c.contains("prefault")) cfg.ref_prefault = parse_reference(c.at("prefault"), "current.prefault");
        if (c.contains("fault")) cfg.ref_fault = parse_reference(c.at("fault"), "current.fault");
    }

    if (doc.contains("sync")) {
        const auto& s = doc.at("sync");
        check_keys(s, "sync", {"mode", "k", "kp_fll", "ki_fll", "kp_pll", "ki_pll"});
        try {
            if (s.contains("mode")) cfg.sync.mode = parse_sync_mode(get_string(s, "mode", "", "sync"));
        }
        catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        cfg.sync.k = get_number(s, "k", cfg.sync.k, "sync");
        cfg.sync.kp_fll = get_number(s, "kp_fll", cfg.sync.kp_fll, "sync");
        cfg.sync.ki_fll = get_number(s, "ki_fll", cfg.sync.ki_fll, "sync");
        cfg.sync.kp_pll = get_number(s, "kp_pll", cfg.sync.kp_pll, "sync");
        cfg.sync.ki_pll = get_number(s, "ki_pll", cfg.sync.ki_pll, "sync");
    }

    if (doc.contains("scenario")) {
        const auto& s = doc.at("scenario");
        check_keys(s, "scenario", {"t_end", "dt", "freq_adaptive_z", "record_interval"});
        cfg.t_end = get_number(s, "t_end", cfg.t_end, "scenario");
        cfg.dt = get_number(s, "dt", cfg.dt, "scenario");
        cfg.freq_adaptive_z = get_bool(s, "freq_adaptive_z", cfg.freq_adaptive_z, "scenario");
        cfg.record_interval = get_number(s, "record_interval", cfg.record_interval, "scenario");
    }

    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        check_keys(s, "solver",
                   {"grid_step_deg", "uq_tolerance", "ud_threshold", "max_newton_iterations", "step", "ceiling",
                    "bisection_iterations"});
        cfg.solver.grid_step_deg = get_number(s, "grid_step_deg", cfg.solver.grid_step_deg, "solver");
        cfg.solver.uq_tolerance = get_number(s, "uq_tolerance", cfg.solver.uq_tolerance, "solver");
        cfg.solver.ud_threshold = get_number(s, "ud_threshold", cfg.solver.ud_threshold, "solver");
        cfg.solver.max_newton_iterations =
            static_cast<int>(get_number(s, "max_newton_iterations", cfg.solver.max_newton_iterations, "solver"));
        cfg.traversal.step = get_number(s, "step", cfg.traversal.step, "solver");
        cfg.traversal.ceiling = get_number(s, "ceiling", cfg.traversal.ceiling, "solver");
        cfg.traversal.bisection_iterations =
            static_cast<int>(get_number(s, "bisection_iterations", cfg.traversal.bisection_iterations, "solver"));
        if (!(cfg.solver.grid_step_deg > 0.0) || !(cfg.solver.uq_tolerance > 0.0) ||
            cfg.solver.max_newton_iterations < 1 || cfg.traversal.bisection_iterations < 0) {
            throw ConfigError("solver settings out of range");
        }
    }
    cfg.traversal.solver = cfg.solver;

    try {
        cfg.circuit.validate();
        cfg.fault.validate();
        cfg.ref_prefault.validate();
        cfg.ref_fault.validate();
        cfg.sync.validate();
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

ConfigDocument load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path + "'");
    }
    json doc;
    try {
        in >> doc;
    }
    catch (const json::parse_error& e) {
        throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

json to_json(const ConfigDocument& cfg)
{
    const auto& c = cfg.circuit;
    json doc;
    doc["circuit"] = {{"ug_pu", c.ug_pos},
                      {"f0_hz", c.omega0 / kTwoPi},
                      {"theta_g_deg", rad_to_deg(c.theta_g)},
                      {"z_choke", branch_json(c.z_choke)},
                      {"z_t1", branch_json(c.z_t1)},
                      {"z_t2", branch_json(c.z_t2)},
                      {"z_l1", branch_json(c.z_l1)},
                      {"z_l2", branch_json(c.z_l2)},
                      {"z_g", branch_json(c.z_g)}};
    doc["fault"] = {{"type", std::string(to_string(cfg.fault.type))},
                    {"z_f", {{"r", cfg.fault.z_f.real()}, {"x", cfg.fault.z_f.imag()}}},
                    {"t_on", cfg.fault.t_on},
                    {"t_clear", cfg.fault.t_clear}};
    doc["current"] = {
        {"prefault",
         {{"pos", format_phasor(cfg.ref_prefault.i_pos, cfg.ref_prefault.theta_i_pos)},
          {"neg", format_phasor(cfg.ref_prefault.i_neg, cfg.ref_prefault.theta_i_neg)}}},
        {"fault",
         {{"pos", format_phasor(cfg.ref_fault.i_pos, cfg.ref_fault.theta_i_pos)},
          {"neg", format_phasor(cfg.ref_fault.i_neg, cfg.ref_fault.theta_i_neg)}}}};
    doc["sync"] = {{"mode", std::string(to_string(cfg.sync.mode))},
                   {"k", cfg.sync.k},
                   {"kp_fll", cfg.sync.kp_fll},
                   {"ki_fll", cfg.sync.ki_fll},
                   {"kp_pll", cfg.sync.kp_pll},
                   {"ki_pll", cfg.sync.ki_pll}};
    doc["scenario"] = {{"t_end", cfg.t_end},
                       {"dt", cfg.dt},
                       {"freq_adaptive_z", cfg.freq_adaptive_z},
                       {"record_interval", cfg.record_interval}};
    doc["solver"] = {{"grid_step_deg", cfg.solver.grid_step_deg},
                     {"uq_tolerance", cfg.solver.uq_tolerance},
                     {"ud_threshold", cfg.solver.ud_threshold},
                     {"max_newton_iterations", cfg.solver.max_newton_iterations},
                     {"step", cfg.traversal.step},
                     {"ceiling", cfg.traversal.ceiling},
                     {"bisection_iterations", cfg.traversal.bisection_iterations}};
    return doc;
}

} // namespace seqsync::app
