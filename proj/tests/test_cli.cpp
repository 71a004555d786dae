#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "oracles.hpp"

using namespace seqsync;
using namespace seqsync::app;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::string_view name, const CommandOptions& o)
{
    std::ostringstream out, err;
    const int code = run_command(name, o, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("phasor strings")
{
    const auto p = parse_phasor("0.5@-30");
    CHECK(p.amplitude == 0.5);
    CHECK(rad_to_deg(p.angle) == doctest::Approx(-30.0));
    CHECK(parse_phasor("0.7").angle == 0.0);
    CHECK_THROWS_AS(parse_phasor("-1@0"), ConfigError);
    CHECK_THROWS_AS(parse_phasor("abc"), ConfigError);
    CHECK_THROWS_AS(parse_phasor("1@"), ConfigError);
    const auto back = parse_phasor(format_phasor(0.25, deg_to_rad(90.0)));
    CHECK(back.amplitude == doctest::Approx(0.25));
    CHECK(rad_to_deg(back.angle) == doctest::Approx(90.0));
}

TEST_CASE("config schema rejects unknown keys")
{
    CHECK_THROWS_AS(parse_config(json::parse(R"({"circiut": {}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"fault": {"type": "slg", "zf": 0}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"circuit": {"z_g": {"r": 0.1, "y": 1}}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"sync": {"k": "big"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"fault": {"type": "abc"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"circuit": {"z_g": {"r": 0.1, "r_ohm": 1}}})")), ConfigError);
}

TEST_CASE("branch forms")
{
    const auto cfg = parse_config(json::parse(R"({
        "circuit": {"z_g": {"x": 0.3, "xr": 10}, "z_l1": {"r_ohm": 13.4444, "x_ohm": 134.444}},
        "fault": {"type": "dlg", "z_f_ohm": 0.01}
    })"));
    CHECK(cfg.circuit.z_g.r == doctest::Approx(0.03));
    CHECK(cfg.circuit.z_g.x == doctest::Approx(0.3));
    CHECK(cfg.circuit.z_l1.r == doctest::Approx(13.4444 / (110.0 * 110.0 / 9.0)));
    CHECK(cfg.circuit.z_l1.x == doctest::Approx(134.444 / (110.0 * 110.0 / 9.0)));
    CHECK(cfg.fault.type == FaultType::DLG);
    CHECK(cfg.fault.z_f.real() == doctest::Approx(ohms_to_pu(0.01)));
}

TEST_CASE("config round trip")
{
    const auto a = parse_config(json::parse(R"({
        "fault": {"type": "ll", "z_f": "0.002@10", "t_on": 0.2, "t_clear": 1.5},
        "current": {"fault": {"pos": "0.6@-30", "neg": "0.4@90"}},
        "sync": {"mode": "dsogi_pll", "kp_pll": 50},
        "scenario": {"t_end": 2, "dt": 5e-5, "freq_adaptive_z": false}
    })"));
    const auto b = parse_config(to_json(a));
    CHECK(to_json(a) == to_json(b));
    CHECK(b.fault.type == FaultType::LL);
    CHECK(b.fault.t_clear == 1.5);
    CHECK(b.ref_fault.i_pos == doctest::Approx(0.6));
    CHECK(rad_to_deg(b.ref_fault.theta_i_neg) == doctest::Approx(90.0));
    CHECK(b.sync.mode == SyncMode::DsogiPll);
    CHECK(b.sync.kp_pll == 50.0);
    CHECK(b.dt == 5e-5);
    CHECK_FALSE(b.freq_adaptive_z);
    CHECK(b.scenario().sync.omega0 == doctest::Approx(b.circuit.omega0));
}

TEST_CASE("coeffs command")
{
    CommandOptions o;
    o.fault = "slg";
    o.zf = "0";
    o.json = true;
    const auto r = run("coeffs", o);
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK_NOTHROW(check_result_schema(j, ResultKind::Coefficients));
    CHECK(j.at("k4").at("magnitude").get<double>() == doctest::Approx(testing::kSlgK4Magnitude).epsilon(1e-6));
    CHECK(j.at("z5").at("magnitude").get<double>() == doctest::Approx(testing::kSlgZ5Magnitude).epsilon(1e-6));

    o.json = false;
    const auto text = run("coeffs", o);
    CHECK(text.out.find("k4 = 0.25558") != std::string::npos);
}

TEST_CASE("limit command")
{
    CommandOptions o;
    o.fault = "dlg";
    o.seq = "pos";
    o.angle_deg = -30.0;
    o.other = "0.5@90";
    o.step = 0.01;
    const auto text = run("limit", o);
    REQUIRE(text.code == kExitOk);
    CHECK(text.out.rfind("0.76 TYPE1", 0) == 0);
    o.json = true;
    const auto j = json::parse(run("limit", o).out);
    CHECK_NOTHROW(check_result_schema(j, ResultKind::Limit));
    CHECK(j.at("i_limit").get<double>() == doctest::Approx(0.76));

    o.decoupled = true;
    o.angle_deg = 90.0;
    o.fault = "ll";
    const auto d = json::parse(run("limit", o).out);
    CHECK_NOTHROW(check_result_schema(d, ResultKind::Limit));
    CHECK(d.at("binding") == "TYPE2");
}

TEST_CASE("equilibrium command")
{
    CommandOptions o;
    o.fault = "dlg";
    o.iplus = "0.76@-30";
    o.iminus = "0.5@90";
    const auto ok = run("equilibrium", o);
    CHECK(ok.code == kExitOk);
    const auto j = json::parse(ok.out);
    CHECK_NOTHROW(check_result_schema(j, ResultKind::Equilibrium));
    CHECK(j.at("found") == true);
    CHECK(j.at("classification") == "STABLE");

    o.iplus = "0.85@-30";
    const auto lost = run("equilibrium", o);
    CHECK(lost.code == kExitNoEquilibrium);
    const auto k = json::parse(lost.out);
    CHECK_NOTHROW(check_result_schema(k, ResultKind::Equilibrium));
    CHECK(k.at("classification") == "POS_TYPE1");
}

TEST_CASE("simulate command writes a deterministic trace")
{
    CommandOptions o;
    o.fault = "dlg";
    o.iplus = "0.5@-30";
    o.iminus = "0.3@90";
    o.t_end = 0.4;
    const auto csv1 = std::filesystem::temp_directory_path() / "seqsync_sim1.csv";
    const auto csv2 = std::filesystem::temp_directory_path() / "seqsync_sim2.csv";
    o.out = csv1.string();
    const auto a = run("simulate", o);
    REQUIRE(a.code == kExitOk);
    const auto v = json::parse(a.out);
    CHECK_NOTHROW(check_result_schema(v, ResultKind::Verdict));
    CHECK(v.at("lost") == false);
    o.out = csv2.string();
    REQUIRE(run("simulate", o).code == kExitOk);
    std::ifstream f1(csv1), f2(csv2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind("t,f_pos_hz", 0) == 0);
    std::filesystem::remove(csv1);
    std::filesystem::remove(csv2);
}

TEST_CASE("validate command")
{
    CommandOptions o;
    o.draws = 20;
    o.seed = 4;
    const auto r = run("validate", o);
    CHECK(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK_NOTHROW(check_result_schema(j, ResultKind::Validation));
}

TEST_CASE("region command")
{
    CommandOptions o;
    o.fault = "dlg";
    o.other = "0.5@90";
    o.angle_step_deg = 90.0;
    const auto r = run("region", o);
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta_deg,i_limit_pu,binding");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);
    CHECK(run("region", o).out == r.out);
}

TEST_CASE("exit codes for bad input")
{
    CommandOptions o;
    o.config_path = temp_file("seqsync_bad.json", R"({"fault": {"type": "slg", "bogus": 1}})").string();
    const auto bad = run("coeffs", o);
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("bogus") != std::string::npos);

    o.config_path = temp_file("seqsync_broken.json", "{not json").string();
    CHECK(run("coeffs", o).code == kExitConfig);

    o.config_path = "/nonexistent/seqsync.json";
    CHECK(run("coeffs", o).code == kExitConfig);

    CommandOptions z;
    z.fault = "xyz";
    CHECK(run("coeffs", z).code == kExitConfig);
    z.fault = "slg";
    z.iplus = "oops";
    CHECK(run("equilibrium", z).code == kExitConfig);
}

TEST_CASE("schema checker rejects malformed records")
{
    CHECK_THROWS_AS(check_result_schema(json::parse(R"({"sequence": "pos"})"), ResultKind::Limit), ConfigError);
    CHECK_THROWS_AS(check_result_schema(json::parse(R"({"sequence": "up", "theta_i_deg": 0.0, "i_limit": 1.0,
                                                        "binding": "TYPE1"})"),
                                        ResultKind::Limit),
                    ConfigError);
    CHECK_THROWS_AS(check_result_schema(json::array(), ResultKind::Validation), ConfigError);
}
