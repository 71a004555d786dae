#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "seqsync/dynsim.hpp"
#include "seqsync/limits.hpp"
#include "seqsync/oracle.hpp"

namespace py = pybind11;
using namespace seqsync;

namespace {

template <typename E>
void add_to_string(py::enum_<E>& e)
{
    e.attr("__str__") = py::cpp_function([](E v) { return std::string(to_string(v)); }, py::is_method(e));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Dual-sequence synchronization stability of grid-following converters";

    py::register_exception<DegenerateNetwork>(m, "DegenerateNetwork", PyExc_ValueError);
    py::register_exception<SingularSystem>(m, "SingularSystem", PyExc_ArithmeticError);

    py::enum_<FaultType> fault(m, "FaultType");
    fault.value("NONE", FaultType::None)
        .value("SLG", FaultType::SLG)
        .value("DLG", FaultType::DLG)
        .value("LL", FaultType::LL)
        .value("TLG", FaultType::TLG);
    add_to_string(fault);

    py::enum_<Sequence> seq(m, "Sequence");
    seq.value("POS", Sequence::Pos).value("NEG", Sequence::Neg);
    add_to_string(seq);

    py::enum_<InstabilityType> inst(m, "InstabilityType");
    inst.value("STABLE", InstabilityType::Stable)
        .value("POS_TYPE1", InstabilityType::PosType1)
        .value("POS_TYPE2", InstabilityType::PosType2)
        .value("NEG_TYPE1", InstabilityType::NegType1)
        .value("NEG_TYPE2", InstabilityType::NegType2);
    add_to_string(inst);

    py::enum_<Binding> binding(m, "Binding");
    binding.value("TYPE1", Binding::Type1).value("TYPE2", Binding::Type2).value("CEILING", Binding::Ceiling);
    add_to_string(binding);

    py::enum_<SyncMode> mode(m, "SyncMode");
    mode.value("DSOGI_PLL", SyncMode::DsogiPll).value("DSOGI_FLL", SyncMode::DsogiFll);
    add_to_string(mode);

    py::enum_<LosSignature> sig(m, "LosSignature");
    sig.value("NONE", LosSignature::None).value("DRIFT", LosSignature::Drift).value("CHATTER", LosSignature::Chatter);
    add_to_string(sig);

    py::class_<BranchImpedance>(m, "BranchImpedance")
        .def(py::init<double, double>(), py::arg("r") = 0.0, py::arg("x") = 0.0)
        .def_readwrite("r", &BranchImpedance::r)
        .def_readwrite("x", &BranchImpedance::x);

    py::class_<CircuitParameters>(m, "CircuitParameters")
        .def(py::init<>())
        .def_static("reference", &reference_circuit)
        .def_readwrite("z_choke", &CircuitParameters::z_choke)
        .def_readwrite("z_t1", &CircuitParameters::z_t1)
        .def_readwrite("z_t2", &CircuitParameters::z_t2)
        .def_readwrite("z_l1", &CircuitParameters::z_l1)
        .def_readwrite("z_l2", &CircuitParameters::z_l2)
        .def_readwrite("z_g", &CircuitParameters::z_g)
        .def_readwrite("ug_pos", &CircuitParameters::ug_pos)
        .def_readwrite("theta_g", &CircuitParameters::theta_g)
        .def_readwrite("omega0", &CircuitParameters::omega0);

    py::class_<FaultSpec>(m, "FaultSpec")
        .def(py::init([](FaultType type, Complex z_f, double t_on, double t_clear) {
                 return FaultSpec{type, z_f, t_on, t_clear};
             }),
             py::arg("type") = FaultType::None, py::arg("z_f") = Complex{}, py::arg("t_on") = 0.1,
             py::arg("t_clear") = 3.0)
        .def_readwrite("type", &FaultSpec::type)
        .def_readwrite("z_f", &FaultSpec::z_f)
        .def_readwrite("t_on", &FaultSpec::t_on)
        .def_readwrite("t_clear", &FaultSpec::t_clear);

    py::class_<SequenceCoefficients>(m, "SequenceCoefficients")
        .def_readonly("k1", &SequenceCoefficients::k1)
        .def_readonly("z2", &SequenceCoefficients::z2)
        .def_readonly("z3", &SequenceCoefficients::z3)
        .def_readonly("k4", &SequenceCoefficients::k4)
        .def_readonly("z5", &SequenceCoefficients::z5)
        .def_readonly("z6", &SequenceCoefficients::z6);

    m.def("ohms_to_pu", &ohms_to_pu, py::arg("ohms"), py::arg("base_kv") = 110.0, py::arg("base_mva") = 9.0);
    m.def(
        "compute_coefficients",
        [](const CircuitParameters& c, const FaultSpec& f) { return compute_coefficients(compose_paths(c), f); },
        py::arg("circuit"), py::arg("fault"));

    py::class_<CurrentReference>(m, "CurrentReference")
        .def(py::init([](double ip, double tp, double in, double tn) { return CurrentReference{ip, tp, in, tn}; }),
             py::arg("i_pos") = 0.0, py::arg("theta_i_pos") = 0.0, py::arg("i_neg") = 0.0,
             py::arg("theta_i_neg") = 0.0)
        .def_readwrite("i_pos", &CurrentReference::i_pos)
        .def_readwrite("theta_i_pos", &CurrentReference::theta_i_pos)
        .def_readwrite("i_neg", &CurrentReference::i_neg)
        .def_readwrite("theta_i_neg", &CurrentReference::theta_i_neg);

    py::class_<EquilibriumResult>(m, "EquilibriumResult")
        .def_readonly("found", &EquilibriumResult::found)
        .def_readonly("delta_pos", &EquilibriumResult::delta_pos)
        .def_readonly("delta_neg", &EquilibriumResult::delta_neg)
        .def_readonly("ud_pos", &EquilibriumResult::ud_pos)
        .def_readonly("uq_pos", &EquilibriumResult::uq_pos)
        .def_readonly("ud_neg", &EquilibriumResult::ud_neg)
        .def_readonly("uq_neg", &EquilibriumResult::uq_neg)
        .def_readonly("residual_norm", &EquilibriumResult::residual_norm);

    m.def(
        "solve_equilibrium",
        [](const SequenceCoefficients& k, const CurrentReference& ref, double ug) { return solve_equilibrium(k, ref, ug); },
        py::arg("k"), py::arg("ref"), py::arg("ug_pos"));
    m.def(
        "classify",
        [](const SequenceCoefficients& k, const CurrentReference& ref, double ug) { return classify(k, ref, ug); },
        py::arg("k"), py::arg("ref"), py::arg("ug_pos"));

    py::class_<LimitResult>(m, "LimitResult")
        .def_readonly("sequence", &LimitResult::sequence)
        .def_readonly("theta_i", &LimitResult::theta_i)
        .def_readonly("i_limit", &LimitResult::i_limit)
        .def_readonly("binding", &LimitResult::binding);

    m.def("decoupled_limit", &decoupled_limit, py::arg("k"), py::arg("ug_pos"), py::arg("sequence"),
          py::arg("theta_i"));
    m.def(
        "traversal_limit",
        [](const SequenceCoefficients& k, double ug, Sequence s, double theta, double other_amp, double other_angle,
           double step) {
            TraversalOptions o;
            o.step = step;
            return traversal_limit(k, ug, s, theta, {other_amp, other_angle}, o);
        },
        py::arg("k"), py::arg("ug_pos"), py::arg("sequence"), py::arg("theta_i"), py::arg("other_amplitude") = 0.0,
        py::arg("other_angle") = 0.0, py::arg("step") = 0.01);
    m.def(
        "region_boundary",
        [](const SequenceCoefficients& k, double ug, Sequence s, double other_amp, double other_angle,
           double angle_step) {
            const auto r = region_boundary(k, ug, s, {other_amp, other_angle}, angle_step);
            std::vector<std::tuple<double, double, Binding>> out;
            for (const auto& x : r.samples) out.emplace_back(x.theta_i, x.i_limit, x.binding);
            return out;
        },
        py::arg("k"), py::arg("ug_pos"), py::arg("sequence"), py::arg("other_amplitude") = 0.0,
        py::arg("other_angle") = 0.0, py::arg("angle_step") = 0.0872664625997165);

    py::class_<SyncConfig>(m, "SyncConfig")
        .def(py::init<>())
        .def_readwrite("mode", &SyncConfig::mode)
        .def_readwrite("k", &SyncConfig::k)
        .def_readwrite("kp_fll", &SyncConfig::kp_fll)
        .def_readwrite("ki_fll", &SyncConfig::ki_fll)
        .def_readwrite("kp_pll", &SyncConfig::kp_pll)
        .def_readwrite("ki_pll", &SyncConfig::ki_pll)
        .def_readwrite("omega0", &SyncConfig::omega0);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("circuit", &Scenario::circuit)
        .def_readwrite("fault", &Scenario::fault)
        .def_readwrite("ref_prefault", &Scenario::ref_prefault)
        .def_readwrite("ref_fault", &Scenario::ref_fault)
        .def_readwrite("sync", &Scenario::sync)
        .def_readwrite("t_end", &Scenario::t_end)
        .def_readwrite("dt", &Scenario::dt)
        .def_readwrite("freq_adaptive_z", &Scenario::freq_adaptive_z)
        .def_readwrite("record_interval", &Scenario::record_interval);

    py::class_<LosVerdict>(m, "LosVerdict")
        .def_readonly("lost", &LosVerdict::lost)
        .def_readonly("t_los", &LosVerdict::t_los)
        .def_readonly("dominant", &LosVerdict::dominant)
        .def_readonly("signature", &LosVerdict::signature);

    py::class_<Trace>(m, "Trace")
        .def_readonly("t", &Trace::t)
        .def_readonly("f_pos_hz", &Trace::f_pos_hz)
        .def_readonly("f_neg_hz", &Trace::f_neg_hz)
        .def_readonly("ud_pos", &Trace::ud_pos)
        .def_readonly("ud_neg", &Trace::ud_neg)
        .def_readonly("uq_pos", &Trace::uq_pos)
        .def_readonly("uq_neg", &Trace::uq_neg)
        .def_readonly("delta_pos", &Trace::delta_pos)
        .def_readonly("delta_neg", &Trace::delta_neg)
        .def_readonly("diverged", &Trace::diverged);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("trace", &RunResult::trace)
        .def_readonly("verdict", &RunResult::verdict);

    m.def(
        "run_scenario", [](const Scenario& s) { return run_scenario(s); }, py::arg("scenario"),
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "compare_with_model",
        [](std::size_t draws, std::uint64_t seed) {
            const auto c = compare_with_model(draws, seed);
            return py::dict(py::arg("draws") = c.draws, py::arg("max_relative_error") = c.max_relative_error,
                            py::arg("max_kirchhoff_residual") = c.max_kirchhoff_residual);
        },
        py::arg("draws") = 100, py::arg("seed") = 1);
}
