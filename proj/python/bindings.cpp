#include <optional>
#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irsssm/channels.hpp"
#include "irsssm/experiment.hpp"
#include "irsssm/flops.hpp"
#include "irsssm/joint.hpp"
#include "irsssm/rates.hpp"

namespace py = pybind11;
using namespace irsssm;

namespace {

py::dict rate_dict(const RateReport& r) {
    py::dict d;
    d["r_approx"] = r.r_approx;
    d["i0_bob"] = r.i0_bob;
    d["i0_eve"] = r.i0_eve;
    d["kappa_b"] = r.kappa_b;
    d["kappa_e"] = r.kappa_e;
    return d;
}

py::dict record_dict(const ExperimentRecord& r) {
    py::dict d;
    d["trial"] = r.trial;
    d["seed"] = r.seed;
    d["power_dbm"] = r.point.power_dbm;
    d["n_irs"] = r.point.n_irs;
    d["n_e"] = r.point.n_e;
    d["irs_y"] = r.point.irs_y;
    d["method"] = r.method;
    d["sr_bits"] = r.sr_bits;
    d["iterations"] = r.iterations;
    d["flops"] = r.flops;
    d["channel_digest"] = r.channel_digest;
    d["error"] = r.error;
    d["trace"] = r.trace;
    return d;
}

}  // namespace

PYBIND11_MODULE(_irsssm, m) {
    m.doc() = "Secrecy-rate optimization for IRS-aided hybrid secure spatial modulation";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<Point3>(m, "Point3")
        .def(py::init([](double x, double y, double z) { return Point3{x, y, z}; }), py::arg("x") = 0.0,
             py::arg("y") = 0.0, py::arg("z") = 0.0)
        .def_readwrite("x", &Point3::x)
        .def_readwrite("y", &Point3::y)
        .def_readwrite("z", &Point3::z)
        .def("__repr__", [](const Point3& p) {
            std::ostringstream os;
            os << "Point3(" << p.x << ", " << p.y << ", " << p.z << ")";
            return os.str();
        });

    py::class_<Geometry>(m, "Geometry")
        .def(py::init<>())
        .def_readwrite("alice", &Geometry::alice)
        .def_readwrite("irs", &Geometry::irs)
        .def_readwrite("bob", &Geometry::bob)
        .def_readwrite("eve", &Geometry::eve);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_static("desk_scale", &SystemConfig::desk_scale)
        .def_static("full_scale", &SystemConfig::full_scale)
        .def_readwrite("n_rf", &SystemConfig::n_rf)
        .def_readwrite("n_k", &SystemConfig::n_k)
        .def_readwrite("n_b", &SystemConfig::n_b)
        .def_readwrite("n_e", &SystemConfig::n_e)
        .def_readwrite("n_irs", &SystemConfig::n_irs)
        .def_readwrite("m_ary", &SystemConfig::m_ary)
        .def_readwrite("p_total", &SystemConfig::p_total)
        .def_readwrite("beta", &SystemConfig::beta)
        .def_readwrite("sigma_b2", &SystemConfig::sigma_b2)
        .def_readwrite("sigma_e2", &SystemConfig::sigma_e2)
        .def_readwrite("geometry", &SystemConfig::geometry)
        .def_readwrite("alpha_ai", &SystemConfig::alpha_ai)
        .def_readwrite("alpha_ab", &SystemConfig::alpha_ab)
        .def_readwrite("alpha_ib", &SystemConfig::alpha_ib)
        .def_readwrite("pl0_db", &SystemConfig::pl0_db)
        .def_property_readonly("n_tx", &SystemConfig::n_tx)
        .def_property_readonly("n_hyp", &SystemConfig::n_hyp)
        .def_property_readonly("tau", &SystemConfig::tau)
        .def("validate", &SystemConfig::validate);

    py::class_<ChannelSet>(m, "ChannelSet")
        .def_readwrite("h", &ChannelSet::h)
        .def_readwrite("q", &ChannelSet::q)
        .def_readwrite("f", &ChannelSet::f)
        .def_readwrite("g", &ChannelSet::g)
        .def_readwrite("m", &ChannelSet::m)
        .def_static("zeros", &ChannelSet::zeros)
        .def("validate", &ChannelSet::validate);

    m.def("draw_channels", &draw_channels, py::arg("cfg"), py::arg("seed"));
    m.def("channel_digest", &channel_digest);
    m.def("path_loss_db", &path_loss_db, py::arg("d"), py::arg("alpha"), py::arg("pl0_db") = -30.0);

    py::class_<Constellation>(m, "Constellation")
        .def_static("psk", &Constellation::psk)
        .def_property_readonly("symbols", &Constellation::symbols)
        .def("__len__", &Constellation::size);

    py::class_<IrsPhaseVector>(m, "IrsPhaseVector")
        .def(py::init<CVec>())
        .def_static("ones", &IrsPhaseVector::ones)
        .def_static("from_phases", &IrsPhaseVector::from_phases)
        .def_static("random", &IrsPhaseVector::random, py::arg("n"), py::arg("seed"))
        .def_property_readonly("values", &IrsPhaseVector::values)
        .def("__len__", &IrsPhaseVector::size);

    py::class_<HybridPrecoder>(m, "HybridPrecoder")
        .def(py::init<CVec, int, int>(), py::arg("p"), py::arg("n_rf"), py::arg("n_k"))
        .def_static("equal_power", &HybridPrecoder::equal_power)
        .def_property_readonly("p", &HybridPrecoder::p)
        .def_property_readonly("n_rf", &HybridPrecoder::n_rf)
        .def_property_readonly("n_k", &HybridPrecoder::n_k)
        .def("norm", &HybridPrecoder::norm);

    m.def(
        "secrecy_rate",
        [](const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v, const HybridPrecoder& p,
           std::optional<std::vector<CVec>> fa_blocks) {
            const auto fa = fa_blocks ? *fa_blocks : p.analog_blocks();
            return rate_dict(secrecy_rate(cfg, ch, v, p, Constellation::psk(cfg.m_ary), fa));
        },
        py::arg("cfg"), py::arg("channels"), py::arg("v"), py::arg("p"), py::arg("fa_blocks") = py::none(),
        "Approximate secrecy rate. The AN projection uses fa_blocks, or p's own analog beams when omitted.");

    m.def(
        "joint_optimize",
        [](const SystemConfig& cfg, const ChannelSet& ch, int combination, const IrsPhaseVector& v0,
           const HybridPrecoder& p0, double epsilon, int max_outer) {
            JointOptions o;
            o.epsilon = epsilon;
            o.max_outer = max_outer;
            const auto r = joint_optimize(cfg, ch, Constellation::psk(cfg.m_ary), Combination::named(combination),
                                          v0, p0, o);
            py::list trace;
            for (const auto& e : r.trace) {
                py::dict d;
                d["iteration"] = e.iteration;
                d["after_irs"] = e.after_irs;
                d["irs_accepted"] = e.irs_accepted;
                d["after_precoder"] = e.after_precoder;
                trace.append(d);
            }
            py::dict d;
            d["v"] = r.v_star;
            d["p"] = r.p_star;
            d["objective"] = r.objective;
            d["initial_objective"] = r.initial_objective;
            d["converged"] = r.converged;
            d["label"] = r.combination.label();
            d["fa_blocks"] = r.fa_blocks;
            d["trace"] = trace;
            return d;
        },
        py::arg("cfg"), py::arg("channels"), py::arg("combination"), py::arg("v0"), py::arg("p0"),
        py::arg("epsilon") = 0.01, py::arg("max_outer") = 20,
        "Alternating IRS / precoder optimization; combination is 1, 2 or 3.");

    m.def(
        "flop_estimate",
        [](const SystemConfig& cfg, const std::string& method, double iterations) {
            for (auto f : {FlopMethod::IrsBca, FlopMethod::IrsAdmm, FlopMethod::IrsSdr, FlopMethod::Sca, FlopMethod::Ga})
                if (method == to_string(f)) {
                    const auto e = flop_estimates(cfg, f, iterations);
                    py::dict d;
                    d["shared"] = e.shared;
                    d["iterative"] = e.iterative;
                    d["total"] = e.total;
                    d["big_o"] = e.big_o;
                    return d;
                }
            throw InvalidInput("unknown method '" + method + "'");
        },
        py::arg("cfg"), py::arg("method"), py::arg("iterations") = 1.0);

    m.def(
        "run_config",
        [](const std::string& json_text, int trials, bool full_scale) {
            LoadedConfig lc =
                parse_config(json_text, full_scale ? SystemConfig::full_scale() : SystemConfig::desk_scale());
            if (trials > 0) lc.experiment.n_channel_trials = trials;
            lc.experiment.validate();
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(lc.system, lc.experiment);
            }
            py::list records;
            for (const auto& r : res.records) records.append(record_dict(r));
            py::dict d;
            d["records"] = records;
            d["summary_json"] = summary_json(lc.system, lc.experiment, res);
            d["failures"] = res.failures;
            return d;
        },
        py::arg("json_text"), py::arg("trials") = 0, py::arg("full_scale") = false,
        "Runs a campaign described by a JSON config string; output files are not written.");
}
