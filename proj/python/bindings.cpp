// Python bindings for the core operations: material/stack loading, linear
// spectra, pair-amplitude computation and the state-level analysis tools.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pbg/biphoton.hpp"
#include "pbg/constants.hpp"
#include "pbg/errors.hpp"
#include "pbg/scenario.hpp"
#include "pbg/spdc.hpp"
#include "pbg/stack.hpp"

namespace py = pybind11;
using namespace pbg;

namespace {

SchemeConfig make_scheme(const std::string& preset, double pump_wavelength_nm,
                         double signal_angle_deg, const std::string& pair,
                         double pump_duration_fs) {
    const double omega_p = omega_from_wavelength(pump_wavelength_nm * 1e-9);
    const double theta = deg_to_rad(signal_angle_deg);
    DirectionPair dp = DirectionPair::FF;
    if (pair == "FB") dp = DirectionPair::FB;
    else if (pair == "BF") dp = DirectionPair::BF;
    else if (pair == "BB") dp = DirectionPair::BB;
    else if (pair != "FF") throw ConfigInvalid("direction pair must be FF, FB, BF or BB");

    SchemeConfig s;
    if (preset == "scheme1_all_p") s = SchemeConfig::scheme1_all_p(omega_p, theta, dp);
    else if (preset == "scheme2_sp") s = SchemeConfig::scheme2_sp(omega_p, theta, dp);
    else if (preset == "scheme1_45deg") s = SchemeConfig::scheme1_45deg(omega_p, theta, dp);
    else throw ConfigInvalid("unknown scheme preset '" + preset + "'");
    if (pump_duration_fs > 0.0) {
        s.pump.envelope.kind = PumpEnvelope::Kind::gaussian;
        s.pump.envelope.duration_fs = pump_duration_fs;
    }
    return s;
}

Polarization pol_of(const std::string& s) {
    if (s == "s") return Polarization::s;
    if (s == "p") return Polarization::p;
    throw ConfigInvalid("polarization must be 's' or 'p'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "SPDC in 1D nonlinear photonic-band-gap multilayers";

    py::register_exception<Error>(m, "PbgError");

    py::class_<Material>(m, "Material")
        .def_readonly("name", &Material::name)
        .def("nonlinear", &Material::nonlinear);

    py::class_<MaterialLibrary>(m, "MaterialLibrary")
        .def("names", [](const MaterialLibrary& lib) {
            std::vector<std::string> out;
            for (const auto& mat : lib.materials) out.push_back(mat.name);
            return out;
        })
        .def("refractive_index", [](const MaterialLibrary& lib, const std::string& name,
                                    double wavelength_um) {
            return refractive_index(lib.find(name), wavelength_um * 1e-6);
        }, py::arg("name"), py::arg("wavelength_um"));

    m.def("load_materials", &load_material_library, py::arg("path"));

    py::class_<Multilayer>(m, "Multilayer")
        .def("layer_count", [](const Multilayer& s) { return s.layers.size(); })
        .def("total_length_nm", [](const Multilayer& s) { return s.total_length() * 1e9; });

    m.def("load_structure", &load_stack, py::arg("path"), py::arg("materials"));

    m.def("transmittance",
          [](const Multilayer& stack, double wavelength_nm, double theta_deg,
             const std::string& pol) {
              const auto ctx = make_context(stack, omega_from_wavelength(wavelength_nm * 1e-9),
                                            deg_to_rad(theta_deg), pol_of(pol));
              const auto tr = transmittance(stack, ctx);
              py::dict d;
              d["r"] = tr.r;
              d["t"] = tr.t;
              d["R"] = tr.R;
              d["T"] = tr.T;
              return d;
          },
          py::arg("stack"), py::arg("wavelength_nm"), py::arg("theta_deg"), py::arg("pol"));

    py::class_<SpectralCurve>(m, "SpectralCurve")
        .def_readonly("x", &SpectralCurve::x)
        .def_readonly("y", &SpectralCurve::y);

    m.def("transmission_spectrum",
          [](const Multilayer& stack, std::vector<double> omega, double theta_deg,
             const std::string& pol, double omega_ref) {
              return transmission_spectrum(stack, omega, deg_to_rad(theta_deg), pol_of(pol),
                                           omega_ref);
          },
          py::arg("stack"), py::arg("omega_grid"), py::arg("theta_deg"), py::arg("pol"),
          py::arg("omega_ref"));

    py::class_<Peak>(m, "Peak")
        .def_readonly("position", &Peak::position)
        .def_readonly("height", &Peak::height)
        .def_readonly("width", &Peak::width);

    m.def("find_transmission_peaks", &find_transmission_peaks, py::arg("curve"),
          py::arg("min_prominence") = 0.05);

    py::class_<SchemeConfig>(m, "SchemeConfig")
        .def_property_readonly("pump_omega", [](const SchemeConfig& s) { return s.pump.omega0; })
        .def_property_readonly("theta_s_deg",
                               [](const SchemeConfig& s) { return rad_to_deg(s.theta_s); });

    m.def("scheme", &make_scheme, py::arg("preset"), py::arg("pump_wavelength_nm") = 395.0,
          py::arg("signal_angle_deg") = 30.0, py::arg("pair") = "FF",
          py::arg("pump_duration_fs") = 0.0);

    m.def("idler_geometry",
          [](double omega_s, double theta_s_deg, const SchemeConfig& scheme) {
              const auto g = idler_geometry(omega_s, deg_to_rad(theta_s_deg), scheme.pump);
              py::dict d;
              d["omega_i"] = g.omega_i;
              d["theta_i_deg"] = rad_to_deg(g.theta_i);
              return d;
          },
          py::arg("omega_s"), py::arg("theta_s_deg"), py::arg("scheme"));

    py::class_<JointSpectralAmplitude>(m, "JointSpectralAmplitude")
        .def_readonly("omega_s", &JointSpectralAmplitude::omega_s)
        .def_readonly("omega_i", &JointSpectralAmplitude::omega_i)
        .def_readonly("amp", &JointSpectralAmplitude::amp)
        .def_property_readonly("is_pulsed", [](const JointSpectralAmplitude& j) {
            return j.mode == JointSpectralAmplitude::Mode::pulsed_grid;
        });

    m.def("jsa_cw",
          [](const Multilayer& stack, const SchemeConfig& scheme, std::vector<double> omega_grid) {
              return jsa_cw(stack, scheme, omega_grid, scheme.theta_s, PhysicalConstants{});
          },
          py::arg("stack"), py::arg("scheme"), py::arg("omega_grid"));

    m.def("jsa_pulsed",
          [](const Multilayer& stack, const SchemeConfig& scheme, std::vector<double> omega_s,
             std::vector<double> omega_i) {
              return jsa_pulsed(stack, scheme, omega_s, omega_i, scheme.theta_s,
                                PhysicalConstants{});
          },
          py::arg("stack"), py::arg("scheme"), py::arg("omega_s_grid"), py::arg("omega_i_grid"));

    py::class_<RateMap>(m, "RateMap")
        .def_readonly("omega_norm", &RateMap::omega_norm)
        .def_readonly("theta", &RateMap::theta)
        .def_readonly("value", &RateMap::value);

    m.def("generation_rate_map",
          [](const Multilayer& stack, const SchemeConfig& scheme, std::vector<double> omega_grid,
             std::vector<double> theta_deg, bool normalize, int threads) {
              for (auto& t : theta_deg) t = deg_to_rad(t);
              return generation_rate_map(stack, scheme, omega_grid, theta_deg,
                                         PhysicalConstants{}, normalize, threads);
          },
          py::arg("stack"), py::arg("scheme"), py::arg("omega_grid"), py::arg("theta_deg"),
          py::arg("normalize") = true, py::arg("threads") = 1);

    py::class_<AntisymProfile>(m, "AntisymProfile")
        .def_readonly("detuning", &AntisymProfile::detuning)
        .def_readonly("f", &AntisymProfile::f)
        .def_readonly("antisym", &AntisymProfile::antisym)
        .def_readonly("antisymmetry_fraction", &AntisymProfile::antisymmetry_fraction);

    m.def("antisym_decompose", &antisym_decompose, py::arg("jsa"));

    py::class_<HOMTrace>(m, "HOMTrace")
        .def_readonly("tau", &HOMTrace::tau)
        .def_readonly("rn", &HOMTrace::rn);

    m.def("hom_rate",
          [](const AntisymProfile& p, std::vector<double> tau) { return hom_rate(p, tau); },
          py::arg("profile"), py::arg("tau_grid"));
    m.def("hom_rate_general",
          [](const JointSpectralAmplitude& jsa, std::vector<double> tau) {
              return hom_rate_general(jsa, tau);
          },
          py::arg("jsa"), py::arg("tau_grid"));

    py::class_<TemporalAmplitude>(m, "TemporalAmplitude")
        .def_readonly("tau_s", &TemporalAmplitude::tau_s)
        .def_readonly("tau_i", &TemporalAmplitude::tau_i)
        .def_readonly("a", &TemporalAmplitude::a)
        .def_readonly("freq_norm_sq", &TemporalAmplitude::freq_norm_sq)
        .def_readonly("time_norm_sq", &TemporalAmplitude::time_norm_sq)
        .def("value", &TemporalAmplitude::at, py::arg("i_tau_s"), py::arg("i_tau_i"));

    m.def("temporal_amplitude", &temporal_amplitude, py::arg("jsa"));

    py::class_<ConditionalDetection>(m, "ConditionalDetection")
        .def_readonly("tau_i", &ConditionalDetection::tau_i)
        .def_readonly("p", &ConditionalDetection::p);

    m.def("conditional_detection", &conditional_detection, py::arg("amplitude"),
          py::arg("tau_s") = 0.0);

    py::class_<DesignScanResult>(m, "DesignScanResult")
        .def_readonly("scales", &DesignScanResult::scales)
        .def_readonly("objective", &DesignScanResult::objective)
        .def_readonly("best_scale", &DesignScanResult::best_scale)
        .def_readonly("best_objective", &DesignScanResult::best_objective);

    m.def("design_scan",
          [](const Multilayer& stack, const SchemeConfig& scheme, std::vector<double> omega_grid,
             double lo, double hi, std::size_t count, double height_weight) {
              return design_scan(stack, scheme, omega_grid, lo, hi, count, height_weight);
          },
          py::arg("stack"), py::arg("scheme"), py::arg("omega_grid"), py::arg("scale_lo"),
          py::arg("scale_hi"), py::arg("count"), py::arg("height_weight") = 1.0);

    m.def("run_scenario",
          [](const std::string& config_path, const std::string& out_dir) {
              auto cfg = load_scenario(config_path);
              if (!out_dir.empty()) cfg.out_dir = out_dir;
              const auto manifest = run_scenario(cfg);
              std::vector<std::string> files;
              for (const auto& f : manifest.files) files.push_back(f.path);
              return files;
          },
          py::arg("config_path"), py::arg("out_dir") = "");

    m.attr("__version__") = "0.1.0";
}
