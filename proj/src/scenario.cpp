#include "pbg/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "pbg/csv.hpp"
#include "pbg/errors.hpp"
#include "pbg/grid.hpp"
#include "pbg/sha256.hpp"

namespace pbg {

namespace fs = std::filesystem;

std::vector<double> GridRange::values() const {
    if (count < 2 || !(hi > lo)) throw ConfigInvalid("grid: need count >= 2 and hi > lo");
    return linspace(lo, hi, count);
}

namespace {

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::string& path) {
    if (!j.is_object()) throw ConfigInvalid(path + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigInvalid(path + ": unknown key '" + key + "'");
}

GridRange parse_range(const nlohmann::json& j, const std::string& path) {
    require_keys(j, {"min", "max", "count"}, path);
    for (const char* k : {"min", "max", "count"})
        if (!j.contains(k)) throw ConfigInvalid(path + ": '" + std::string(k) + "' required");
    GridRange r;
    r.lo = j.at("min").get<double>();
    r.hi = j.at("max").get<double>();
    r.count = j.at("count").get<std::size_t>();
    if (!(r.hi > r.lo) || r.count < 2)
        throw ConfigInvalid(path + ": need max > min and count >= 2");
    return r;
}

Polarization parse_pol(const std::string& s, const std::string& path) {
    if (s == "s") return Polarization::s;
    if (s == "p") return Polarization::p;
    throw ConfigInvalid(path + ": polarization must be 's' or 'p'");
}

AnalysisPol parse_analysis_pol(const std::string& s, const std::string& path) {
    if (s == "s") return AnalysisPol::s;
    if (s == "p") return AnalysisPol::p;
    if (s == "diag45") return AnalysisPol::diag45;
    throw ConfigInvalid(path + ": polarization must be 's', 'p' or 'diag45'");
}

DirectionPair parse_pair(const std::string& s, const std::string& path) {
    if (s == "FF") return DirectionPair::FF;
    if (s == "FB") return DirectionPair::FB;
    if (s == "BF") return DirectionPair::BF;
    if (s == "BB") return DirectionPair::BB;
    throw ConfigInvalid(path + ": direction pair must be FF, FB, BF or BB");
}

Task parse_task(const std::string& s) {
    if (s == "transmission") return Task::transmission;
    if (s == "jsa") return Task::jsa;
    if (s == "ratemap") return Task::ratemap;
    if (s == "hom") return Task::hom;
    if (s == "temporal") return Task::temporal;
    if (s == "conditional") return Task::conditional;
    if (s == "design_scan") return Task::design_scan;
    throw ConfigInvalid("task: unknown task '" + s + "'");
}

SchemeConfig parse_scheme(const nlohmann::json& j) {
    require_keys(j,
                 {"preset", "pump_wavelength_nm", "pump_envelope", "pump_angle_deg",
                  "signal_angle_deg", "direction_pair", "pump_polarization",
                  "signal_polarization", "idler_polarization", "signal_central_fraction"},
                 "scheme");
    if (!j.contains("pump_wavelength_nm"))
        throw ConfigInvalid("scheme: 'pump_wavelength_nm' required");
    const double omega_p = omega_from_wavelength(j.at("pump_wavelength_nm").get<double>() * 1e-9);
    const double theta_s = deg_to_rad(j.value("signal_angle_deg", 0.0));
    const DirectionPair pair = parse_pair(j.value("direction_pair", "FF"), "scheme.direction_pair");

    const std::string preset = j.value("preset", "custom");
    SchemeConfig s;
    if (preset == "scheme1_all_p") {
        s = SchemeConfig::scheme1_all_p(omega_p, theta_s, pair);
    } else if (preset == "scheme2_sp") {
        s = SchemeConfig::scheme2_sp(omega_p, theta_s, pair);
    } else if (preset == "scheme1_45deg") {
        s = SchemeConfig::scheme1_45deg(omega_p, theta_s, pair);
    } else if (preset == "custom") {
        s.kind = SchemeKind::custom;
        s.pump.omega0 = omega_p;
        s.pump.pol = parse_pol(j.value("pump_polarization", "p"), "scheme.pump_polarization");
        s.signal_pol =
            parse_analysis_pol(j.value("signal_polarization", "p"), "scheme.signal_polarization");
        s.idler_pol =
            parse_analysis_pol(j.value("idler_polarization", "p"), "scheme.idler_polarization");
        s.theta_s = theta_s;
        s.pair = pair;
        const double frac = j.value("signal_central_fraction", 0.5);
        if (!(frac > 0.0 && frac < 1.0))
            throw ConfigInvalid("scheme.signal_central_fraction: must lie in (0, 1)");
        s.omega_s0 = frac * omega_p;
        s.omega_i0 = omega_p - s.omega_s0;
    } else {
        throw ConfigInvalid("scheme.preset: unknown preset '" + preset + "'");
    }
    s.pump.theta = deg_to_rad(j.value("pump_angle_deg", 0.0));

    if (j.contains("pump_envelope")) {
        const auto& e = j.at("pump_envelope");
        require_keys(e, {"kind", "duration_fs"}, "scheme.pump_envelope");
        const std::string kind = e.value("kind", "cw");
        if (kind == "cw") {
            s.pump.envelope.kind = PumpEnvelope::Kind::cw;
        } else if (kind == "gaussian") {
            s.pump.envelope.kind = PumpEnvelope::Kind::gaussian;
            s.pump.envelope.duration_fs = e.value("duration_fs", 0.0);
            if (!(s.pump.envelope.duration_fs > 0.0))
                throw ConfigInvalid("scheme.pump_envelope.duration_fs: must be positive");
        } else {
            throw ConfigInvalid("scheme.pump_envelope.kind: 'cw' or 'gaussian'");
        }
    }
    return s;
}

} // namespace

ScenarioConfig parse_scenario(const nlohmann::json& j) {
    require_keys(j,
                 {"materials", "structure", "scheme", "task", "grid", "transmission",
                  "conditional", "design_scan", "output"},
                 "config");
    ScenarioConfig c;

    if (j.contains("materials")) {
        c.materials_path = j.at("materials").get<std::string>();
    } else if (const char* env = std::getenv("BIPHOTON_PBG_MATERIALS")) {
        c.materials_path = env;
    } else {
        throw ConfigInvalid("config.materials: path required (or set BIPHOTON_PBG_MATERIALS)");
    }
    if (!j.contains("structure")) throw ConfigInvalid("config.structure: path required");
    c.structure_path = j.at("structure").get<std::string>();
    if (!j.contains("scheme")) throw ConfigInvalid("config.scheme: required");
    c.scheme = parse_scheme(j.at("scheme"));
    if (!j.contains("task")) throw ConfigInvalid("config.task: required");
    c.task = parse_task(j.at("task").get<std::string>());

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        require_keys(g, {"omega_norm", "omega_i_norm", "theta_deg", "tau_fs"}, "config.grid");
        if (g.contains("omega_norm")) c.omega_norm = parse_range(g.at("omega_norm"), "grid.omega_norm");
        if (g.contains("omega_i_norm"))
            c.omega_i_norm = parse_range(g.at("omega_i_norm"), "grid.omega_i_norm");
        if (g.contains("theta_deg")) c.theta_deg = parse_range(g.at("theta_deg"), "grid.theta_deg");
        if (g.contains("tau_fs")) c.tau_fs = parse_range(g.at("tau_fs"), "grid.tau_fs");
    }

    if (j.contains("transmission")) {
        const auto& t = j.at("transmission");
        require_keys(t, {"polarization", "theta_deg"}, "config.transmission");
        c.transmission_pol = parse_pol(t.value("polarization", "p"), "transmission.polarization");
        c.transmission_theta_deg = t.value("theta_deg", 0.0);
    }
    if (j.contains("conditional")) {
        const auto& t = j.at("conditional");
        require_keys(t, {"tau_s_fs"}, "config.conditional");
        c.conditional_tau_s_fs = t.value("tau_s_fs", 0.0);
    }
    if (j.contains("design_scan")) {
        const auto& d = j.at("design_scan");
        require_keys(d, {"scale_min", "scale_max", "count", "height_weight"}, "config.design_scan");
        c.scan_lo = d.value("scale_min", 0.8);
        c.scan_hi = d.value("scale_max", 1.2);
        c.scan_count = d.value("count", std::size_t{21});
        c.scan_height_weight = d.value("height_weight", 1.0);
        if (!(c.scan_lo > 0.0) || c.scan_count < 2 || !(c.scan_hi > c.scan_lo))
            throw ConfigInvalid("config.design_scan: need 0 < scale_min < scale_max, count >= 2");
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        require_keys(o, {"dir", "raw", "threads"}, "config.output");
        c.out_dir = o.value("dir", "out");
        c.raw_output = o.value("raw", false);
        c.threads = o.value("threads", 1);
    }
    return c;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid("config '" + path + "': " + e.what());
    }
    auto cfg = parse_scenario(j);
    // input paths are relative to the config file unless they resolve as given
    const fs::path base = fs::path(path).parent_path();
    for (std::string* p : {&cfg.materials_path, &cfg.structure_path}) {
        if (!p->empty() && fs::path(*p).is_relative() && !fs::exists(*p) &&
            fs::exists(base / *p))
            *p = (base / *p).lexically_normal().string();
    }
    return cfg;
}

namespace {

struct OutputSink {
    fs::path dir;
    Manifest manifest;

    void write(const std::string& name, const std::string& content) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        const fs::path p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoFailure("cannot open output file '" + p.string() + "'");
        out << content;
        if (!out) throw IoFailure("write failed for '" + p.string() + "'");
        manifest.files.push_back({name, sha256_hex(content), content.size()});
    }
};

std::vector<double> omega_grid_from_norm(const GridRange& r, double omega_p) {
    auto xs = r.values();
    for (auto& x : xs) x *= omega_p / 2.0;
    return xs;
}

std::vector<double> tau_grid_from_fs(const GridRange& r) {
    auto xs = r.values();
    for (auto& x : xs) x *= 1e-15;
    return xs;
}

CsvTable jsa_cw_table(const JointSpectralAmplitude& jsa) {
    CsvTable t;
    t.header = {"omega_s_norm", "re", "im"};
    const double wp = jsa.scheme.pump.omega0;
    for (std::size_t i = 0; i < jsa.omega_s.size(); ++i)
        t.rows.push_back({2.0 * jsa.omega_s[i] / wp, jsa.amp[i].real(), jsa.amp[i].imag()});
    return t;
}

CsvTable jsa_pulsed_table(const JointSpectralAmplitude& jsa) {
    CsvTable t;
    t.header = {"omega_s_norm", "omega_i_norm", "re", "im"};
    const double wp = jsa.scheme.pump.omega0;
    for (std::size_t is = 0; is < jsa.omega_s.size(); ++is)
        for (std::size_t ii = 0; ii < jsa.omega_i.size(); ++ii) {
            const auto v = jsa.at(is, ii);
            t.rows.push_back({2.0 * jsa.omega_s[is] / wp, 2.0 * jsa.omega_i[ii] / wp,
                              v.real(), v.imag()});
        }
    return t;
}

std::string ratemap_csv(const RateMap& map) {
    // axis header row: first cell blank, then the omega axis; one row per theta
    std::string out = "theta_deg\\omega_norm";
    for (double x : map.omega_norm) out += "," + format_double(x);
    out.push_back('\n');
    for (std::size_t it = 0; it < map.theta.size(); ++it) {
        out += format_double(rad_to_deg(map.theta[it]));
        for (std::size_t iw = 0; iw < map.omega_norm.size(); ++iw)
            out += "," + format_double(map.value[it * map.omega_norm.size() + iw]);
        out.push_back('\n');
    }
    return out;
}

} // namespace

Manifest run_scenario(const ScenarioConfig& config) {
    const auto lib = load_material_library(config.materials_path);
    const auto stack = load_stack(config.structure_path, lib);
    const PhysicalConstants constants;
    const double omega_p = config.scheme.pump.omega0;

    OutputSink sink{config.out_dir, {}};

    switch (config.task) {
        case Task::transmission: {
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            CsvTable t;
            t.header = {"normalized_frequency", "T", "R"};
            for (double w : grid) {
                const auto ctx = make_context(stack, w, deg_to_rad(config.transmission_theta_deg),
                                              config.transmission_pol);
                const auto tr = transmittance(stack, ctx);
                t.rows.push_back({2.0 * w / omega_p, tr.T, tr.R});
            }
            sink.write("transmission.csv", format_csv(t));
            break;
        }
        case Task::jsa: {
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            if (config.scheme.pump.envelope.kind == PumpEnvelope::Kind::gaussian) {
                const auto grid_i = config.omega_i_norm
                                        ? omega_grid_from_norm(*config.omega_i_norm, omega_p)
                                        : grid;
                const auto jsa = jsa_pulsed(stack, config.scheme, grid, grid_i,
                                            config.scheme.theta_s, constants);
                sink.write("jsa_pulsed.csv", format_csv(jsa_pulsed_table(jsa)));
            } else {
                const auto jsa = jsa_cw(stack, config.scheme, grid, config.scheme.theta_s, constants);
                sink.write("jsa_cw.csv", format_csv(jsa_cw_table(jsa)));
            }
            break;
        }
        case Task::ratemap: {
            if (!config.theta_deg) throw ConfigInvalid("config.grid.theta_deg: required for ratemap");
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            auto thetas = config.theta_deg->values();
            for (auto& t : thetas) t = deg_to_rad(t);
            const auto map = generation_rate_map(stack, config.scheme, grid, thetas, constants,
                                                 !config.raw_output, config.threads);
            sink.write("ratemap.csv", ratemap_csv(map));
            break;
        }
        case Task::hom: {
            if (!config.tau_fs) throw ConfigInvalid("config.grid.tau_fs: required for hom");
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            const auto jsa = jsa_cw(stack, config.scheme, grid, config.scheme.theta_s, constants);
            const auto profile = antisym_decompose(jsa);
            const auto tau = tau_grid_from_fs(*config.tau_fs);
            const auto trace = hom_rate(profile, tau);
            CsvTable t;
            t.header = {"tau_l_fs", "R_n"};
            for (std::size_t i = 0; i < trace.tau.size(); ++i)
                t.rows.push_back({trace.tau[i] * 1e15, trace.rn[i]});
            sink.write("hom.csv", format_csv(t));
            break;
        }
        case Task::temporal: {
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            TemporalAmplitude amp;
            if (config.scheme.pump.envelope.kind == PumpEnvelope::Kind::gaussian) {
                const auto grid_i = config.omega_i_norm
                                        ? omega_grid_from_norm(*config.omega_i_norm, omega_p)
                                        : grid;
                amp = temporal_amplitude(jsa_pulsed(stack, config.scheme, grid, grid_i,
                                                    config.scheme.theta_s, constants));
            } else {
                amp = temporal_amplitude(
                    jsa_cw(stack, config.scheme, grid, config.scheme.theta_s, constants));
            }
            CsvTable t;
            t.header = {"tau_s_fs", "tau_i_fs", "abs2"};
            if (amp.cw_cut) {
                for (std::size_t j = 0; j < amp.tau_s.size(); ++j)
                    t.rows.push_back({amp.tau_s[j] * 1e15, 0.0, std::norm(amp.a[j])});
            } else {
                for (std::size_t js = 0; js < amp.tau_s.size(); ++js)
                    for (std::size_t ji = 0; ji < amp.tau_i.size(); ++ji)
                        t.rows.push_back({amp.tau_s[js] * 1e15, amp.tau_i[ji] * 1e15,
                                          std::norm(amp.at(js, ji))});
            }
            sink.write("temporal.csv", format_csv(t));
            break;
        }
        case Task::conditional: {
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            const auto amp = temporal_amplitude(
                jsa_cw(stack, config.scheme, grid, config.scheme.theta_s, constants));
            const auto cond = conditional_detection(amp, config.conditional_tau_s_fs * 1e-15);
            CsvTable t;
            t.header = {"tau_i_fs", "p_i_per_fs"};
            for (std::size_t i = 0; i < cond.tau_i.size(); ++i)
                t.rows.push_back({cond.tau_i[i] * 1e15, cond.p[i] * 1e-15});
            sink.write("conditional.csv", format_csv(t));
            break;
        }
        case Task::design_scan: {
            const auto grid = omega_grid_from_norm(config.omega_norm, omega_p);
            const auto result =
                design_scan(stack, config.scheme, grid, config.scan_lo, config.scan_hi,
                            config.scan_count, config.scan_height_weight);
            CsvTable t;
            t.header = {"scale", "objective"};
            for (std::size_t i = 0; i < result.scales.size(); ++i)
                t.rows.push_back({result.scales[i], result.objective[i]});
            sink.write("design_scan.csv", format_csv(t));

            nlohmann::json best;
            best["best_scale"] = result.best_scale;
            best["best_objective"] = result.best_objective;
            best["peak_below"] = {{"position", result.peak_below.position},
                                  {"height", result.peak_below.height},
                                  {"width", result.peak_below.width}};
            best["peak_above"] = {{"position", result.peak_above.position},
                                  {"height", result.peak_above.height},
                                  {"width", result.peak_above.width}};
            sink.write("design_best.json", best.dump(2) + "\n");
            break;
        }
    }

    // manifest with digests; config digest covers the effective settings
    nlohmann::json m;
    m["files"] = nlohmann::json::array();
    for (const auto& f : sink.manifest.files)
        m["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    const std::string manifest_body = m.dump(2) + "\n";
    {
        const fs::path p = sink.dir / "manifest.json";
        std::ofstream out(p, std::ios::binary);
        if (!out) throw IoFailure("cannot open '" + p.string() + "'");
        out << manifest_body;
        if (!out) throw IoFailure("write failed for '" + p.string() + "'");
    }
    return sink.manifest;
}

namespace {

// two peaks nearest x = 1, one strictly below and one at-or-above when
// possible; falls back to the two smallest |x - 1|
bool bracketing_pair(const std::vector<Peak>& peaks, Peak& below, Peak& above) {
    if (peaks.size() < 2) return false;
    const Peak* lo = nullptr;
    const Peak* hi = nullptr;
    for (const auto& p : peaks) {
        if (p.position < 1.0) {
            if (!lo || p.position > lo->position) lo = &p;
        } else {
            if (!hi || p.position < hi->position) hi = &p;
        }
    }
    if (lo && hi) {
        below = *lo;
        above = *hi;
        return true;
    }
    // both on one side: take the two closest
    std::vector<Peak> sorted = peaks;
    std::sort(sorted.begin(), sorted.end(), [](const Peak& a, const Peak& b) {
        return std::abs(a.position - 1.0) < std::abs(b.position - 1.0);
    });
    below = sorted[0];
    above = sorted[1];
    if (below.position > above.position) std::swap(below, above);
    return true;
}

} // namespace

double design_objective(const SpectralCurve& curve, double height_weight, double min_prominence,
                        Peak* below, Peak* above) {
    const auto peaks = find_transmission_peaks(curve, min_prominence);
    Peak lo, hi;
    if (!bracketing_pair(peaks, lo, hi))
        throw NoPeakPair("design_scan: fewer than two transmission peaks in the window");
    if (below) *below = lo;
    if (above) *above = hi;
    const double mid = 0.5 * (lo.position + hi.position);
    const double dh = lo.height - hi.height;
    return (mid - 1.0) * (mid - 1.0) + height_weight * dh * dh;
}

DesignScanResult design_scan(const SpectrumProvider& spectrum, double scale_lo, double scale_hi,
                             std::size_t count, double height_weight, double min_prominence) {
    if (!(scale_lo > 0.0) || count < 2 || !(scale_hi > scale_lo))
        throw Error("design_scan: need 0 < scale_lo < scale_hi and count >= 2");

    DesignScanResult result;
    result.scales = linspace(scale_lo, scale_hi, count);
    result.objective.resize(count);
    std::size_t best = 0;
    for (std::size_t i = 0; i < count; ++i) {
        result.objective[i] = design_objective(spectrum(result.scales[i]), height_weight,
                                               min_prominence, nullptr, nullptr);
        if (result.objective[i] < result.objective[best]) best = i;
    }

    // golden-section refinement around the grid minimum
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = result.scales[best > 0 ? best - 1 : best];
    double b = result.scales[best + 1 < count ? best + 1 : best];
    if (!(b > a)) {
        a = result.scales[best] * (1.0 - 1e-6);
        b = result.scales[best] * (1.0 + 1e-6);
    }
    auto eval = [&](double s) {
        return design_objective(spectrum(s), height_weight, min_prominence, nullptr, nullptr);
    };
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-6 * result.scales[best]; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = eval(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = eval(x2);
        }
    }
    result.best_scale = 0.5 * (a + b);
    result.best_objective = design_objective(spectrum(result.best_scale), height_weight,
                                             min_prominence, &result.peak_below, &result.peak_above);
    if (result.best_objective > result.objective[best]) {
        result.best_scale = result.scales[best];
        result.best_objective = design_objective(spectrum(result.best_scale), height_weight,
                                                 min_prominence, &result.peak_below,
                                                 &result.peak_above);
    }
    return result;
}

DesignScanResult design_scan(const Multilayer& base, const SchemeConfig& scheme,
                             std::span<const double> omega_grid, double scale_lo, double scale_hi,
                             std::size_t count, double height_weight) {
    const Polarization pol =
        scheme.signal_pol == AnalysisPol::s ? Polarization::s : Polarization::p;
    std::vector<double> grid(omega_grid.begin(), omega_grid.end());
    auto provider = [&base, &scheme, grid, pol](double scale) {
        Multilayer scaled = base;
        for (auto& l : scaled.layers) l.thickness_m *= scale;
        return transmission_spectrum(scaled, grid, scheme.theta_s, pol, scheme.pump.omega0);
    };
    return design_scan(provider, scale_lo, scale_hi, count, height_weight);
}

} // namespace pbg
