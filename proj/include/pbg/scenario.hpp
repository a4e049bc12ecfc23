#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbg/biphoton.hpp"
#include "pbg/spdc.hpp"

namespace pbg {

enum class Task { transmission, jsa, ratemap, hom, temporal, conditional, design_scan };

struct GridRange {
    double lo = 0.0, hi = 0.0;
    std::size_t count = 0;
    std::vector<double> values() const;
};

struct ScenarioConfig {
    std::string materials_path;      // may come from BIPHOTON_PBG_MATERIALS
    std::string structure_path;
    SchemeConfig scheme;
    Task task = Task::transmission;

    GridRange omega_norm;            // 2 omega_s / omega_p0
    std::optional<GridRange> omega_i_norm; // pulsed jsa; defaults to omega_norm
    std::optional<GridRange> theta_deg;    // ratemap
    std::optional<GridRange> tau_fs;       // hom

    // task-specific knobs
    Polarization transmission_pol = Polarization::p;
    double transmission_theta_deg = 0.0;
    double conditional_tau_s_fs = 0.0;
    double scan_lo = 0.8, scan_hi = 1.2;
    std::size_t scan_count = 21;
    double scan_height_weight = 1.0;

    std::string out_dir = "out";
    bool raw_output = false;
    int threads = 1;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);

struct Manifest {
    struct Entry {
        std::string path;     // relative to out_dir
        std::string sha256;
        std::size_t bytes = 0;
    };
    std::vector<Entry> files;
    std::string config_sha256;
};

// Runs one task, writes its CSV outputs plus manifest.json under out_dir.
// Deterministic: reruns with the same config are bit-identical.
Manifest run_scenario(const ScenarioConfig& config);

struct DesignScanResult {
    std::vector<double> scales;
    std::vector<double> objective;
    double best_scale = 0.0;
    double best_objective = 0.0;
    Peak peak_below, peak_above;   // bracketing pair at the best scale
};

// Objective for one thickness scale: J = (midpoint offset from 1)^2 +
// height_weight * (height difference)^2 over the two transmission peaks
// nearest 2 omega / omega_p0 = 1.
using SpectrumProvider = std::function<SpectralCurve(double scale)>;

DesignScanResult design_scan(const SpectrumProvider& spectrum, double scale_lo, double scale_hi,
                             std::size_t count, double height_weight = 1.0,
                             double min_prominence = 0.05);

// Convenience wrapper computing spectra from a template structure at the
// scheme's signal angle and polarization.
DesignScanResult design_scan(const Multilayer& base, const SchemeConfig& scheme,
                             std::span<const double> omega_grid, double scale_lo, double scale_hi,
                             std::size_t count, double height_weight = 1.0);

double design_objective(const SpectralCurve& curve, double height_weight,
                        double min_prominence, Peak* below = nullptr, Peak* above = nullptr);

} // namespace pbg
