// biphoton-pbg: scenario runner for SPDC in 1D nonlinear photonic-band-gap
// multilayers. Exit codes: 0 ok, 2 config error, 3 computation error, 4 I/O.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbg/errors.hpp"
#include "pbg/scenario.hpp"

namespace fs = std::filesystem;

namespace {

#ifndef BPBG_DATA_DIR
#define BPBG_DATA_DIR ""
#endif

fs::path presets_dir() {
    if (const char* env = std::getenv("BIPHOTON_PBG_PRESETS")) return env;
    const fs::path compiled = BPBG_DATA_DIR;
    if (!compiled.empty() && fs::exists(compiled / "presets")) return compiled / "presets";
    return "data/presets";
}

int list_presets() {
    const fs::path dir = presets_dir();
    if (!fs::exists(dir)) {
        std::cerr << "no preset directory at " << dir << "\n";
        return 2;
    }
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) std::cout << n << "\t" << (dir / (n + ".json")).string() << "\n";
    return 0;
}

const char* task_name(pbg::Task t) {
    switch (t) {
        case pbg::Task::transmission: return "transmission";
        case pbg::Task::jsa: return "jsa";
        case pbg::Task::ratemap: return "ratemap";
        case pbg::Task::hom: return "hom";
        case pbg::Task::temporal: return "temporal";
        case pbg::Task::conditional: return "conditional";
        case pbg::Task::design_scan: return "design_scan";
    }
    return "?";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPDC simulator for 1D nonlinear photonic-band-gap multilayers"};
    app.footer("Exit codes: 0 ok, 2 config error, 3 computation error, 4 I/O error.\n"
               "BIPHOTON_PBG_MATERIALS may point to a default material library.");

    bool show_presets = false;
    app.add_flag("--list-presets", show_presets, "List shipped scenario presets and exit");

    std::string config_path, preset, out_dir;
    int threads = 0;

    std::vector<std::string> task_names = {"transmission", "jsa", "ratemap", "hom",
                                           "temporal", "conditional", "design_scan"};
    std::vector<CLI::App*> subs;
    for (const auto& name : task_names) {
        auto* sub = app.add_subcommand(name, "Run the " + name + " task");
        sub->add_option("--config", config_path, "Scenario config JSON");
        sub->add_option("--preset", preset, "Shipped preset name (resolved in the presets dir)");
        sub->add_option("--out", out_dir, "Output directory (overrides config)");
        sub->add_option("--threads", threads, "Worker threads for grid sweeps");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    if (show_presets) return list_presets();

    CLI::App* active = nullptr;
    for (auto* sub : subs)
        if (sub->parsed()) active = sub;
    if (!active) {
        std::cerr << app.help();
        return 2;
    }

    try {
        if (config_path.empty() && !preset.empty())
            config_path = (presets_dir() / (preset + ".json")).string();
        if (config_path.empty()) {
            std::cerr << "error: --config or --preset required\n";
            return 2;
        }

        auto config = pbg::load_scenario(config_path);
        if (std::string(task_name(config.task)) != active->get_name())
            throw pbg::ConfigInvalid("config.task: '" + std::string(task_name(config.task)) +
                                     "' does not match subcommand '" + active->get_name() + "'");
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (threads > 0) config.threads = threads;

        const auto manifest = pbg::run_scenario(config);
        std::cout << "wrote " << manifest.files.size() << " file(s) to " << config.out_dir << "\n";
        for (const auto& f : manifest.files)
            std::cout << "  " << f.path << "  sha256=" << f.sha256.substr(0, 12) << "...\n";
        return 0;
    } catch (const pbg::ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pbg::IoFailure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const pbg::Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
