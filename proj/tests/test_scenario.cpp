#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pbg/csv.hpp"
#include "pbg/errors.hpp"
#include "pbg/grid.hpp"
#include "pbg/scenario.hpp"
#include "pbg/sha256.hpp"
#include "support/test_util.hpp"

using namespace pbg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("bpbg_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

nlohmann::json base_config(const fs::path& out) {
    nlohmann::json j;
    j["materials"] = test::data_path("materials_gan_aln.json");
    j["structure"] = test::data_path("structure_pbg49.json");
    j["scheme"] = {{"preset", "scheme1_all_p"},
                   {"pump_wavelength_nm", 395.0},
                   {"signal_angle_deg", 30.0}};
    j["task"] = "transmission";
    j["grid"] = {{"omega_norm", {{"min", 0.9}, {"max", 1.1}, {"count", 64}}}};
    j["transmission"] = {{"polarization", "p"}, {"theta_deg", 30.0}};
    j["output"] = {{"dir", out.string()}};
    return j;
}

} // namespace

TEST_CASE("sha256 reference vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv round trip keeps 12 significant digits") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{1.0 / 3.0, 2.123456789012e-7}, {-4.5e8, 0.999999999999}};
    const auto parsed = parse_csv(format_csv(t));
    REQUIRE(parsed.rows.size() == t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < t.rows[r].size(); ++c)
            CHECK(parsed.rows[r][c] ==
                  doctest::Approx(t.rows[r][c]).epsilon(1e-11));
}

TEST_CASE("scenario config validation") {
    const auto out = temp_dir("cfg");
    SUBCASE("unknown keys are rejected with their path") {
        auto j = base_config(out);
        j["grid"]["typo_key"] = 1;
        try {
            parse_scenario(j);
            FAIL("expected ConfigInvalid");
        } catch (const ConfigInvalid& e) {
            CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
        }
    }
    SUBCASE("missing material file is a config error naming the path") {
        auto j = base_config(out);
        j["materials"] = "no_such_file.json";
        const auto cfg = parse_scenario(j);
        try {
            run_scenario(cfg);
            FAIL("expected ConfigInvalid");
        } catch (const ConfigInvalid& e) {
            CHECK(std::string(e.what()).find("no_such_file.json") != std::string::npos);
        }
    }
    SUBCASE("unknown material in the structure names the offender") {
        auto j = base_config(out);
        const auto structure = out / "bad_structure.json";
        std::ofstream(structure) << R"({"layers":[{"material":"unobtainium","thickness_nm":10}]})";
        j["structure"] = structure.string();
        const auto cfg = parse_scenario(j);
        try {
            run_scenario(cfg);
            FAIL("expected UnknownMaterial");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("unobtainium") != std::string::npos);
        }
    }
}

TEST_CASE("transmission scenario on an all-vacuum structure is flat") {
    const auto out = temp_dir("vac");
    auto j = base_config(out);
    const auto structure = out / "vacuum_structure.json";
    std::ofstream(structure) << R"({"layers":[{"material":"vacuum","thickness_nm":100}]})";
    j["structure"] = structure.string();
    const auto manifest = run_scenario(parse_scenario(j));
    REQUIRE(manifest.files.size() == 1);
    const auto table = parse_csv(slurp(out / "transmission.csv"));
    CHECK(table.header == std::vector<std::string>{"normalized_frequency", "T", "R"});
    for (const auto& row : table.rows) {
        CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row[2] < 1e-9);
    }
}

TEST_CASE("scenario reruns are bit identical") {
    const auto out1 = temp_dir("rerun1");
    const auto out2 = temp_dir("rerun2");
    auto j = base_config(out1);
    j["task"] = "hom";
    j["grid"]["omega_norm"]["count"] = 257;
    j["grid"]["tau_fs"] = {{"min", -600.0}, {"max", 600.0}, {"count", 241}};
    const auto m1 = run_scenario(parse_scenario(j));
    j["output"]["dir"] = out2.string();
    const auto m2 = run_scenario(parse_scenario(j));
    REQUIRE(m1.files.size() == m2.files.size());
    for (std::size_t i = 0; i < m1.files.size(); ++i) {
        CHECK(m1.files[i].sha256 == m2.files[i].sha256);
        CHECK(slurp(out1 / m1.files[i].path) == slurp(out2 / m2.files[i].path));
    }
    // manifest lists every artifact with its digest
    const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    REQUIRE(manifest.at("files").size() == m1.files.size());
    for (const auto& f : manifest.at("files")) {
        const auto body = slurp(out1 / f.at("path").get<std::string>());
        CHECK(sha256_hex(body) == f.at("sha256").get<std::string>());
        CHECK(body.size() == f.at("bytes").get<std::size_t>());
    }
}

TEST_CASE("design scan") {
    SUBCASE("planted optimum is recovered to 1e-4") {
        // peaks at 0.95/a and 1.05/a with equal heights: symmetric at a = 1
        auto synthetic = [](double scale) {
            SpectralCurve c;
            c.x = linspace(0.7, 1.3, 1200);
            c.y.resize(c.x.size());
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                const double x = c.x[i] * scale;
                c.y[i] = std::exp(-std::pow((x - 0.95) / 0.01, 2)) +
                         std::exp(-std::pow((x - 1.05) / 0.01, 2));
            }
            return c;
        };
        const auto res = design_scan(synthetic, 0.9, 1.1, 11, 1.0);
        CHECK(res.best_scale == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(res.peak_below.position < 1.0);
        CHECK(res.peak_above.position > 1.0);
        CHECK(res.best_objective <= *std::min_element(res.objective.begin(), res.objective.end()));
    }
    SUBCASE("objective obeys the constant-index scaling law") {
        Multilayer st;
        for (int i = 0; i < 3; ++i) {
            st.layers.push_back({test::constant_material("hi", 2.8), 130e-9});
            st.layers.push_back({test::constant_material("lo", 1.5), 210e-9});
        }
        const double omega_ref = 2.6e15;
        auto curve_for = [&](double scale, double target) {
            Multilayer scaled = st;
            for (auto& l : scaled.layers) l.thickness_m *= scale;
            const auto grid = linspace(0.5 * target / 2.0, 1.9 * target / 2.0, 4200);
            return transmission_spectrum(scaled, grid, 0.3, Polarization::s, target);
        };
        for (double a : {0.93, 1.06}) {
            Peak b1, b2, a1, a2;
            const double j_scaled = design_objective(curve_for(a, omega_ref), 1.0, 0.05, &b1, &a1);
            const double j_base = design_objective(curve_for(1.0, a * omega_ref), 1.0, 0.05, &b2, &a2);
            CHECK(j_scaled == doctest::Approx(j_base).epsilon(1e-6));
        }
    }
    SUBCASE("flat spectra have no peak pair") {
        auto flat = [](double) {
            SpectralCurve c;
            c.x = linspace(0.8, 1.2, 100);
            c.y.assign(100, 0.4);
            return c;
        };
        CHECK_THROWS_AS(design_scan(flat, 0.9, 1.1, 5, 1.0), NoPeakPair);
    }
    SUBCASE("shipped stack scan matches the golden record") {
        const auto lib = test::shipped_library();
        const auto stack = test::shipped_stack(lib);
        const double omega_p = test::pump_omega();
        const auto scheme = SchemeConfig::scheme2_sp(omega_p, deg_to_rad(50.0));
        const auto grid = symmetric_grid(omega_p / 2.0, 0.15 * omega_p / 2.0, 400);
        const auto res = design_scan(stack, scheme, grid, 0.9, 1.1, 21, 1.0);

        std::ifstream in(test::data_path("../tests/golden/design_scan_scheme2_50deg.json"));
        REQUIRE(in.good());
        nlohmann::json golden;
        in >> golden;
        CHECK(res.best_scale == doctest::Approx(golden.at("best_scale").get<double>()).epsilon(1e-6));
        CHECK(res.peak_below.position ==
              doctest::Approx(golden.at("peak_below").get<double>()).epsilon(1e-6));
        CHECK(res.peak_above.position ==
              doctest::Approx(golden.at("peak_above").get<double>()).epsilon(1e-6));
    }
}

#ifdef BPBG_CLI_PATH
TEST_CASE("command line interface") {
    const auto out = temp_dir("cli");
    const std::string exe = BPBG_CLI_PATH;

    SUBCASE("preset fig4 writes a HOM trace peaking at exactly 2") {
        const std::string cmd = exe + " hom --preset fig4 --out " + (out / "fig4").string() +
                                " > " + (out / "log.txt").string() + " 2>&1";
        REQUIRE(std::system(cmd.c_str()) == 0);
        const auto table = parse_csv(slurp(out / "fig4" / "hom.csv"));
        REQUIRE(table.header == std::vector<std::string>{"tau_l_fs", "R_n"});
        bool found = false;
        for (const auto& row : table.rows)
            if (row[0] == 0.0) {
                CHECK(row[1] == doctest::Approx(2.0).epsilon(1e-6));
                found = true;
            }
        CHECK(found);
    }
    SUBCASE("config errors exit with code 2") {
        const auto bad = out / "bad.json";
        std::ofstream(bad) << R"({"task":"hom"})";
        const std::string cmd = exe + " hom --config " + bad.string() + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(rc) == 2);
    }
    SUBCASE("task mismatch between subcommand and config exits with code 2") {
        auto j = base_config(out / "mismatch");
        const auto cfg = out / "cfg.json";
        std::ofstream(cfg) << j.dump();
        const std::string cmd = exe + " ratemap --config " + cfg.string() + " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(rc) == 2);
    }
    SUBCASE("list-presets names the shipped scenarios") {
        const auto log = out / "presets.txt";
        const std::string cmd = exe + " --list-presets > " + log.string() + " 2>&1";
        REQUIRE(std::system(cmd.c_str()) == 0);
        const auto body = slurp(log);
        for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6a", "fig6b"})
            CHECK(body.find(name) != std::string::npos);
    }
}
#endif
