// End-to-end experiment driver: config parsing contract, initial-data
// recipes, artifact schemas, byte-for-byte determinism, error paths,
// and the acceptance suite's skip and fault-injection hooks (a 10%
// corruption of the calibrated constant must flip the stationarity
// criterion to FAIL).

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include "halfflow/acceptance.hpp"
#include "halfflow/calculus.hpp"
#include "halfflow/config.hpp"
#include "halfflow/experiment.hpp"
#include "halfflow/initial_data.hpp"
#include "halfflow/offdiag.hpp"
#include "halfflow/spectral.hpp"
#include "test_helpers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace halfflow;
using namespace halfflow::testing;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("halfflow_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing contract") {
    Config cfg = Config::from_string("M = 128\n# a comment\n\nseed= 7\nradii=0.5, 0.25\n");
    CHECK(cfg.get_int("M", 0) == 128);
    CHECK(cfg.get_seed("seed", 0) == 7);
    const std::vector<double> radii = cfg.get_double_list("radii", {});
    REQUIRE(radii.size() == 2);
    CHECK(radii[0] == 0.5);
    CHECK(radii[1] == 0.25);
    CHECK_NOTHROW(cfg.finish());

    const std::string resolved = cfg.resolved_text();
    CHECK(resolved.find("# resolved configuration") != std::string::npos);
    CHECK(resolved.find("M=128") != std::string::npos);

    // Unknown keys are rejected by name.
    Config extra = Config::from_string("M=64\nbogus_key=1\n");
    (void)extra.get_int("M", 0);
    try {
        extra.finish();
        FAIL("finish() accepted an unknown key");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
    }

    CHECK_THROWS_AS((void)Config::from_string("a=1\na=2\n"), std::invalid_argument);
    CHECK_THROWS_AS((void)Config::from_string("justakey\n"), std::invalid_argument);
    Config bad = Config::from_string("x=notanumber\n");
    CHECK_THROWS_AS((void)bad.get_double("x", 0.0), std::invalid_argument);

    // Defaults are recorded in the resolved view too.
    Config defs = Config::from_string("");
    CHECK(defs.get_double("dt", 1e-3) == 1e-3);
    CHECK(defs.resolved_text().find("dt=") != std::string::npos);
}

TEST_CASE("initial data recipes") {
    const CircleGrid g{64};

    const Field c = make_initial(parse_initial_data("constant", 2, 0), g);
    CHECK(half_energy(c) <= 1e-14);
    CHECK(c.max_sphere_defect() <= 1e-15);

    const Field gc2 = make_initial(parse_initial_data("great_circle(2)", 2, 0), g);
    const Field density = sq_grad_density(gc2);
    for (double v : density.values) CHECK(std::abs(v - 4.0 * pi) <= 1e-9);

    InitialDataSpec bp = parse_initial_data("bubble_pullback(0.2, 1.5)", 2, 0);
    CHECK(bp.lambda == 0.2);
    CHECK(bp.x0 == 1.5);
    CHECK(make_initial(bp, g).max_sphere_defect() <= 1e-12);

    // Seeds: default applies, inline wins, reproducible, grid-consistent.
    CHECK(parse_initial_data("bandlimited_noise(0.1, 5)", 2, 42).seed == 42);
    CHECK(parse_initial_data("bandlimited_noise(0.1, 5, 7)", 2, 42).seed == 7);
    const InitialDataSpec ns = parse_initial_data("bandlimited_noise(0.1, 5, 3)", 3, 0);
    const Field n1 = make_initial(ns, g);
    const Field n2 = make_initial(ns, g);
    CHECK(n1.values == n2.values);
    CHECK(n1.max_sphere_defect() <= 1e-12);
    CHECK(half_energy(n1) > 1e-6);

    const Field fine = make_initial(ns, CircleGrid{128});
    double worst = 0.0;
    for (int j = 0; j < g.M; ++j)
        for (int comp = 0; comp < 3; ++comp)
            worst = std::max(worst,
                             std::abs(fine.at(2 * j, comp) - n1.at(j, comp)));
    CHECK(worst <= 1e-13); // same continuum map at every resolution

    CHECK_THROWS_AS((void)parse_initial_data("vortex(1)", 2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_initial_data("great_circle(", 2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_initial_data("constant(3)", 2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)make_initial(parse_initial_data("great_circle(0)", 2, 0), g),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)make_initial(parse_initial_data("great_circle(40)", 2, 0), g),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)make_initial(parse_initial_data("bandlimited_noise(0.1, 33)", 2, 0), g),
        std::invalid_argument);
}

TEST_CASE("flow subcommand writes the full artifact set") {
    TempDir dir("flow");
    const fs::path cfg = dir.path / "flow.cfg";
    write(cfg,
          "M=64\nn=2\ninitial_data=great_circle(1)\ndt=0.01\nt_end=0.1\n"
          "snapshot_stride=5\n");
    CliOverrides ov;
    ov.out = (dir.path / "out").string();
    REQUIRE(run_experiment("flow", cfg.string(), ov) == 0);

    const fs::path out = dir.path / "out";
    for (const char* name :
         {"trace.csv", "u_0.csv", "u_1.csv", "u_2.csv", "report.json",
          "resolved_config.txt", "calibration.json", "plot_commands.txt"})
        CHECK(fs::exists(out / name));

    const std::string trace = slurp(out / "trace.csv");
    CHECK(trace.rfind("t,energy,dtu_l2,sphere_drift,max_u\n", 0) == 0);

    const std::string u0 = slurp(out / "u_0.csv");
    CHECK(u0.rfind("x,u_1,u_2\n", 0) == 0);
    CHECK(count_lines(u0) == 65); // header + one row per node

    const json report = load_json(out / "report.json");
    CHECK(report.at("status") == "completed");
    CHECK(std::abs(report.at("initial_energy").get<double>() - pi) <= 1e-9);
    REQUIRE(report.at("snapshots").size() == 3);
    CHECK(report.at("snapshots")[0].at("file") == "u_0.csv");
    CHECK(report.at("calibration").at("M") == 64);

    const json calib = load_json(out / "calibration.json");
    CHECK(std::abs(calib.at("C_half").get<double>() * 2.0 * pi - 1.0) <= 1e-8);
}

TEST_CASE("flow halted before the second snapshot still reports cleanly") {
    TempDir dir("halt0");
    const fs::path cfg = dir.path / "flow.cfg";
    // Initial data already concentrated beyond the default eps0 threshold:
    // the run halts at the first snapshot, leaving nothing to evaluate the
    // energy identity over.
    write(cfg,
          "M=256\nn=2\ninitial_data=bubble_pullback(0.12)\ndt=0.0005\n"
          "t_end=0.03\nsnapshot_stride=15\nscan_radii=0.5,0.25,0.1\n");
    CliOverrides ov;
    ov.out = (dir.path / "out").string();
    REQUIRE(run_experiment("flow", cfg.string(), ov) == 0);
    const json report = load_json(dir.path / "out" / "report.json");
    CHECK(report.at("status") == "concentration_detected");
    CHECK(report.at("energy_identity_residual").is_null());
    CHECK(report.at("snapshots").size() >= 1);
}

TEST_CASE("runs are deterministic byte for byte") {
    TempDir dir("det");
    const fs::path cfg = dir.path / "flow.cfg";
    write(cfg,
          "M=64\nn=3\nseed=9\ninitial_data=bandlimited_noise(0.1, 5)\n"
          "dt=0.005\nt_end=0.05\nsnapshot_stride=5\n");
    CliOverrides a, b;
    a.out = (dir.path / "a").string();
    b.out = (dir.path / "b").string();
    REQUIRE(run_experiment("flow", cfg.string(), a) == 0);
    REQUIRE(run_experiment("flow", cfg.string(), b) == 0);
    // resolved_config.txt is excluded: it records the per-run output_dir
    // override, which legitimately differs between the two runs.
    for (const char* name :
         {"trace.csv", "u_0.csv", "u_2.csv", "report.json", "calibration.json"})
        CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
}

TEST_CASE("scan and bubble consume a trace directory") {
    TempDir dir("scan");
    const fs::path flowdir = dir.path / "flowrun";
    const fs::path cfg = dir.path / "flow.cfg";
    write(cfg,
          "M=128\nn=2\ninitial_data=bubble_pullback(0.1)\ndt=0.001\n"
          "t_end=0.02\nsnapshot_stride=10\n");
    CliOverrides fov;
    fov.out = flowdir.string();
    REQUIRE(run_experiment("flow", cfg.string(), fov) == 0);

    // scan
    const fs::path scfg = dir.path / "scan.cfg";
    write(scfg, "");
    CliOverrides sov;
    sov.out = (dir.path / "scanout").string();
    sov.trace = flowdir.string();
    sov.radii = "0.5,0.25";
    REQUIRE(run_experiment("scan", scfg.string(), sov) == 0);

    const json conc = load_json(dir.path / "scanout" / "concentration.json");
    REQUIRE(conc.at("radii").size() == 2);
    CHECK(conc.at("radii")[0] == 0.5);
    CHECK(conc.at("eps_of_R").size() == 2);
    CHECK(conc.at("snapshot_times").size() >= 2);
    CHECK(!conc.at("flags").empty()); // lambda = 0.1 concentrates hard
    CHECK(fs::exists(dir.path / "scanout" / "resolved_config.txt"));

    // bubble
    const fs::path bcfg = dir.path / "bubble.cfg";
    write(bcfg, "gamma=0.05\nN=2\nline_L=20\nline_M=512\n");
    CliOverrides bov;
    bov.out = (dir.path / "bubbleout").string();
    bov.trace = flowdir.string();
    bov.at = "0.02,0,0.3";
    REQUIRE(run_experiment("bubble", bcfg.string(), bov) == 0);

    const std::string bcsv = slurp(dir.path / "bubbleout" / "bubble.csv");
    CHECK(bcsv.rfind("x,v_1,v_2\n", 0) == 0);
    CHECK(count_lines(bcsv) == 513);
    const json brep = load_json(dir.path / "bubbleout" / "bubble_report.json");
    CHECK(brep.at("scale") == 0.3);
    CHECK(brep.at("residual").get<double>() >= 0.0);
    CHECK(brep.at("N") == 2);
}

TEST_CASE("variational subcommand artifacts") {
    TempDir dir("vari");
    const fs::path cfg = dir.path / "v.cfg";
    write(cfg,
          "M=32\nn=2\ninitial_data=perturbed_constant(0.2)\nseed=4\neps=0.1\n"
          "iters=120\ntime_steps=16\n");
    CliOverrides ov;
    ov.out = (dir.path / "out").string();
    REQUIRE(run_experiment("variational", cfg.string(), ov) == 0);

    const fs::path out = dir.path / "out";
    const std::string mincsv = slurp(out / "minimizer.csv");
    CHECK(count_lines(mincsv) == 17 * 32 + 1); // (steps+1) x M rows + header
    const std::string ire = slurp(out / "ire.csv");
    CHECK(ire.rfind("t,I,R,E\n", 0) == 0);
    CHECK(count_lines(ire) == 18);

    const json rep = load_json(out / "variational_report.json");
    for (const char* key :
         {"final_energy", "static_energy", "el_residual", "el_residual_static",
          "monotonicity_residual", "converged", "stalled", "iterations"})
        CHECK(rep.contains(key));
    CHECK(rep.at("final_energy").get<double>() <=
          rep.at("static_energy").get<double>());
    CHECK_FALSE(fs::exists(out / "sweep.csv")); // sweep not requested
}

TEST_CASE("calibrate and wente subcommands") {
    TempDir dir("calib");
    const fs::path ccfg = dir.path / "c.cfg";
    write(ccfg, "M=128\n");
    CliOverrides cov;
    cov.out = (dir.path / "cout").string();
    REQUIRE(run_experiment("calibrate", ccfg.string(), cov) == 0);
    const json calib = load_json(dir.path / "cout" / "calibration.json");
    CHECK(calib.at("M") == 128);
    CHECK(std::abs(calib.at("C_half").get<double>() * 2.0 * pi - 1.0) <= 1e-8);
    CHECK(std::abs(calib.at("C_pv").get<double>() * pi - 1.0) <= 1e-2);
    CHECK(calib.at("residuals").at("pv").get<double>() <= 0.05);

    const fs::path wcfg = dir.path / "w.cfg";
    write(wcfg, "M=64\nsamples=3\nmax_mode=6\nseed=2\n");
    CliOverrides wov;
    wov.out = (dir.path / "wout").string();
    REQUIRE(run_experiment("wente", wcfg.string(), wov) == 0);
    const std::string wcsv = slurp(dir.path / "wout" / "wente.csv");
    CHECK(count_lines(wcsv) == 4); // header + 3 samples
    const json wrep = load_json(dir.path / "wout" / "wente_report.json");
    CHECK(wrep.at("max_ratio").get<double>() >= wrep.at("mean_ratio").get<double>());
    CHECK(wrep.at("mean_ratio").get<double>() > 0.0);
}

TEST_CASE("cli overrides beat config keys") {
    TempDir dir("ovr");
    const fs::path cfg = dir.path / "f.cfg";
    write(cfg,
          "M=32\nseed=1\ninitial_data=bandlimited_noise(0.1, 4)\ndt=0.01\n"
          "t_end=0.02\noutput_dir=" +
              (dir.path / "ignored").string() + "\n");
    CliOverrides ov;
    ov.out = (dir.path / "used").string();
    ov.seed = 5;
    REQUIRE(run_experiment("flow", cfg.string(), ov) == 0);
    CHECK(fs::exists(dir.path / "used" / "trace.csv"));
    CHECK_FALSE(fs::exists(dir.path / "ignored"));
    const std::string resolved = slurp(dir.path / "used" / "resolved_config.txt");
    CHECK(resolved.find("seed=5") != std::string::npos);
}

TEST_CASE("failures return nonzero without throwing") {
    TempDir dir("err");
    CliOverrides ov;
    ov.out = (dir.path / "out").string();
    CHECK(run_experiment("flow", "/nonexistent/config.cfg", ov) != 0);

    const fs::path cfg = dir.path / "bad.cfg";
    write(cfg, "M=64\nunknown_key=3\n");
    CHECK(run_experiment("flow", cfg.string(), ov) != 0);

    write(cfg, "M=63\n"); // odd grid is rejected by construction
    CHECK(run_experiment("flow", cfg.string(), ov) != 0);

    CHECK(run_experiment("fly", "", ov) != 0); // unknown subcommand
}

TEST_CASE("acceptance skip policy and fault injection") {
    // Under-resolved runs mark refinement-sensitive criteria as skipped.
    AcceptOptions coarse;
    coarse.M = 64;
    const auto skipped = acceptance_suite(coarse, {1});
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].skipped);
    CHECK_FALSE(skipped[0].pass);

    // A clean fast criterion passes.
    const auto chordal = acceptance_suite(AcceptOptions{}, {3});
    REQUIRE(chordal.size() == 1);
    CHECK(chordal[0].pass);

    // Corrupting the calibrated constant by 10% must fail stationarity.
    AcceptOptions corrupt;
    corrupt.c_half_scale = 1.1;
    const auto broken = acceptance_suite(corrupt, {4});
    REQUIRE(broken.size() == 1);
    CHECK_FALSE(broken[0].pass);
    CHECK_FALSE(broken[0].skipped);
}

} // TEST_SUITE
