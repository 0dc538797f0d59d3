#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "biphoton/cli.hpp"
#include "biphoton/io.hpp"
#include "biphoton/schmidt.hpp"

using namespace biphoton;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("biphoton_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    std::string line;
    while (std::getline(f, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("decompose writes normalized eigenvalues and mode tables") {
    const auto dir = scratch("decompose");
    const auto r = run({"decompose", "-n", "256", "--modes", "3", "-o", dir.string()});
    REQUIRE(r.code == cli::ok);
    const auto ev = read_csv(dir / "eigenvalues.csv");
    REQUIRE(ev.size() == 257);
    CHECK(ev[0] == std::vector<std::string>{"n", "lambda"});
    double total = 0.0;
    for (std::size_t k = 1; k < ev.size(); ++k) total += std::stod(ev[k][1]);
    CHECK(std::abs(total - 1.0) <= 1e-9);

    // CSV values reproduce the in-memory eigenvalues exactly
    const auto spec = schmidt_decompose(
        build_kernel(MultiplexConfig({EnsembleShift()}), build_grid({-300, 300}, {-300, 300}, 256, 256)), 3);
    for (std::size_t k = 1; k < ev.size(); ++k) CHECK(std::strtod(ev[k][1].c_str(), nullptr) == spec.eigenvalues[k - 1]);

    const auto modes = read_csv(dir / "idler_modes.csv");
    REQUIRE(modes.size() == 257);
    CHECK(modes[0].size() == 10);
    CHECK(modes[0][0] == "node");
    CHECK(modes[0][9] == "density_3");
    CHECK(fs::exists(dir / "signal_modes.csv"));

    const auto manifest = YAML::LoadFile((dir / "manifest.yaml").string());
    CHECK(manifest["command"].as<std::string>() == "decompose");
    CHECK(manifest["outputs"].size() == 3);
    YAML::Emitter e;
    e << manifest["config"];
    const auto resolved = parse_config(e.c_str());
    CHECK(resolved.grid.n_s == 256);
    CHECK(resolved.config == MultiplexConfig({EnsembleShift()}));
}

TEST_CASE("sweep map row at delta_p1 = 5 has its minimum at theta2 = pi") {
    const auto dir = scratch("sweep");
    const auto r = run({"sweep", "--preset", "two-symmetric", "--axis", "delta_p1=5,50", "--axis", "theta2=0:2pi:33", "-n",
                        "256", "--workers", "2", "-o", dir.string()});
    REQUIRE(r.code == cli::ok);
    const auto rows = read_csv(dir / "map.csv");
    REQUIRE(rows.size() == 1 + 2 * 33);
    CHECK(rows[0] == std::vector<std::string>{"axis1", "axis2", "S_bits", "status"});
    double best = INFINITY, at = -1;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (std::stod(rows[k][0]) != 5.0) continue;
        CHECK(rows[k][3] == "ok");
        const double s = std::stod(rows[k][2]);
        if (s < best) {
            best = s;
            at = std::stod(rows[k][1]);
        }
    }
    CHECK(at == doctest::Approx(pi).epsilon(1e-15));
    const auto ext = read_csv(dir / "extrema.csv");
    CHECK(ext[0] == std::vector<std::string>{"kind", "axis1", "axis2", "S_bits"});
    CHECK(ext[1][0] == "global_max");
    CHECK(ext[2][0] == "global_min");

    // identical invocations give byte-identical CSV
    const auto dir2 = scratch("sweep2");
    run({"sweep", "--preset", "two-symmetric", "--axis", "delta_p1=5,50", "--axis", "theta2=0:2pi:33", "-n", "256",
         "--workers", "1", "-o", dir2.string()});
    CHECK(slurp(dir / "map.csv") == slurp(dir2 / "map.csv"));
    CHECK(slurp(dir / "extrema.csv") == slurp(dir2 / "extrema.csv"));
}

TEST_CASE("sweep records null cells in the status column") {
    const auto dir = scratch("sweep_null");
    const auto r = run({"sweep", "--preset", "two-symmetric", "--theta2", "pi", "--axis", "delta_p1=-2,0,2", "-n", "64",
                        "-o", dir.string()});
    REQUIRE(r.code == cli::ok);
    const auto rows = read_csv(dir / "map.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[2][2] == "nan");
    CHECK(rows[2][3] == "null_kernel");
    CHECK(rows[1][3] == "ok");
}

TEST_CASE("sweep axes from a configuration file") {
    const auto dir = scratch("sweep_cfg");
    std::ofstream(dir / "cfg.yaml") << "preset: three-symmetric\nparams: {delta_p1: 6}\ngrid: {n: 64}\n"
                                       "sweep:\n  axes:\n    - {target: theta1, start: 0, stop: 2pi, count: 3}\n"
                                       "    - {target: theta2, start: 0, stop: 2pi, count: 4}\n";
    const auto r = run({"sweep", "-c", (dir / "cfg.yaml").string(), "-o", dir.string()});
    REQUIRE(r.code == cli::ok);
    CHECK(read_csv(dir / "map.csv").size() == 13);
}

TEST_CASE("eval prints the amplitude and flags the null configuration") {
    const auto r = run({"eval", "--preset", "two-symmetric", "--delta-p1", "5", "--theta2", "pi", "--ws", "0", "--wi", "0",
                        "-n", "64"});
    REQUIRE(r.code == cli::ok);
    std::istringstream in(r.out);
    double re, im;
    in >> re >> im;
    CHECK(std::abs(re) < 1e-15);
    CHECK(im == doctest::Approx(0.32).epsilon(1e-14));

    const auto null = run({"eval", "--preset", "two-symmetric", "--delta-p1", "0", "--theta2", "pi", "--ws", "0", "--wi", "0"});
    CHECK(null.code == cli::null_kernel);
    CHECK(run({"entropy", "--preset", "two-symmetric", "--theta2", "pi", "-n", "32", "-o", scratch("e").string()}).code ==
          cli::null_kernel);
}

TEST_CASE("entropy prints S and writes a manifest") {
    const auto dir = scratch("entropy");
    const auto r = run({"entropy", "--preset", "two-symmetric", "--delta-p1", "0", "--theta2", "0", "-n", "128", "-o",
                        dir.string()});
    REQUIRE(r.code == cli::ok);
    const auto single = run({"entropy", "-n", "128", "-o", dir.string()});
    CHECK(std::stod(r.out) == std::stod(single.out));
    CHECK(fs::exists(dir / "manifest.yaml"));
}

TEST_CASE("check passes on a converged configuration") {
    const auto r = run({"check", "-n", "512", "--oracle-points", "64", "-o", scratch("check").string()});
    CHECK(r.code == cli::ok);
    CHECK(r.out.find("convergence") != std::string::npos);
    CHECK(r.out.find("oracle") != std::string::npos);
}

TEST_CASE("check fails when the grid is far from converged") {
    const auto r = run({"check", "-n", "8", "--oracle-points", "8", "-o", scratch("check_bad").string()});
    CHECK(r.code == cli::numerical_error);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("usage and validation exit codes") {
    CHECK(run({}).code == cli::usage_error);
    CHECK(run({"frobnicate"}).code == cli::usage_error);
    CHECK(run({"eval", "--ws", "0"}).code == cli::usage_error);
    CHECK(run({"entropy", "--tau", "-1"}).code == cli::numerical_error);
    CHECK(run({"entropy", "--preset", "nine"}).code == cli::numerical_error);
    CHECK(run({"entropy", "-c", "/nonexistent/cfg.yaml"}).code == cli::numerical_error);
    CHECK(run({"--help"}).code == cli::ok);

    const auto dir = scratch("bad_cfg");
    std::ofstream(dir / "bad.yaml") << "tau: -1\nensembles:\n  - {delta_p: 0}\n";
    const auto bad = run({"entropy", "-c", (dir / "bad.yaml").string()});
    CHECK(bad.code == cli::numerical_error);
    CHECK(bad.err.find("tau") != std::string::npos);
}

TEST_CASE("the installed binary reports exit codes to the shell") {
    const std::string bin = BIPHOTON_CLI_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("eval --preset two-symmetric --delta-p1 0 --theta2 pi --ws 0 --wi 0") == 3);
    CHECK(status("eval --preset two-symmetric --delta-p1 5 --theta2 pi --ws 0 --wi 0 -n 32") == 0);
    CHECK(status("bogus") == 1);
}
