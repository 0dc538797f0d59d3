#include "biphoton/cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "biphoton/entanglement.hpp"
#include "biphoton/error.hpp"
#include "biphoton/io.hpp"
#include "biphoton/schmidt.hpp"
#include "biphoton/sweep.hpp"

namespace biphoton::cli {

namespace fs = std::filesystem;

namespace {

/// Flags shared by every subcommand that needs a configuration.
struct ConfigFlags {
    std::string config_path;
    std::string preset;
    std::optional<double> delta_p1;
    std::string theta1;
    std::string theta2;
    std::optional<double> gamma3N;
    std::optional<double> tau;
    std::optional<int> n;
    std::optional<double> window;
    std::string scheme;
    std::optional<int> panels;
    std::string out_dir = ".";

    void attach(CLI::App& app) {
        app.add_option("-c,--config", config_path, "YAML configuration file");
        app.add_option("--preset", preset, "two-symmetric | three-symmetric | single");
        app.add_option("--delta-p1", delta_p1, "preset idler shift of ensemble 1 (units of Gamma_3)");
        app.add_option("--theta1", theta1, "preset phase theta1 (radians or e.g. 4/3pi)");
        app.add_option("--theta2", theta2, "preset phase theta2 (radians or e.g. 2/3pi)");
        app.add_option("--gamma3N", gamma3N, "superradiant decay constant (units of Gamma_3)");
        app.add_option("--tau", tau, "pump pulse width (units of 1/Gamma_3)");
        app.add_option("-n,--points", n, "grid points per axis");
        app.add_option("--window", window, "half-width of the symmetric spectral window");
        app.add_option("--scheme", scheme, "midpoint | gauss-legendre");
        app.add_option("--panels", panels, "Gauss-Legendre panel count");
        app.add_option("-o,--out", out_dir, "output directory");
    }

    /// Builds the run configuration; `default_n` applies when neither file nor flags set a resolution.
    RunConfig resolve(int default_n) const {
        std::optional<RunConfig> run;
        bool n_from_file = false;
        if (!config_path.empty()) {
            run = load_config(config_path);
            const auto root = YAML::LoadFile(config_path);
            n_from_file = root["grid"] && (root["grid"]["n"] || root["grid"]["n_s"] || root["grid"]["n_i"]);
        }
        if (!preset.empty()) {
            const bool single = preset == "single";
            auto tmpl = single ? single_template(MultiplexConfig({EnsembleShift(0, 0, 0)})) : biphoton::preset(preset);
            tmpl.set_physics(run ? run->config.gamma3N() : MultiplexConfig::default_gamma3N,
                             run ? run->config.tau() : MultiplexConfig::default_tau);
            GridSpec grid = run ? run->grid : GridSpec{};
            auto axes = run ? run->axes : std::vector<SweepAxis>{};
            run = RunConfig{tmpl.base(), grid, single ? std::nullopt : std::optional<std::string>(preset), {}};
            for (auto& ax : axes) ax.target = tmpl.resolve(ax.name);
            run->axes = std::move(axes);
        }
        if (!run) run = RunConfig{MultiplexConfig({EnsembleShift(0, 0, 0)}), GridSpec{}, std::nullopt, {}};

        auto tmpl = run->make_template();
        if (gamma3N || tau) tmpl.set_physics(gamma3N.value_or(run->config.gamma3N()), tau.value_or(run->config.tau()));
        if (delta_p1) tmpl.assign("delta_p1", *delta_p1);
        if (!theta1.empty()) tmpl.assign("theta1", parse_phase(theta1));
        if (!theta2.empty()) tmpl.assign("theta2", parse_phase(theta2));
        run->config = tmpl.instantiate();

        if (n) run->grid.n_s = run->grid.n_i = *n;
        else if (!n_from_file) run->grid.n_s = run->grid.n_i = default_n;
        if (window) {
            run->grid.s_range = {-*window, *window};
            run->grid.i_range = {-*window, *window};
        }
        if (!scheme.empty()) run->grid.scheme = parse_scheme(scheme);
        if (panels) run->grid.panels = *panels;
        return *run;
    }
};

std::string fmt_d(double v) { return format_double(v); }

void write_file(const fs::path& path, const std::string& text, std::vector<fs::path>& outputs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
    f << text;
    if (!f) throw Error(fmt::format("write to '{}' failed", path.string()));
    outputs.push_back(path);
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& run, double seconds,
                    const std::vector<fs::path>& outputs) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "command" << YAML::Value << command;
    out << YAML::Key << "version" << YAML::Value << version;
    out << YAML::Key << "duration_seconds" << YAML::Value << fmt_d(seconds);
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : outputs) out << p.filename().string();
    out << YAML::EndSeq;
    out << YAML::Key << "config" << YAML::Value << YAML::Load(write_config(run));
    out << YAML::EndMap;
    std::ofstream f(dir / "manifest.yaml", std::ios::binary);
    f << out.c_str() << "\n";
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

int cmd_eval(const ConfigFlags& flags, double ws, double wi, std::ostream& out) {
    const RunConfig run = flags.resolve(1024);
    build_kernel(run.config, FrequencyGrid(run.grid)); // null states have no amplitude to report
    const cplx f = eval_spectral_amplitude(run.config, ws, wi);
    out << fmt_d(f.real()) << " " << fmt_d(f.imag()) << "\n";
    return ok;
}

int cmd_decompose(const ConfigFlags& flags, std::size_t modes, std::ostream& out) {
    Timer timer;
    const RunConfig run = flags.resolve(1024);
    const FrequencyGrid grid(run.grid);
    const auto spectrum = schmidt_decompose(build_kernel(run.config, grid), modes);
    const auto dir = prepare_dir(flags.out_dir);
    std::vector<fs::path> outputs;

    std::string ev = "n,lambda\n";
    for (std::size_t n = 0; n < spectrum.eigenvalues.size(); ++n)
        ev += fmt::format("{},{}\n", n + 1, fmt_d(spectrum.eigenvalues[n]));
    write_file(dir / "eigenvalues.csv", ev, outputs);

    auto mode_table = [&](const ComplexMatrix& m, const std::vector<double>& nodes) {
        std::string t = "node";
        for (Eigen::Index c = 0; c < m.cols(); ++c) t += fmt::format(",re_{0},im_{0},density_{0}", c + 1);
        t += "\n";
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            t += fmt_d(nodes[static_cast<std::size_t>(r)]);
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                t += fmt::format(",{},{},{}", fmt_d(m(r, c).real()), fmt_d(m(r, c).imag()), fmt_d(std::norm(m(r, c))));
            t += "\n";
        }
        return t;
    };
    write_file(dir / "signal_modes.csv", mode_table(spectrum.signal_modes, grid.signal().nodes), outputs);
    write_file(dir / "idler_modes.csv", mode_table(spectrum.idler_modes, grid.idler().nodes), outputs);
    write_manifest(dir, "decompose", run, timer.seconds(), outputs);
    out << "S = " << fmt_d(entropy_bits(spectrum.eigenvalues)) << " bits\n";
    return ok;
}

int cmd_entropy(const ConfigFlags& flags, std::ostream& out) {
    Timer timer;
    const RunConfig run = flags.resolve(1024);
    const double s = entropy_for(run.config, FrequencyGrid(run.grid));
    out << fmt_d(s) << "\n";
    write_manifest(prepare_dir(flags.out_dir), "entropy", run, timer.seconds(), {});
    return ok;
}

SweepAxis axis_from_flag(const ConfigTemplate& tmpl, const std::string& spec) {
    // name=start:stop:count  or  name=v1,v2,...
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ValidationError(fmt::format("axis '{}' must look like name=start:stop:count", spec));
    const std::string name = spec.substr(0, eq);
    const std::string body = spec.substr(eq + 1);
    const bool phase = tmpl.resolve(name).field == Field::Theta;
    auto value = [&](const std::string& t) {
        if (phase) return parse_phase(t);
        double v = 0.0;
        auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc{} || r.ptr != t.data() + t.size()) throw ValidationError(fmt::format("bad axis value '{}'", t));
        return v;
    };
    std::vector<double> values;
    if (body.find(':') != std::string::npos) {
        const auto parts = CLI::detail::split(body, ':');
        if (parts.size() != 3) throw ValidationError(fmt::format("axis '{}' range must be start:stop:count", spec));
        const int count = std::stoi(parts[2]);
        if (count < 1) throw ValidationError("axis count must be >= 1");
        values = linspace(value(parts[0]), value(parts[1]), static_cast<std::size_t>(count));
    } else {
        for (const auto& p : CLI::detail::split(body, ',')) values.push_back(value(p));
    }
    return make_axis(tmpl, name, std::move(values));
}

int cmd_sweep(const ConfigFlags& flags, const std::vector<std::string>& axis_flags, unsigned workers, std::ostream& out) {
    Timer timer;
    RunConfig run = flags.resolve(512);
    const auto tmpl = run.make_template();
    if (!axis_flags.empty()) {
        run.axes.clear();
        for (const auto& a : axis_flags) run.axes.push_back(axis_from_flag(tmpl, a));
    }
    if (run.axes.empty() || run.axes.size() > 2) throw ValidationError("sweep needs one or two axes (--axis or sweep.axes)");
    const std::optional<SweepAxis> axis2 = run.axes.size() == 2 ? std::optional(run.axes[1]) : std::nullopt;
    const auto map = sweep_entropy(tmpl, run.axes[0], axis2, FrequencyGrid(run.grid), {workers});

    const auto dir = prepare_dir(flags.out_dir);
    std::vector<fs::path> outputs;
    std::string csv = "axis1,axis2,S_bits,status\n";
    for (std::size_t i1 = 0; i1 < map.n1(); ++i1)
        for (std::size_t i2 = 0; i2 < map.n2(); ++i2) {
            const auto st = map.status_at(i1, i2);
            csv += fmt::format("{},{},{},{}\n", fmt_d(map.axis1.values[i1]), axis2 ? fmt_d(axis2->values[i2]) : "",
                               st == CellStatus::Ok ? fmt_d(map.at(i1, i2)) : "nan", to_string(st));
        }
    write_file(dir / "map.csv", csv, outputs);

    std::string ext = "kind,axis1,axis2,S_bits\n";
    if (map.failures.size() < map.values.size()) {
        const auto rep = find_extrema(map);
        auto row = [&](const char* kind, const ExtremumPoint& p) {
            ext += fmt::format("{},{},{},{}\n", kind, fmt_d(p.x1), axis2 ? fmt_d(p.x2) : "", fmt_d(p.S));
        };
        row("global_max", rep.global_max);
        row("global_min", rep.global_min);
        for (const auto& p : rep.maxima) row("local_max", p);
        for (const auto& p : rep.minima) row("local_min", p);
    }
    write_file(dir / "extrema.csv", ext, outputs);
    write_manifest(dir, "sweep", run, timer.seconds(), outputs);
    out << fmt::format("{} cells, {} failures\n", map.values.size(), map.failures.size());
    return ok;
}

int cmd_check(const ConfigFlags& flags, int factor, int oracle_n, std::ostream& out) {
    Timer timer;
    const RunConfig run = flags.resolve(1024);
    const auto conv = convergence_check(run.config, FrequencyGrid(run.grid), factor);
    const bool conv_ok = conv.delta < convergence_tolerance_bits;
    out << fmt::format("convergence: S({}) = {}  S({}) = {}  |dS| = {:.3e}  {}\n", run.grid.n_s, fmt_d(conv.S_coarse),
                       run.grid.n_s * factor, fmt_d(conv.S_fine), conv.delta, conv_ok ? "ok" : "FAIL");

    GridSpec small = run.grid;
    small.n_s = small.n_i = oracle_n;
    if (small.scheme == QuadratureScheme::GaussLegendre) small.panels = 0;
    const auto kernel = build_kernel(run.config, FrequencyGrid(small));
    const auto svd = schmidt_decompose(kernel, 1).eigenvalues;
    const auto oracle = oracle_reduced_density(kernel);
    double worst = 0.0;
    for (std::size_t n = 0; n < svd.size(); ++n) worst = std::max(worst, std::abs(svd[n] - oracle[n]));
    const bool oracle_ok = worst <= 1e-8;
    out << fmt::format("oracle: max |lambda_svd - lambda_rho| = {:.3e} on {}x{}  {}\n", worst, oracle_n, oracle_n,
                       oracle_ok ? "ok" : "FAIL");
    write_manifest(prepare_dir(flags.out_dir), "check", run, timer.seconds(), {});
    return conv_ok && oracle_ok ? ok : numerical_error;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Schmidt decomposition and entanglement entropy of multiplexed biphoton states", "biphoton"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    ConfigFlags flags;
    double ws = 0.0, wi = 0.0;
    std::size_t modes = 10;
    std::vector<std::string> axis_flags;
    unsigned workers = 0;
    int factor = 2, oracle_n = 128;

    auto* eval = app.add_subcommand("eval", "print the unnormalized amplitude at one frequency pair");
    flags.attach(*eval);
    eval->add_option("--ws", ws, "signal detuning")->required();
    eval->add_option("--wi", wi, "idler detuning")->required();

    auto* decompose = app.add_subcommand("decompose", "write eigenvalues.csv and mode tables");
    flags.attach(*decompose);
    decompose->add_option("--modes", modes, "number of modes to export")->check(CLI::PositiveNumber);

    auto* entropy = app.add_subcommand("entropy", "print the entropy of entanglement in bits");
    flags.attach(*entropy);

    auto* sweep = app.add_subcommand("sweep", "entropy over a 1-D or 2-D parameter grid");
    flags.attach(*sweep);
    sweep->add_option("--axis", axis_flags, "name=start:stop:count or name=v1,v2,... (repeat for a 2-D map)");
    sweep->add_option("--workers", workers, "parallel cells (default: BIPHOTON_WORKERS or all cores)");

    auto* check = app.add_subcommand("check", "grid convergence and SVD-vs-oracle comparison");
    flags.attach(*check);
    check->add_option("--factor", factor, "refinement factor")->check(CLI::Range(2, 8));
    check->add_option("--oracle-points", oracle_n, "grid points per axis for the oracle comparison")->check(CLI::Range(2, 512));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*eval) return cmd_eval(flags, ws, wi, out);
        if (*decompose) return cmd_decompose(flags, modes, out);
        if (*entropy) return cmd_entropy(flags, out);
        if (*sweep) return cmd_sweep(flags, axis_flags, workers, out);
        if (*check) return cmd_check(flags, factor, oracle_n, out);
    } catch (const NullKernelError& e) {
        err << "null kernel: " << e.what() << "\n";
        return null_kernel;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return numerical_error;
    }
    return usage_error;
}

} // namespace biphoton::cli
