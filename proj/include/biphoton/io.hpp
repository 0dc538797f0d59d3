#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/config.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/sweep.hpp"

namespace biphoton {

/// Everything a run reads from a configuration file.
///
/// The file is YAML:
///
///     gamma3N: 5
///     tau: 0.25
///     grid: {s_min: -300, s_max: 300, i_min: -300, i_max: 300, n_s: 1024, n_i: 1024, scheme: midpoint}
///     ensembles:
///       - {delta_p: 5, delta_q: 0, theta: 0}
///       - {delta_p: -5, delta_q: 0, theta: pi}
///     sweep:
///       axes:
///         - {target: theta2, start: 0, stop: 2pi, count: 33}
///
/// Instead of `ensembles` a file may give `preset: two-symmetric` with
/// `params: {delta_p1: 5, theta2: pi}`. Phases accept radians or multiples of pi ("4/3pi").
struct RunConfig {
    MultiplexConfig config;
    GridSpec grid;
    std::optional<std::string> preset;
    std::vector<SweepAxis> axes;

    /// Preset template when `preset` is set, otherwise a template over the explicit ensembles.
    ConfigTemplate make_template() const;

    bool operator==(const RunConfig& other) const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string write_config(const RunConfig& run);

/// "pi", "2pi", "4/3pi", "-pi/2", "3pi/4", "1.5pi" or a plain number of radians.
double parse_phase(std::string_view text);

/// 17 significant digits, shortest exponent form; parses back to the same double.
std::string format_double(double v);

} // namespace biphoton
