#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/config.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

enum class Field { DeltaP, DeltaQ, Theta };

/// One scalar of a configuration: ensemble index (0-based) and field.
struct ParamRef {
    std::size_t ensemble = 0;
    Field field = Field::DeltaP;

    bool operator==(const ParamRef&) const = default;
};

/// Parses "ensembles[2].theta" style paths.
ParamRef parse_param_path(std::string_view path);
std::string to_string(const ParamRef& ref);

double get_param(const MultiplexConfig& config, ParamRef ref);
void set_param(MultiplexConfig& config, ParamRef ref, double value);

/// target := -source, applied after every assignment.
struct MirrorLink {
    ParamRef source;
    ParamRef target;

    bool operator==(const MirrorLink&) const = default;
};

/// A configuration with named free parameters and the links that tie the rest to them.
class ConfigTemplate {
public:
    struct NamedParam {
        std::string name;
        ParamRef ref;
    };

    ConfigTemplate(std::string name, MultiplexConfig base, std::vector<MirrorLink> links,
                   std::vector<NamedParam> free_params);

    const std::string& name() const noexcept { return name_; }
    const MultiplexConfig& base() const noexcept { return base_; }
    const std::vector<MirrorLink>& links() const noexcept { return links_; }
    const std::vector<NamedParam>& free_params() const noexcept { return free_; }

    /// Resolves a free-parameter name ("delta_p1", "theta2") or a raw path.
    ParamRef resolve(std::string_view name) const;

    /// Sets a parameter on the base configuration and re-applies links.
    ConfigTemplate& assign(std::string_view name, double value);
    ConfigTemplate& set_physics(double gamma3N, double tau);

    /// Base with `assignments` applied, then every link (template links first, then `extra_links`).
    MultiplexConfig instantiate(const std::vector<std::pair<ParamRef, double>>& assignments = {},
                                const std::vector<MirrorLink>& extra_links = {}) const;

private:
    std::string name_;
    MultiplexConfig base_;
    std::vector<MirrorLink> links_;
    std::vector<NamedParam> free_;
};

/// "two-symmetric":   [(dp1, 0, 0), (-dp1, 0, theta2)]
/// "three-symmetric": [(dp1, 0, theta1), (0, 0, 0), (-dp1, 0, theta2)]
/// Free parameters start at zero; gamma3N = 5, tau = 0.25.
ConfigTemplate preset(std::string_view name);

/// Single-ensemble template with all shifts zero.
ConfigTemplate single_template(const MultiplexConfig& config);

struct SweepAxis {
    std::string name;
    ParamRef target;
    std::vector<double> values;
    std::optional<MirrorLink> link;
};

/// Resolves `name` against the template and validates that values are non-empty and strictly monotone.
SweepAxis make_axis(const ConfigTemplate& tmpl, std::string_view name, std::vector<double> values,
                    std::optional<MirrorLink> link = std::nullopt);

/// `count` evenly spaced values with both endpoints included.
std::vector<double> linspace(double start, double stop, std::size_t count);

enum class CellStatus { Ok, NullKernel, Failed };
std::string_view to_string(CellStatus s) noexcept;

struct CellFailure {
    std::size_t i1 = 0;
    std::size_t i2 = 0;
    CellStatus kind = CellStatus::Failed;
    std::string message;
};

/// Entropy over a 1-D or 2-D parameter grid. values is axis1-major; failed cells hold NaN.
struct EntropyMap {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    std::vector<double> values;
    std::vector<CellStatus> status;
    std::vector<CellFailure> failures;

    std::size_t n1() const noexcept { return axis1.values.size(); }
    std::size_t n2() const noexcept { return axis2 ? axis2->values.size() : 1; }
    double at(std::size_t i1, std::size_t i2 = 0) const { return values.at(i1 * n2() + i2); }
    CellStatus status_at(std::size_t i1, std::size_t i2 = 0) const { return status.at(i1 * n2() + i2); }
};

/// Workers from BIPHOTON_WORKERS, else hardware concurrency (at least 1).
unsigned default_worker_count();

struct SweepOptions {
    unsigned workers = 0; ///< 0 = default_worker_count()
};

EntropyMap sweep_entropy(const ConfigTemplate& tmpl, const SweepAxis& axis1,
                         const std::optional<SweepAxis>& axis2, const FrequencyGrid& grid,
                         SweepOptions options = {});

/// Configuration evaluated at one cell of a sweep.
MultiplexConfig cell_config(const ConfigTemplate& tmpl, const SweepAxis& axis1,
                            const std::optional<SweepAxis>& axis2, std::size_t i1, std::size_t i2);

struct ExtremumPoint {
    std::size_t i1 = 0;
    std::size_t i2 = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    double S = 0.0;
};

struct ExtremaReport {
    std::vector<ExtremumPoint> maxima;
    std::vector<ExtremumPoint> minima;
    ExtremumPoint global_max;
    ExtremumPoint global_min;
};

/// Strict local extrema over the in-grid 4-neighbourhood (failed cells excluded), plus the
/// global extrema over finite cells (first in axis1-major order on ties). Throws
/// ValidationError if the map has no finite cell.
ExtremaReport find_extrema(const EntropyMap& map);

struct ConvergenceResult {
    double S_coarse = 0.0;
    double S_fine = 0.0;
    double delta = 0.0; ///< |S_fine - S_coarse|
};

inline constexpr double convergence_tolerance_bits = 1e-3;

ConvergenceResult convergence_check(const MultiplexConfig& config, const FrequencyGrid& grid, int factor = 2);

} // namespace biphoton
