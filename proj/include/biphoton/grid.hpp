#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace biphoton {

enum class QuadratureScheme { Midpoint, GaussLegendre };

std::string_view to_string(QuadratureScheme s) noexcept;
/// Accepts "midpoint"/"uniform-midpoint" and "gauss-legendre"/"gl".
QuadratureScheme parse_scheme(std::string_view name);

struct Interval {
    double min = -300.0;
    double max = 300.0;

    double length() const noexcept { return max - min; }
    bool operator==(const Interval&) const = default;
};

/// Quadrature rule on one frequency axis.
struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// How to discretize one axis. `panels` only matters for Gauss-Legendre, where
/// `points` must be a multiple of it.
struct GridSpec {
    Interval s_range;
    Interval i_range;
    int n_s = 1024;
    int n_i = 1024;
    QuadratureScheme scheme = QuadratureScheme::Midpoint;
    int panels = 0; ///< 0 selects one panel per 8 nodes

    bool operator==(const GridSpec&) const = default;
};

/// Discretization of the (signal detuning, idler detuning) rectangle.
class FrequencyGrid {
public:
    explicit FrequencyGrid(const GridSpec& spec);

    const GridSpec& spec() const noexcept { return spec_; }
    const AxisRule& signal() const noexcept { return signal_; }
    const AxisRule& idler() const noexcept { return idler_; }
    int n_s() const noexcept { return spec_.n_s; }
    int n_i() const noexcept { return spec_.n_i; }

    /// Same ranges and scheme, every count multiplied by `factor`.
    FrequencyGrid refined(int factor) const;

private:
    GridSpec spec_;
    AxisRule signal_;
    AxisRule idler_;
};

FrequencyGrid build_grid(Interval s_range, Interval i_range, int n_s, int n_i,
                         QuadratureScheme scheme = QuadratureScheme::Midpoint, int panels = 0);

/// Midpoint rule with `n` equal cells.
AxisRule midpoint_rule(Interval range, int n);
/// `panels` equal panels, each carrying an `n / panels` point Gauss-Legendre rule.
AxisRule gauss_legendre_rule(Interval range, int n, int panels);
/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1], ascending.
AxisRule gauss_legendre_reference(int order);

} // namespace biphoton
