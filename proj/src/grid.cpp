#include "biphoton/grid.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "biphoton/error.hpp"

namespace biphoton {

std::string_view to_string(QuadratureScheme s) noexcept {
    switch (s) {
    case QuadratureScheme::Midpoint: return "midpoint";
    case QuadratureScheme::GaussLegendre: return "gauss-legendre";
    }
    return "?";
}

QuadratureScheme parse_scheme(std::string_view name) {
    if (name == "midpoint" || name == "uniform-midpoint") return QuadratureScheme::Midpoint;
    if (name == "gauss-legendre" || name == "gl") return QuadratureScheme::GaussLegendre;
    throw ValidationError(fmt::format("unknown quadrature scheme '{}'", name));
}

namespace {

void check_axis(Interval range, int n, const char* axis) {
    if (!std::isfinite(range.min) || !std::isfinite(range.max) || !(range.min < range.max))
        throw ValidationError(fmt::format("invalid range for {} axis: [{}, {}]", axis, range.min, range.max));
    if (n < 2) throw ValidationError(fmt::format("invalid count for {} axis: {} (need >= 2)", axis, n));
}

int resolve_panels(int n, int panels) {
    if (panels == 0) {
        if (n % 8 != 0) throw ValidationError(fmt::format("gauss-legendre needs an explicit panel count for n = {}", n));
        return n / 8;
    }
    if (panels < 1 || n % panels != 0)
        throw ValidationError(fmt::format("gauss-legendre panel count {} must divide n = {}", panels, n));
    return panels;
}

AxisRule build_axis(Interval range, int n, QuadratureScheme scheme, int panels, const char* axis) {
    check_axis(range, n, axis);
    return scheme == QuadratureScheme::Midpoint ? midpoint_rule(range, n)
                                                : gauss_legendre_rule(range, n, resolve_panels(n, panels));
}

} // namespace

AxisRule midpoint_rule(Interval range, int n) {
    check_axis(range, n, "midpoint");
    AxisRule rule;
    rule.nodes.resize(n);
    rule.weights.assign(n, range.length() / n);
    const double h = range.length() / n;
    const double center = 0.5 * (range.min + range.max);
    // offsets are exact half-integers so a symmetric window gives exactly mirrored nodes
    for (int j = 0; j < n; ++j) rule.nodes[j] = center + (j + 0.5 - 0.5 * n) * h;
    return rule;
}

AxisRule gauss_legendre_reference(int order) {
    if (order < 1) throw ValidationError("gauss-legendre order must be >= 1");
    // P_order(x) and its derivative by the three-term recurrence
    auto legendre = [order](double x) {
        double p0 = 1.0, p1 = x;
        for (int l = 2; l <= order; ++l) {
            const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
            p0 = p1;
            p1 = p2;
        }
        const double dp = order * (x * p1 - p0) / (x * x - 1.0);
        return std::pair{p1, dp};
    };

    AxisRule rule;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);
    if (order == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    for (int k = 0; k < (order + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - k] = x;
        rule.nodes[k] = -x;
        rule.weights[order - 1 - k] = w;
        rule.weights[k] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

AxisRule gauss_legendre_rule(Interval range, int n, int panels) {
    check_axis(range, n, "gauss-legendre");
    panels = resolve_panels(n, panels);
    const int order = n / panels;
    const AxisRule ref = gauss_legendre_reference(order);
    const double width = range.length() / panels;
    const double half = 0.5 * width;
    const double center = 0.5 * (range.min + range.max);
    AxisRule rule;
    rule.nodes.reserve(n);
    rule.weights.reserve(n);
    for (int p = 0; p < panels; ++p) {
        const double pc = center + (p + 0.5 - 0.5 * panels) * width;
        for (int k = 0; k < order; ++k) {
            rule.nodes.push_back(pc + half * ref.nodes[k]);
            rule.weights.push_back(half * ref.weights[k]);
        }
    }
    return rule;
}

FrequencyGrid::FrequencyGrid(const GridSpec& spec)
    : spec_(spec),
      signal_(build_axis(spec.s_range, spec.n_s, spec.scheme, spec.panels, "signal")),
      idler_(build_axis(spec.i_range, spec.n_i, spec.scheme, spec.panels, "idler")) {}

FrequencyGrid FrequencyGrid::refined(int factor) const {
    if (factor < 1) throw ValidationError("refinement factor must be >= 1");
    GridSpec fine = spec_;
    fine.n_s *= factor;
    fine.n_i *= factor;
    if (fine.panels > 0) fine.panels *= factor;
    return FrequencyGrid(fine);
}

FrequencyGrid build_grid(Interval s_range, Interval i_range, int n_s, int n_i, QuadratureScheme scheme,
                         int panels) {
    return FrequencyGrid(GridSpec{s_range, i_range, n_s, n_i, scheme, panels});
}

} // namespace biphoton
