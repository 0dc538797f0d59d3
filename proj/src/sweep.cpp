#include "biphoton/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "biphoton/entanglement.hpp"
#include "biphoton/error.hpp"

namespace biphoton {

ParamRef parse_param_path(std::string_view path) {
    // ensembles[<index>].<field>
    constexpr std::string_view prefix = "ensembles[";
    auto fail = [&] {
        return ValidationError(fmt::format("invalid parameter path '{}' (expected ensembles[i].delta_p|delta_q|theta)", path));
    };
    if (!path.starts_with(prefix)) throw fail();
    const auto close = path.find("].", prefix.size());
    if (close == std::string_view::npos) throw fail();
    std::size_t index = 0;
    const auto digits = path.substr(prefix.size(), close - prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) throw fail();
    const auto field = path.substr(close + 2);
    if (field == "delta_p") return {index, Field::DeltaP};
    if (field == "delta_q") return {index, Field::DeltaQ};
    if (field == "theta") return {index, Field::Theta};
    throw fail();
}

std::string to_string(const ParamRef& ref) {
    const char* f = ref.field == Field::DeltaP ? "delta_p" : ref.field == Field::DeltaQ ? "delta_q" : "theta";
    return fmt::format("ensembles[{}].{}", ref.ensemble, f);
}

namespace {

void check_ref(const MultiplexConfig& config, ParamRef ref) {
    if (ref.ensemble >= config.size())
        throw ValidationError(fmt::format("{} refers past the {} configured ensembles", to_string(ref), config.size()));
}

void apply_link(MultiplexConfig& config, const MirrorLink& link) {
    set_param(config, link.target, -get_param(config, link.source));
}

} // namespace

double get_param(const MultiplexConfig& config, ParamRef ref) {
    check_ref(config, ref);
    const auto& e = config.ensembles()[ref.ensemble];
    switch (ref.field) {
    case Field::DeltaP: return e.delta_p();
    case Field::DeltaQ: return e.delta_q();
    case Field::Theta: return e.theta();
    }
    return 0.0;
}

void set_param(MultiplexConfig& config, ParamRef ref, double value) {
    check_ref(config, ref);
    auto& e = config.ensembles()[ref.ensemble];
    switch (ref.field) {
    case Field::DeltaP: e.set_delta_p(value); break;
    case Field::DeltaQ: e.set_delta_q(value); break;
    case Field::Theta: e.set_theta(value); break;
    }
}

ConfigTemplate::ConfigTemplate(std::string name, MultiplexConfig base, std::vector<MirrorLink> links,
                               std::vector<NamedParam> free_params)
    : name_(std::move(name)), base_(std::move(base)), links_(std::move(links)), free_(std::move(free_params)) {
    for (const auto& l : links_) {
        check_ref(base_, l.source);
        check_ref(base_, l.target);
    }
    for (const auto& l : links_) apply_link(base_, l);
}

ParamRef ConfigTemplate::resolve(std::string_view name) const {
    for (const auto& p : free_)
        if (p.name == name) return p.ref;
    const ParamRef ref = parse_param_path(name);
    check_ref(base_, ref);
    return ref;
}

ConfigTemplate& ConfigTemplate::assign(std::string_view name, double value) {
    set_param(base_, resolve(name), value);
    for (const auto& l : links_) apply_link(base_, l);
    return *this;
}

ConfigTemplate& ConfigTemplate::set_physics(double gamma3N, double tau) {
    base_ = MultiplexConfig(base_.ensembles(), gamma3N, tau);
    return *this;
}

MultiplexConfig ConfigTemplate::instantiate(const std::vector<std::pair<ParamRef, double>>& assignments,
                                            const std::vector<MirrorLink>& extra_links) const {
    MultiplexConfig c = base_;
    for (const auto& [ref, value] : assignments) set_param(c, ref, value);
    for (const auto& l : links_) apply_link(c, l);
    for (const auto& l : extra_links) apply_link(c, l);
    return c;
}

ConfigTemplate preset(std::string_view name) {
    if (name == "two-symmetric") {
        MultiplexConfig base({EnsembleShift(0, 0, 0), EnsembleShift(0, 0, 0)});
        return ConfigTemplate("two-symmetric", std::move(base),
                              {MirrorLink{{0, Field::DeltaP}, {1, Field::DeltaP}}},
                              {{"delta_p1", {0, Field::DeltaP}}, {"theta2", {1, Field::Theta}}});
    }
    if (name == "three-symmetric") {
        // the middle, unshifted ensemble is the phase reference
        MultiplexConfig base({EnsembleShift(0, 0, 0), EnsembleShift(0, 0, 0), EnsembleShift(0, 0, 0)});
        return ConfigTemplate("three-symmetric", std::move(base),
                              {MirrorLink{{0, Field::DeltaP}, {2, Field::DeltaP}}},
                              {{"delta_p1", {0, Field::DeltaP}},
                               {"theta1", {0, Field::Theta}},
                               {"theta2", {2, Field::Theta}}});
    }
    throw ValidationError(fmt::format("unknown preset '{}' (known: two-symmetric, three-symmetric)", name));
}

ConfigTemplate single_template(const MultiplexConfig& config) {
    return ConfigTemplate("custom", config, {}, {});
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
    if (count == 0) throw ValidationError("linspace needs at least one point");
    if (count == 1) return {start};
    std::vector<double> v(count);
    const double step = (stop - start) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) v[k] = start + static_cast<double>(k) * step;
    v.back() = stop;
    return v;
}

SweepAxis make_axis(const ConfigTemplate& tmpl, std::string_view name, std::vector<double> values,
                    std::optional<MirrorLink> link) {
    if (values.empty()) throw ValidationError(fmt::format("axis '{}' has no values", name));
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError(fmt::format("axis '{}' has a non-finite value", name));
    if (values.size() > 1) {
        const bool up = values[1] > values[0];
        for (std::size_t k = 1; k < values.size(); ++k)
            if (up ? !(values[k] > values[k - 1]) : !(values[k] < values[k - 1]))
                throw ValidationError(fmt::format("axis '{}' values are not strictly monotone", name));
    }
    SweepAxis axis{std::string(name), tmpl.resolve(name), std::move(values), link};
    if (link) {
        (void)get_param(tmpl.base(), link->source);
        (void)get_param(tmpl.base(), link->target);
    }
    return axis;
}

std::string_view to_string(CellStatus s) noexcept {
    switch (s) {
    case CellStatus::Ok: return "ok";
    case CellStatus::NullKernel: return "null_kernel";
    case CellStatus::Failed: return "failed";
    }
    return "?";
}

unsigned default_worker_count() {
    if (const char* env = std::getenv("BIPHOTON_WORKERS")) {
        const std::string_view text(env);
        unsigned n = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec == std::errc{} && ptr == text.data() + text.size() && n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MultiplexConfig cell_config(const ConfigTemplate& tmpl, const SweepAxis& axis1, const std::optional<SweepAxis>& axis2,
                            std::size_t i1, std::size_t i2) {
    std::vector<std::pair<ParamRef, double>> assign{{axis1.target, axis1.values.at(i1)}};
    std::vector<MirrorLink> links;
    if (axis1.link) links.push_back(*axis1.link);
    if (axis2) {
        assign.emplace_back(axis2->target, axis2->values.at(i2));
        if (axis2->link) links.push_back(*axis2->link);
    }
    return tmpl.instantiate(assign, links);
}

EntropyMap sweep_entropy(const ConfigTemplate& tmpl, const SweepAxis& axis1, const std::optional<SweepAxis>& axis2,
                         const FrequencyGrid& grid, SweepOptions options) {
    if (axis1.values.empty() || (axis2 && axis2->values.empty())) throw ValidationError("sweep axes must be non-empty");
    if (axis2 && axis2->target == axis1.target) throw ValidationError("both sweep axes target the same parameter");
    // resolve every cell's configuration up front so invalid axes abort before any work
    EntropyMap map{axis1, axis2, {}, {}, {}};
    const std::size_t n1 = map.n1(), n2 = map.n2(), cells = n1 * n2;
    std::vector<MultiplexConfig> configs;
    configs.reserve(cells);
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        for (std::size_t i2 = 0; i2 < n2; ++i2) configs.push_back(cell_config(tmpl, axis1, axis2, i1, i2));

    map.values.assign(cells, std::numeric_limits<double>::quiet_NaN());
    map.status.assign(cells, CellStatus::Ok);
    std::vector<std::string> messages(cells);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            try {
                map.values[c] = entropy_for(configs[c], grid);
            } catch (const NullKernelError& e) {
                map.status[c] = CellStatus::NullKernel;
                messages[c] = e.what();
            } catch (const Error& e) {
                map.status[c] = CellStatus::Failed;
                messages[c] = e.what();
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(options.workers ? options.workers : default_worker_count(), cells);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t c = 0; c < cells; ++c)
        if (map.status[c] != CellStatus::Ok) map.failures.push_back({c / n2, c % n2, map.status[c], messages[c]});
    return map;
}

ExtremaReport find_extrema(const EntropyMap& map) {
    const std::size_t n1 = map.n1(), n2 = map.n2();
    auto finite = [&](std::size_t i1, std::size_t i2) {
        return map.status_at(i1, i2) == CellStatus::Ok && std::isfinite(map.at(i1, i2));
    };
    auto point = [&](std::size_t i1, std::size_t i2) {
        return ExtremumPoint{i1, i2, map.axis1.values[i1], map.axis2 ? map.axis2->values[i2] : 0.0, map.at(i1, i2)};
    };

    ExtremaReport report;
    bool any = false;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            if (!finite(i1, i2)) continue;
            const double v = map.at(i1, i2);
            if (!any || v > report.global_max.S) report.global_max = point(i1, i2);
            if (!any || v < report.global_min.S) report.global_min = point(i1, i2);
            any = true;

            bool is_max = true, is_min = true;
            int neighbours = 0;
            auto visit = [&](std::ptrdiff_t d1, std::ptrdiff_t d2) {
                const auto j1 = static_cast<std::ptrdiff_t>(i1) + d1;
                const auto j2 = static_cast<std::ptrdiff_t>(i2) + d2;
                if (j1 < 0 || j2 < 0 || j1 >= static_cast<std::ptrdiff_t>(n1) || j2 >= static_cast<std::ptrdiff_t>(n2))
                    return;
                if (!finite(static_cast<std::size_t>(j1), static_cast<std::size_t>(j2))) return;
                const double w = map.at(static_cast<std::size_t>(j1), static_cast<std::size_t>(j2));
                ++neighbours;
                if (!(v > w)) is_max = false;
                if (!(v < w)) is_min = false;
            };
            visit(-1, 0);
            visit(1, 0);
            visit(0, -1);
            visit(0, 1);
            if (neighbours == 0) continue;
            if (is_max) report.maxima.push_back(point(i1, i2));
            if (is_min) report.minima.push_back(point(i1, i2));
        }
    }
    if (!any) throw ValidationError("entropy map has no finite cells");
    return report;
}

ConvergenceResult convergence_check(const MultiplexConfig& config, const FrequencyGrid& grid, int factor) {
    ConvergenceResult r;
    r.S_coarse = entropy_for(config, grid);
    r.S_fine = entropy_for(config, grid.refined(factor));
    r.delta = std::abs(r.S_fine - r.S_coarse);
    return r;
}

} // namespace biphoton
