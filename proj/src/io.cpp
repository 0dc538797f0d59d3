#include "biphoton/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

void check_keys(const YAML::Node& map, std::string_view where, std::set<std::string> allowed) {
    if (!map.IsMap()) throw ParseError(fmt::format("'{}' must be a mapping", where), line_of(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) throw ParseError(fmt::format("unknown field '{}' in {}", key, where), line_of(kv.first));
    }
}

double as_double(const YAML::Node& node, std::string_view field) {
    double v = 0.0;
    if (!node.IsScalar() || !parse_number(node.Scalar(), v))
        throw ParseError(fmt::format("field '{}': expected a number, got '{}'", field, node.IsScalar() ? node.Scalar() : "<non-scalar>"),
                         line_of(node));
    return v;
}

double as_phase(const YAML::Node& node, std::string_view field) {
    if (!node.IsScalar()) throw ParseError(fmt::format("field '{}': expected a phase", field), line_of(node));
    try {
        return parse_phase(node.Scalar());
    } catch (const ValidationError& e) {
        throw ParseError(fmt::format("field '{}': {}", field, e.what()), line_of(node));
    }
}

int as_int(const YAML::Node& node, std::string_view field) {
    const double v = as_double(node, field);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ParseError(fmt::format("field '{}': expected an integer, got '{}'", field, node.Scalar()), line_of(node));
    return static_cast<int>(v);
}

double get_or(const YAML::Node& map, const char* key, double fallback, std::string_view field) {
    const auto n = map[key];
    return n ? as_double(n, field) : fallback;
}

// True when the name is (or resolves to) a phase, so values may use the "pi" syntax.
bool is_phase_target(const ConfigTemplate& tmpl, std::string_view name) {
    try {
        return tmpl.resolve(name).field == Field::Theta;
    } catch (const Error&) {
        return false;
    }
}

std::vector<double> axis_values(const YAML::Node& node, bool phase, std::string_view field) {
    auto scalar = [&](const YAML::Node& n, std::string_view f) { return phase ? as_phase(n, f) : as_double(n, f); };
    if (node["values"]) {
        const auto list = node["values"];
        if (!list.IsSequence()) throw ParseError(fmt::format("{}.values must be a list", field), line_of(list));
        std::vector<double> v;
        for (const auto& item : list) v.push_back(scalar(item, field));
        return v;
    }
    if (node["start"] && node["stop"] && node["count"]) {
        const int count = as_int(node["count"], fmt::format("{}.count", field));
        if (count < 1) throw ParseError(fmt::format("{}.count must be >= 1", field), line_of(node["count"]));
        return linspace(scalar(node["start"], field), scalar(node["stop"], field), static_cast<std::size_t>(count));
    }
    throw ParseError(fmt::format("{} needs either 'values' or 'start'/'stop'/'count'", field), line_of(node));
}

GridSpec parse_grid(const YAML::Node& g) {
    GridSpec spec;
    if (!g) return spec;
    check_keys(g, "grid", {"s_min", "s_max", "i_min", "i_max", "n", "n_s", "n_i", "scheme", "panels"});
    spec.s_range = {get_or(g, "s_min", spec.s_range.min, "grid.s_min"), get_or(g, "s_max", spec.s_range.max, "grid.s_max")};
    spec.i_range = {get_or(g, "i_min", spec.i_range.min, "grid.i_min"), get_or(g, "i_max", spec.i_range.max, "grid.i_max")};
    if (g["n"]) spec.n_s = spec.n_i = as_int(g["n"], "grid.n");
    if (g["n_s"]) spec.n_s = as_int(g["n_s"], "grid.n_s");
    if (g["n_i"]) spec.n_i = as_int(g["n_i"], "grid.n_i");
    if (g["panels"]) spec.panels = as_int(g["panels"], "grid.panels");
    if (g["scheme"]) {
        try {
            spec.scheme = parse_scheme(g["scheme"].as<std::string>());
        } catch (const ValidationError& e) {
            throw ParseError(fmt::format("field 'grid.scheme': {}", e.what()), line_of(g["scheme"]));
        }
    }
    return spec;
}

std::string emit_number(double v) { return format_double(v); }

} // namespace

double parse_phase(std::string_view text) {
    const auto original = text;
    text = trim(text);
    const auto fail = [&] { return ValidationError(fmt::format("cannot parse phase '{}'", original)); };
    const auto pos = text.find("pi");
    double v = 0.0;
    if (pos == std::string_view::npos) {
        if (!parse_number(text, v)) throw fail();
        return v;
    }
    auto coef_text = trim(text.substr(0, pos));
    auto tail = trim(text.substr(pos + 2));
    if (!coef_text.empty() && coef_text.back() == '*') coef_text = trim(coef_text.substr(0, coef_text.size() - 1));

    double coef = 1.0;
    if (coef_text == "-") {
        coef = -1.0;
    } else if (coef_text == "+" || coef_text.empty()) {
        coef = 1.0;
    } else if (const auto slash = coef_text.find('/'); slash != std::string_view::npos) {
        double num = 0.0, den = 0.0;
        if (!parse_number(coef_text.substr(0, slash), num) || !parse_number(coef_text.substr(slash + 1), den) || den == 0.0)
            throw fail();
        coef = num / den;
    } else if (!parse_number(coef_text, coef)) {
        throw fail();
    }
    double den = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/' || !parse_number(tail.substr(1), den) || den == 0.0) throw fail();
    }
    return coef * std::numbers::pi / den;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

ConfigTemplate RunConfig::make_template() const {
    if (preset) {
        auto t = biphoton::preset(*preset);
        t.set_physics(config.gamma3N(), config.tau());
        for (const auto& p : t.free_params()) t.assign(p.name, get_param(config, p.ref));
        return t;
    }
    return single_template(config);
}

bool RunConfig::operator==(const RunConfig& other) const {
    if (!(config == other.config && grid == other.grid && preset == other.preset && axes.size() == other.axes.size()))
        return false;
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& x = axes[a];
        const auto& y = other.axes[a];
        if (!(x.name == y.name && x.target == y.target && x.values == y.values && x.link == y.link)) return false;
    }
    return true;
}

RunConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError(e.msg, e.mark.line + 1);
    }
    if (root.IsNull()) throw ParseError("configuration is empty");
    check_keys(root, "configuration", {"gamma3N", "tau", "grid", "ensembles", "preset", "params", "sweep"});

    try {
        const double gamma3N = get_or(root, "gamma3N", MultiplexConfig::default_gamma3N, "gamma3N");
        const double tau = get_or(root, "tau", MultiplexConfig::default_tau, "tau");
        const GridSpec grid = parse_grid(root["grid"]);
        FrequencyGrid{grid}; // validate

        std::optional<std::string> preset_name;
        std::optional<ConfigTemplate> tmpl;
        if (root["preset"]) {
            if (root["ensembles"]) throw ParseError("give either 'preset' or 'ensembles', not both", line_of(root["ensembles"]));
            preset_name = root["preset"].as<std::string>();
            tmpl.emplace(preset(*preset_name));
            tmpl->set_physics(gamma3N, tau);
            if (const auto params = root["params"]) {
                if (!params.IsMap()) throw ParseError("'params' must be a mapping", line_of(params));
                for (const auto& kv : params) {
                    const auto name = kv.first.as<std::string>();
                    const bool known = std::any_of(tmpl->free_params().begin(), tmpl->free_params().end(),
                                                   [&](const auto& p) { return p.name == name; });
                    if (!known)
                        throw ParseError(fmt::format("'{}' is not a parameter of preset '{}'", name, *preset_name),
                                         line_of(kv.first));
                    const bool phase = tmpl->resolve(name).field == Field::Theta;
                    tmpl->assign(name, phase ? as_phase(kv.second, name) : as_double(kv.second, name));
                }
            }
        } else {
            if (root["params"]) throw ParseError("'params' requires 'preset'", line_of(root["params"]));
            const auto list = root["ensembles"];
            if (!list) throw ParseError("missing 'ensembles' (or 'preset')");
            if (!list.IsSequence()) throw ParseError("'ensembles' must be a list", line_of(list));
            std::vector<EnsembleShift> ensembles;
            for (std::size_t m = 0; m < list.size(); ++m) {
                const auto e = list[m];
                const auto where = fmt::format("ensembles[{}]", m);
                check_keys(e, where, {"delta_p", "delta_q", "theta"});
                ensembles.emplace_back(get_or(e, "delta_p", 0.0, where + ".delta_p"),
                                       get_or(e, "delta_q", 0.0, where + ".delta_q"),
                                       e["theta"] ? as_phase(e["theta"], where + ".theta") : 0.0);
            }
            tmpl.emplace(single_template(MultiplexConfig(std::move(ensembles), gamma3N, tau)));
        }

        RunConfig run{tmpl->instantiate(), grid, preset_name, {}};

        if (const auto sweep = root["sweep"]) {
            check_keys(sweep, "sweep", {"axes"});
            const auto axes = sweep["axes"];
            if (!axes || !axes.IsSequence() || axes.size() == 0 || axes.size() > 2)
                throw ParseError("sweep.axes must be a list of one or two axes", line_of(sweep));
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const auto ax = axes[a];
                const auto where = fmt::format("sweep.axes[{}]", a);
                check_keys(ax, where, {"target", "values", "start", "stop", "count", "link"});
                if (!ax["target"]) throw ParseError(where + " needs a 'target'", line_of(ax));
                const auto target = ax["target"].as<std::string>();
                std::optional<MirrorLink> link;
                if (const auto l = ax["link"]) {
                    check_keys(l, where + ".link", {"mirror"});
                    link = MirrorLink{tmpl->resolve(target), parse_param_path(l["mirror"].as<std::string>())};
                }
                run.axes.push_back(make_axis(*tmpl, target, axis_values(ax, is_phase_target(*tmpl, target), where), link));
            }
        }
        return run;
    } catch (const YAML::Exception& e) {
        throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1);
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open configuration file '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string write_config(const RunConfig& run) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "gamma3N" << YAML::Value << emit_number(run.config.gamma3N());
    out << YAML::Key << "tau" << YAML::Value << emit_number(run.config.tau());

    const auto& g = run.grid;
    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "s_min" << YAML::Value << emit_number(g.s_range.min);
    out << YAML::Key << "s_max" << YAML::Value << emit_number(g.s_range.max);
    out << YAML::Key << "i_min" << YAML::Value << emit_number(g.i_range.min);
    out << YAML::Key << "i_max" << YAML::Value << emit_number(g.i_range.max);
    out << YAML::Key << "n_s" << YAML::Value << g.n_s;
    out << YAML::Key << "n_i" << YAML::Value << g.n_i;
    out << YAML::Key << "scheme" << YAML::Value << std::string(to_string(g.scheme));
    if (g.panels != 0) out << YAML::Key << "panels" << YAML::Value << g.panels;
    out << YAML::EndMap;

    if (run.preset) {
        const auto tmpl = preset(*run.preset);
        out << YAML::Key << "preset" << YAML::Value << *run.preset;
        out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
        for (const auto& p : tmpl.free_params())
            out << YAML::Key << p.name << YAML::Value << emit_number(get_param(run.config, p.ref));
        out << YAML::EndMap;
    } else {
        out << YAML::Key << "ensembles" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : run.config.ensembles()) {
            out << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "delta_p" << YAML::Value << emit_number(e.delta_p());
            out << YAML::Key << "delta_q" << YAML::Value << emit_number(e.delta_q());
            out << YAML::Key << "theta" << YAML::Value << emit_number(e.theta());
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }

    if (!run.axes.empty()) {
        out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "axes" << YAML::Value << YAML::BeginSeq;
        for (const auto& ax : run.axes) {
            out << YAML::BeginMap;
            out << YAML::Key << "target" << YAML::Value << ax.name;
            out << YAML::Key << "values" << YAML::Value << YAML::Flow << YAML::BeginSeq;
            for (double v : ax.values) out << emit_number(v);
            out << YAML::EndSeq;
            if (ax.link) {
                out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
                out << YAML::Key << "mirror" << YAML::Value << to_string(ax.link->target);
                out << YAML::EndMap;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace biphoton
