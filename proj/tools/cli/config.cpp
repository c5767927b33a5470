#include "config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace pairdeg::cli {

namespace {

using boost::property_tree::ptree;

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
    try {
        return boost::lexical_cast<T>(boost::trim_copy(raw));
    } catch (const boost::bad_lexical_cast&) {
        throw ConfigError(fmt::format("{}: cannot parse '{}'", key, raw));
    }
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
    std::vector<std::string> parts;
    boost::split(parts, raw, boost::is_any_of(","));
    std::vector<T> out;
    for (const auto& p : parts) out.push_back(parse_value<T>(key, p));
    return out;
}

struct Setter {
    std::function<void(const std::string& key, const std::string& value)> apply;
};

// section -> key -> setter
using Schema = std::map<std::string, std::map<std::string, Setter>>;

template <typename T>
Setter scalar(T& target) {
    return {[&target](const std::string& key, const std::string& value) { target = parse_value<T>(key, value); }};
}

Schema schema(RunConfig& c, std::vector<double>& eps, std::vector<int>& omegas) {
    Schema s;
    s["model"]["epsilons"] = {[&eps](const std::string& k, const std::string& v) { eps = parse_list<double>(k, v); }};
    s["model"]["omegas"] = {[&omegas](const std::string& k, const std::string& v) { omegas = parse_list<int>(k, v); }};
    s["model"]["n_pairs"] = scalar(c.model.n_pairs);
    s["model"]["gamma"] = scalar(c.model.gamma);

    s["atlas"]["re_min"] = scalar(c.atlas.re_min);
    s["atlas"]["re_max"] = scalar(c.atlas.re_max);
    s["atlas"]["im_min"] = scalar(c.atlas.im_min);
    s["atlas"]["im_max"] = scalar(c.atlas.im_max);
    s["atlas"]["nx"] = scalar(c.atlas.nx);
    s["atlas"]["ny"] = scalar(c.atlas.ny);

    s["sweep"]["gamma_min"] = scalar(c.sweep.gamma_min);
    s["sweep"]["gamma_max"] = scalar(c.sweep.gamma_max);
    s["sweep"]["steps"] = scalar(c.sweep.steps);
    s["sweep"]["merge_radius"] = scalar(c.sweep.merge_radius);

    s["encircle"]["center_re"] = scalar(c.encircle.center_re);
    s["encircle"]["center_im"] = scalar(c.encircle.center_im);
    s["encircle"]["radius"] = scalar(c.encircle.radius);
    s["encircle"]["loops"] = scalar(c.encircle.loops);
    s["encircle"]["max_loops"] = scalar(c.encircle.max_loops);
    s["encircle"]["orientation"] = scalar(c.encircle.orientation);

    s["cut"]["re_min"] = scalar(c.cut.re_min);
    s["cut"]["re_max"] = scalar(c.cut.re_max);
    s["cut"]["im"] = scalar(c.cut.im);
    s["cut"]["samples"] = scalar(c.cut.samples);
    s["cut"]["pair"] = {[&c](const std::string& k, const std::string& v) {
        const auto p = parse_list<int>(k, v);
        if (p.size() != 2) throw ConfigError(fmt::format("{}: expected two labels, got {}", k, p.size()));
        c.cut.pair = {p[0], p[1]};
    }};

    s["precision"]["tau_c"] = scalar(c.precision.tau_c);
    s["precision"]["interpolation_radius"] = scalar(c.precision.interpolation_radius);
    s["precision"]["cluster_radius"] = scalar(c.precision.cluster_radius);
    s["precision"]["candidate_radius"] = scalar(c.precision.candidate_radius);
    s["precision"]["loop_steps"] = scalar(c.precision.loop_steps);
    s["precision"]["max_bisections"] = scalar(c.precision.max_bisections);
    return s;
}

void check(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
    try {
        c.model.validate();
    } catch (const InvalidModel& e) {
        throw ConfigError(fmt::format("model: {}", e.what()));
    }
    check(c.atlas.re_max > c.atlas.re_min && c.atlas.im_max > c.atlas.im_min, "atlas: empty window");
    check(c.atlas.nx >= 1 && c.atlas.ny >= 1, "atlas: nx and ny must be positive");
    check(c.sweep.gamma_max > c.sweep.gamma_min, "sweep: gamma_max must exceed gamma_min");
    check(c.sweep.steps >= 2, "sweep: steps must be at least 2");
    check(c.sweep.merge_radius > 0.0, "sweep: merge_radius must be positive");
    check(c.encircle.radius > 0.0, "encircle: radius must be positive");
    check(c.encircle.loops >= 1 && c.encircle.max_loops >= 1, "encircle: loops and max_loops must be positive");
    check(c.encircle.orientation == 1 || c.encircle.orientation == -1, "encircle: orientation must be 1 or -1");
    check(c.cut.samples >= 2, "cut: samples must be at least 2");
    check(c.cut.re_max > c.cut.re_min, "cut: re_max must exceed re_min");
    const int n = static_cast<int>(enumerate_basis(c.model).size());
    for (int m : c.cut.pair) check(m >= 1 && m <= n, fmt::format("cut: pair label {} outside 1..{}", m, n));
    check(c.cut.pair[0] != c.cut.pair[1], "cut: pair labels must differ");
    check(c.precision.tau_c > 0.0, "precision: tau_c must be positive");
    check(c.precision.interpolation_radius > 0.0, "precision: interpolation_radius must be positive");
    check(c.precision.loop_steps >= 64, "precision: loop_steps must be at least 64");
    check(c.precision.max_bisections >= 0, "precision: max_bisections must be non-negative");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }

    RunConfig config;
    std::vector<double> eps;
    std::vector<int> omegas;
    for (const auto& l : config.model.levels) {
        eps.push_back(l.epsilon);
        omegas.push_back(l.omega);
    }
    auto s = schema(config, eps, omegas);
    for (const auto& [section, body] : tree) {
        const auto known = s.find(section);
        if (body.empty() && !body.data().empty())
            throw ConfigError(fmt::format("key '{}' outside any section", section));
        if (known == s.end()) throw ConfigError(fmt::format("unknown section [{}]", section));
        for (const auto& [key, value] : body) {
            const auto setter = known->second.find(key);
            if (setter == known->second.end()) throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
            setter->second.apply(section + "." + key, value.data());
        }
    }
    if (eps.size() != omegas.size())
        throw ConfigError(fmt::format("model: {} epsilons vs {} omegas", eps.size(), omegas.size()));
    config.model.levels.clear();
    for (std::size_t i = 0; i < eps.size(); ++i) config.model.levels.push_back({eps[i], omegas[i]});
    validate(config);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string canonical_text(const RunConfig& c) {
    std::string eps, omegas;
    for (const auto& l : c.model.levels) {
        eps += fmt::format("{}{:.17g}", eps.empty() ? "" : ",", l.epsilon);
        omegas += fmt::format("{}{}", omegas.empty() ? "" : ",", l.omega);
    }
    std::string out;
    auto line = [&out](const char* key, const auto& value) { out += fmt::format("{}={}\n", key, value); };
    auto real = [&out](const char* key, double value) { out += fmt::format("{}={:.17g}\n", key, value); };
    line("model.epsilons", eps);
    line("model.omegas", omegas);
    line("model.n_pairs", c.model.n_pairs);
    real("model.gamma", c.model.gamma);
    real("atlas.re_min", c.atlas.re_min);
    real("atlas.re_max", c.atlas.re_max);
    real("atlas.im_min", c.atlas.im_min);
    real("atlas.im_max", c.atlas.im_max);
    line("atlas.nx", c.atlas.nx);
    line("atlas.ny", c.atlas.ny);
    real("sweep.gamma_min", c.sweep.gamma_min);
    real("sweep.gamma_max", c.sweep.gamma_max);
    line("sweep.steps", c.sweep.steps);
    real("sweep.merge_radius", c.sweep.merge_radius);
    real("encircle.center_re", c.encircle.center_re);
    real("encircle.center_im", c.encircle.center_im);
    real("encircle.radius", c.encircle.radius);
    line("encircle.loops", c.encircle.loops);
    line("encircle.max_loops", c.encircle.max_loops);
    line("encircle.orientation", c.encircle.orientation);
    real("cut.re_min", c.cut.re_min);
    real("cut.re_max", c.cut.re_max);
    real("cut.im", c.cut.im);
    line("cut.samples", c.cut.samples);
    line("cut.pair", fmt::format("{},{}", c.cut.pair[0], c.cut.pair[1]));
    real("precision.tau_c", c.precision.tau_c);
    real("precision.interpolation_radius", c.precision.interpolation_radius);
    real("precision.cluster_radius", c.precision.cluster_radius);
    real("precision.candidate_radius", c.precision.candidate_radius);
    line("precision.loop_steps", c.precision.loop_steps);
    line("precision.max_bisections", c.precision.max_bisections);
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : canonical_text(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace pairdeg::cli
