#pragma once

// Run configuration: a JSON document (canonical) or plain `key = value`
// lines with dotted keys and optional `[section]` headers.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "../beable.hpp"
#include "../bohm.hpp"
#include "../types.hpp"
#include "../werner.hpp"

namespace bohmflow::cli {

using json = nlohmann::ordered_json;

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    double a = std::numbers::sqrt2 / 2.0;
    double epsilon = 0.4;
    int sign = +1;
    double gamma_over_omega = 0.1;
    double nbar = 0.0;
    double t_max_omega = 20.0;
    double output_dt_omega = 0.05;
    std::size_t n_traj = 1000;
    std::uint64_t seed = 12345;
    LatticeSpec lattice{0.1, 40};
    double integrator_tol = 1e-9;
    /// Explicit starting points; empty selects the default grid unless
    /// `sample_initial` is set, in which case n_traj points are drawn from |ψ|².
    std::vector<PhasePoint> initial_conditions;
    bool sample_initial = false;

    // Subcommand settings with defaults.
    double concurrence_gamma_t_max = 1.0;
    std::size_t concurrence_points = 201;
    std::vector<double> amplitude_epsilons = {0.0, 0.1, 1.0 / 3.0, 0.4, 0.7, 1.0};
    PhasePoint amplitude_init = kDefaultAmplitudeInit;
    std::size_t beables_walkers = 1000;
    double beables_t_end_omega = 3.0;
    double beables_dt = 0.0;  ///< 0 selects dt automatically (max exit probability 0.05)
    double beables_record_dt = 0.1;
    std::vector<double> beables_checkpoints = {1.0, 2.0, 3.0};
    std::array<double, 2> beables_drift_point = {0.0, 0.5};
    double beables_drift_omega_t = std::numbers::pi / 4.0;
    std::size_t beables_drift_samples = 100000;
    std::size_t validate_equivariance_n = 10000;
    double validate_equivariance_omega_t = 5.0;

    double b() const { return std::sqrt(std::max(0.0, 1.0 - a * a)); }
    WernerParams werner() const { return {a, b(), sign, epsilon}; }
    BathParams bath() const { return {gamma_over_omega, nbar}; }

    void validate() const;
    json to_json() const;
    static RunConfig from_json(const json& doc);
};

namespace detail {

inline double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
    return d;
}

inline std::uint64_t unsigned_integer(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(field, "expected a non-negative integer");
}

inline std::vector<double> number_list(const json& v, const std::string& field) {
    if (!v.is_array()) throw ConfigError(field, "expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, field));
    return out;
}

inline PhasePoint point(const json& v, const std::string& field) {
    const auto xs = number_list(v, field);
    if (xs.size() != 2) throw ConfigError(field, "expected a pair [x1, x2]");
    return {xs[0], xs[1], 0.0};
}

/// Flattens nested objects into dotted keys.
inline void flatten(const json& obj, const std::string& prefix, json& out) {
    for (const auto& [k, v] : obj.items()) {
        const std::string key = prefix.empty() ? k : prefix + "." + k;
        if (v.is_object())
            flatten(v, key, out);
        else
            out[key] = v;
    }
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline RunConfig RunConfig::from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("<root>", "configuration must be an object");
    json flat = json::object();
    detail::flatten(doc, "", flat);

    RunConfig c;
    for (const auto& [key, v] : flat.items()) {
        using namespace detail;
        if (key == "a") c.a = number(v, key);
        else if (key == "epsilon") c.epsilon = number(v, key);
        else if (key == "sign") {
            if (!v.is_string()) throw ConfigError(key, "expected \"+\" or \"-\"");
            const auto s = v.get<std::string>();
            if (s == "+") c.sign = +1;
            else if (s == "-" || s == "−") c.sign = -1;
            else throw ConfigError(key, "expected \"+\" or \"-\"");
        }
        else if (key == "gamma_over_omega") c.gamma_over_omega = number(v, key);
        else if (key == "nbar") c.nbar = number(v, key);
        else if (key == "t_max_omega") c.t_max_omega = number(v, key);
        else if (key == "output_dt_omega") c.output_dt_omega = number(v, key);
        else if (key == "n_traj") c.n_traj = unsigned_integer(v, key);
        else if (key == "seed") c.seed = unsigned_integer(v, key);
        else if (key == "lattice.h") c.lattice.h = number(v, key);
        else if (key == "lattice.half_extent") c.lattice.half_extent = static_cast<int>(unsigned_integer(v, key));
        else if (key == "integrator.tol") c.integrator_tol = number(v, key);
        else if (key == "initial_conditions") {
            if (v.is_string()) {
                const auto s = v.get<std::string>();
                if (s != "default-grid" && s != "sampled")
                    throw ConfigError(key, "expected \"default-grid\", \"sampled\" or a list of pairs");
                c.initial_conditions.clear();
                c.sample_initial = s == "sampled";
            } else if (v.is_array()) {
                c.initial_conditions.clear();
                c.sample_initial = false;
                for (const auto& p : v) c.initial_conditions.push_back(point(p, key));
            } else {
                throw ConfigError(key, "expected \"default-grid\", \"sampled\" or a list of pairs");
            }
        }
        else if (key == "concurrence.gamma_t_max") c.concurrence_gamma_t_max = number(v, key);
        else if (key == "concurrence.points") c.concurrence_points = unsigned_integer(v, key);
        else if (key == "amplitude.epsilons") c.amplitude_epsilons = number_list(v, key);
        else if (key == "amplitude.init") c.amplitude_init = point(v, key);
        else if (key == "beables.n_walkers") c.beables_walkers = unsigned_integer(v, key);
        else if (key == "beables.t_end_omega") c.beables_t_end_omega = number(v, key);
        else if (key == "beables.dt") c.beables_dt = number(v, key);
        else if (key == "beables.record_dt") c.beables_record_dt = number(v, key);
        else if (key == "beables.checkpoints") c.beables_checkpoints = number_list(v, key);
        else if (key == "beables.drift_point") {
            const auto p = point(v, key);
            c.beables_drift_point = {p.x1, p.x2};
        }
        else if (key == "beables.drift_omega_t") c.beables_drift_omega_t = number(v, key);
        else if (key == "beables.drift_samples") c.beables_drift_samples = unsigned_integer(v, key);
        else if (key == "validate.equivariance_n") c.validate_equivariance_n = unsigned_integer(v, key);
        else if (key == "validate.equivariance_omega_t") c.validate_equivariance_omega_t = number(v, key);
        else throw ConfigError(key, "unknown configuration key");
    }
    c.validate();
    return c;
}

inline void RunConfig::validate() const {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("a", "must lie in [0,1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon", "must lie in [0,1]");
    if (!(gamma_over_omega >= 0.0)) throw ConfigError("gamma_over_omega", "must be >= 0");
    if (!(nbar >= 0.0)) throw ConfigError("nbar", "must be >= 0");
    if (!(t_max_omega > 0.0)) throw ConfigError("t_max_omega", "must be > 0");
    if (!(output_dt_omega > 0.0)) throw ConfigError("output_dt_omega", "must be > 0");
    if (!initial_conditions.empty() && sample_initial)
        throw ConfigError("initial_conditions", "cannot be both explicit and sampled");
    if (n_traj < 1) throw ConfigError("n_traj", "must be >= 1");
    if (!(lattice.h > 0.0)) throw ConfigError("lattice.h", "must be > 0");
    if (lattice.half_extent < 4) throw ConfigError("lattice.half_extent", "must be >= 4");
    if (lattice.half_extent * lattice.h < kSamplingBox - 1e-12)
        throw ConfigError("lattice.half_extent", "half_extent * h must be >= 4");
    if (!(integrator_tol > 0.0 && integrator_tol < 1.0)) throw ConfigError("integrator.tol", "must lie in (0,1)");
    if (!(concurrence_gamma_t_max > 0.0)) throw ConfigError("concurrence.gamma_t_max", "must be > 0");
    if (concurrence_points < 2) throw ConfigError("concurrence.points", "must be >= 2");
    for (double e : amplitude_epsilons)
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("amplitude.epsilons", "entries must lie in [0,1]");
    if (beables_walkers < 1) throw ConfigError("beables.n_walkers", "must be >= 1");
    if (!(beables_t_end_omega > 0.0)) throw ConfigError("beables.t_end_omega", "must be > 0");
    if (!(beables_dt >= 0.0)) throw ConfigError("beables.dt", "must be >= 0 (0 = automatic)");
    if (!(beables_record_dt > 0.0)) throw ConfigError("beables.record_dt", "must be > 0");
    for (double t : beables_checkpoints)
        if (!(t >= 0.0 && t <= beables_t_end_omega + 1e-12))
            throw ConfigError("beables.checkpoints", "entries must lie in [0, beables.t_end_omega]");
    if (validate_equivariance_n < 1000) throw ConfigError("validate.equivariance_n", "must be >= 1000");
    if (!(validate_equivariance_omega_t > 0.0)) throw ConfigError("validate.equivariance_omega_t", "must be > 0");
}

inline json RunConfig::to_json() const {
    json j;
    j["a"] = a;
    j["b"] = b();
    j["epsilon"] = epsilon;
    j["sign"] = sign > 0 ? "+" : "-";
    j["gamma_over_omega"] = gamma_over_omega;
    j["nbar"] = nbar;
    j["t_max_omega"] = t_max_omega;
    j["output_dt_omega"] = output_dt_omega;
    j["n_traj"] = n_traj;
    j["seed"] = seed;
    j["lattice"] = {{"h", lattice.h}, {"half_extent", lattice.half_extent}};
    j["integrator"] = {{"tol", integrator_tol}};
    if (sample_initial) {
        j["initial_conditions"] = "sampled";
    } else if (initial_conditions.empty()) {
        j["initial_conditions"] = "default-grid";
    } else {
        j["initial_conditions"] = json::array();
        for (const auto& p : initial_conditions) j["initial_conditions"].push_back({p.x1, p.x2});
    }
    j["concurrence"] = {{"gamma_t_max", concurrence_gamma_t_max}, {"points", concurrence_points}};
    j["amplitude"] = {{"epsilons", amplitude_epsilons}, {"init", {amplitude_init.x1, amplitude_init.x2}}};
    j["beables"] = {{"n_walkers", beables_walkers},
                    {"t_end_omega", beables_t_end_omega},
                    {"dt", beables_dt},
                    {"record_dt", beables_record_dt},
                    {"checkpoints", beables_checkpoints},
                    {"drift_point", beables_drift_point},
                    {"drift_omega_t", beables_drift_omega_t},
                    {"drift_samples", beables_drift_samples}};
    j["validate"] = {{"equivariance_n", validate_equivariance_n},
                     {"equivariance_omega_t", validate_equivariance_omega_t}};
    return j;
}

/// Parses `key = value` text. Values are read as JSON where possible
/// (numbers, lists, quoted strings) and as bare strings otherwise.
inline json parse_key_value(const std::string& text) {
    json doc = json::object();
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected `key = value`");
        std::string key = detail::trim(line.substr(0, eq));
        const std::string raw = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (!section.empty()) key = section + "." + key;
        json value = json::parse(raw, nullptr, false);
        if (value.is_discarded()) value = raw;
        doc[key] = value;
    }
    return doc;
}

/// Reads a configuration file. Content whose first non-blank character is
/// `{` is JSON; anything else is `key = value`.
inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("--config", "cannot open " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc = json::parse(text, nullptr, false);
        if (doc.is_discarded()) throw ConfigError("--config", "malformed JSON in " + path);
        return RunConfig::from_json(doc);
    }
    return RunConfig::from_json(parse_key_value(text));
}

}  // namespace bohmflow::cli
