#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfslab/spaces.hpp"

namespace bfslab {

/// Configuration problems carry the JSON field path that caused them.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& msg)
        : std::runtime_error("config error at '" + path + "': " + msg), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct GridCfg {
    int dim = 1;
    int n = 512;
    double half_width = 32.0;
};

struct TimeCfg {
    double total = 64.0;
    int cells = 256;
    double first_cell = 1e-3;
};

struct LpCfg {
    int j_min = -3;
    int j_max = 3;
};

struct SweepCfg {
    long count = 100;
    std::uint64_t seed = 7;
};

struct SuiteConfig {
    std::string suite;
    GridCfg grid;
    TimeCfg time;
    LpCfg lp;
    SweepCfg sweep;
    std::vector<SpaceSpec> spaces;
    std::map<std::string, double> ceilings;
    std::string output = "out/run";
};

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "axioms",      "young",  "converse-young", "maximal", "besov",
        "linear-term", "duhamel-term", "maxreg",   "all"};
    return names;
}

namespace detail {

using njson = nlohmann::json;

/// Reals may be JSON numbers or the string "inf".
inline double real_field(const njson& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Inf"))
        return kInf;
    throw ConfigError(path, "expected a number or \"inf\"");
}

inline double real_at(const njson& obj, const char* key, const std::string& base, double dflt) {
    if (!obj.contains(key)) return dflt;
    return real_field(obj.at(key), base + "." + key);
}

inline long int_at(const njson& obj, const char* key, const std::string& base, long dflt) {
    if (!obj.contains(key)) return dflt;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(base + "." + key, "expected an integer");
    return v.get<long>();
}

inline SpaceSpec parse_space(const njson& j, const std::string& path) {
    if (!j.is_object() || !j.contains("family"))
        throw ConfigError(path, "expected an object with a \"family\" field");
    const std::string fam = j.at("family").get<std::string>();
    try {
        if (fam == "lebesgue") return SpaceSpec::lebesgue(real_at(j, "p", path, 2.0));
        if (fam == "lorentz")
            return SpaceSpec::lorentz(real_at(j, "p", path, 2.0), real_at(j, "q", path, 1.0));
        if (fam == "morrey")
            return SpaceSpec::morrey(real_at(j, "p", path, 2.0), real_at(j, "q", path, 1.0));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    throw ConfigError(path + ".family", "unknown family '" + fam +
                                            "' (expected lebesgue, lorentz, or morrey)");
}

}  // namespace detail

inline SuiteConfig parse_config(const nlohmann::json& j) {
    using detail::int_at;
    using detail::real_at;
    SuiteConfig cfg;
    if (!j.is_object()) throw ConfigError("", "top level must be a JSON object");
    if (!j.contains("suite") || !j.at("suite").is_string())
        throw ConfigError("suite", "required string field");
    cfg.suite = j.at("suite").get<std::string>();
    bool known = false;
    for (const auto& s : suite_names()) known = known || s == cfg.suite;
    if (!known) throw ConfigError("suite", "unknown suite '" + cfg.suite + "'");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        cfg.grid.dim = static_cast<int>(int_at(g, "dim", "grid", 1));
        cfg.grid.n = static_cast<int>(int_at(g, "N", "grid", 512));
        cfg.grid.half_width = real_at(g, "L", "grid", 32.0);
        if (cfg.grid.dim != 1 && cfg.grid.dim != 2) throw ConfigError("grid.dim", "must be 1 or 2");
        if (cfg.grid.n < 4 || (cfg.grid.n & (cfg.grid.n - 1)) != 0)
            throw ConfigError("grid.N", "must be a power of two >= 4");
        if (!(cfg.grid.half_width > 0)) throw ConfigError("grid.L", "must be positive");
    }
    if (j.contains("time")) {
        const auto& t = j.at("time");
        cfg.time.total = real_at(t, "T", "time", 64.0);
        cfg.time.cells = static_cast<int>(int_at(t, "cells", "time", 256));
        cfg.time.first_cell = real_at(t, "first_cell", "time", 1e-3);
        if (!(cfg.time.total > 0)) throw ConfigError("time.T", "must be positive");
        if (cfg.time.cells < 2) throw ConfigError("time.cells", "need at least 2 cells");
        if (!(cfg.time.first_cell > 0) || cfg.time.first_cell >= cfg.time.total)
            throw ConfigError("time.first_cell", "must lie in (0, T)");
        if (cfg.time.first_cell > 1e-3)
            throw ConfigError("time.first_cell", "must be <= 1e-3");
    }
    if (j.contains("lp")) {
        const auto& l = j.at("lp");
        cfg.lp.j_min = static_cast<int>(int_at(l, "j_min", "lp", -3));
        cfg.lp.j_max = static_cast<int>(int_at(l, "j_max", "lp", 3));
        if (cfg.lp.j_min >= cfg.lp.j_max) throw ConfigError("lp", "need j_min < j_max");
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        cfg.sweep.count = int_at(s, "count", "sweep", 100);
        cfg.sweep.seed = static_cast<std::uint64_t>(int_at(s, "seed", "sweep", 7));
        if (cfg.sweep.count < 1) throw ConfigError("sweep.count", "must be positive");
    }
    if (j.contains("spaces")) {
        const auto& sp = j.at("spaces");
        if (!sp.is_array() || sp.empty()) throw ConfigError("spaces", "expected a non-empty array");
        for (std::size_t i = 0; i < sp.size(); ++i)
            cfg.spaces.push_back(detail::parse_space(sp[i], "spaces[" + std::to_string(i) + "]"));
    } else {
        cfg.spaces = {SpaceSpec::lebesgue(1.0),      SpaceSpec::lebesgue(1.5),
                      SpaceSpec::lebesgue(2.0),      SpaceSpec::lebesgue(4.0),
                      SpaceSpec::lorentz(2.0, 1.0),  SpaceSpec::morrey(2.0, 1.0)};
    }
    if (j.contains("ceilings")) {
        const auto& c = j.at("ceilings");
        if (!c.is_object()) throw ConfigError("ceilings", "expected an object");
        for (auto it = c.begin(); it != c.end(); ++it)
            cfg.ceilings[it.key()] = detail::real_field(it.value(), "ceilings." + it.key());
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("output", "expected a string");
        cfg.output = j.at("output").get<std::string>();
    }
    return cfg;
}

inline nlohmann::ordered_json config_echo(const SuiteConfig& cfg) {
    nlohmann::ordered_json j;
    j["suite"] = cfg.suite;
    j["grid"] = {{"dim", cfg.grid.dim}, {"N", cfg.grid.n}, {"L", cfg.grid.half_width}};
    j["time"] = {{"T", cfg.time.total}, {"cells", cfg.time.cells}, {"first_cell", cfg.time.first_cell}};
    j["lp"] = {{"j_min", cfg.lp.j_min}, {"j_max", cfg.lp.j_max}};
    j["sweep"] = {{"count", cfg.sweep.count}, {"seed", cfg.sweep.seed}};
    nlohmann::ordered_json sp = nlohmann::ordered_json::array();
    for (const auto& s : cfg.spaces) sp.push_back(s.str());
    j["spaces"] = sp;
    nlohmann::ordered_json ce;
    for (const auto& [k, v] : cfg.ceilings) ce[k] = v;
    j["ceilings"] = ce;
    j["output"] = cfg.output;
    return j;
}

}  // namespace bfslab
