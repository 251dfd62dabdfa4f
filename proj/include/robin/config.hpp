#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "robin/geometry.hpp"

namespace robin {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

// Raw key/value content of a config file: `key = value` lines grouped under
// `[section]` headers, `#` comments, blank lines ignored. Keys before the
// first header live in the "" section. Line numbers are kept for diagnostics.
class ConfigData {
public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    static ConfigData parse(std::istream& in) {
        ConfigData cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::string s = detail::trim(line);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = detail::trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
                continue;
            }
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            std::string key = detail::trim(s.substr(0, eq));
            std::string val = detail::trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            if (!cfg.sections_[section].emplace(key, Entry{val, lineno}).second)
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                                  section + "." + key + "'");
        }
        return cfg;
    }

    static ConfigData parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in);
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key);
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        if (!e) throw ConfigError("missing field '" + qualify(section, key) + "'");
        e->used = true;
        return e->value;
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& def) const {
        return has(section, key) ? get_string(section, key) : def;
    }

    double get_number(const std::string& section, const std::string& key) const {
        return to_number(get_string(section, key), section, key);
    }

    double get_number(const std::string& section, const std::string& key, double def) const {
        return has(section, key) ? get_number(section, key) : def;
    }

    int get_int(const std::string& section, const std::string& key, int def) const {
        if (!has(section, key)) return def;
        double v = get_number(section, key);
        if (v != static_cast<int>(v))
            throw ConfigError(where(section, key) + ": expected an integer");
        return static_cast<int>(v);
    }

    bool get_bool(const std::string& section, const std::string& key, bool def) const {
        if (!has(section, key)) return def;
        std::string v = get_string(section, key);
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw ConfigError(where(section, key) + ": expected true or false");
    }

    std::vector<double> get_numbers(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(get_string(section, key));
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(to_number(detail::trim(item), section, key));
        if (out.empty()) throw ConfigError(where(section, key) + ": empty list");
        return out;
    }

    // "x0,y0; x1,y1; ..." vertex lists
    std::vector<Vec2> get_points(const std::string& section, const std::string& key) const {
        std::vector<Vec2> out;
        std::stringstream ss(get_string(section, key));
        std::string pair;
        while (std::getline(ss, pair, ';')) {
            std::stringstream ps(pair);
            std::string xs, ys;
            if (!std::getline(ps, xs, ',') || !std::getline(ps, ys))
                throw ConfigError(where(section, key) + ": expected 'x,y' pairs separated by ';'");
            out.push_back({to_number(detail::trim(xs), section, key),
                           to_number(detail::trim(ys), section, key)});
        }
        return out;
    }

    // Diagnostics for typos: any key never read by the validator.
    std::vector<std::string> unused_keys() const {
        std::vector<std::string> out;
        for (const auto& [sec, entries] : sections_)
            for (const auto& [key, e] : entries)
                if (!e.used) out.push_back(qualify(sec, key) + " (line " +
                                           std::to_string(e.line) + ")");
        return out;
    }

    std::string where(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        std::string loc = e ? "line " + std::to_string(e->line) + ", " : "";
        return loc + "field '" + qualify(section, key) + "'";
    }

private:
    static std::string qualify(const std::string& section, const std::string& key) {
        return section.empty() ? key : section + "." + key;
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    double to_number(const std::string& v, const std::string& section,
                     const std::string& key) const {
        try {
            size_t pos = 0;
            double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            throw ConfigError(where(section, key) + ": '" + v + "' is not a number");
        }
    }

    std::map<std::string, std::map<std::string, Entry>> sections_;
};

enum class GeometryKind { disk, polygon, mesh_file };
enum class ExperimentKind {
    solve_limit, solve_layer, gamma_sweep, optimize, bound_check, oracle, dirichlet_limit
};

inline std::string to_string(ExperimentKind e) {
    switch (e) {
        case ExperimentKind::solve_limit: return "solve_limit";
        case ExperimentKind::solve_layer: return "solve_layer";
        case ExperimentKind::gamma_sweep: return "gamma_sweep";
        case ExperimentKind::optimize: return "optimize";
        case ExperimentKind::bound_check: return "bound_check";
        case ExperimentKind::oracle: return "oracle";
        case ExperimentKind::dirichlet_limit: return "dirichlet_limit";
    }
    return "?";
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::solve_limit;

    GeometryKind geometry = GeometryKind::disk;
    double radius = 1.0;
    int refinement = 3;
    std::vector<Vec2> vertices;
    double target_edge = 0.1;
    std::string mesh_path;

    double beta = 1.0;
    double mass = 1.0;
    double source_value = 1.0;
    std::string source_path;  // nodal values, one per line; empty = constant

    double h_const = 1.0;             // solve_limit / solve_layer / gamma_sweep / dirichlet_limit
    std::vector<double> eps_schedule; // gamma_sweep
    double eps = 0.1;                 // solve_layer
    std::vector<double> beta_schedule;// dirichlet_limit
    double tol_energy = 1e-10;        // optimize / bound_check
    int max_outer = 200;
    double solver_tol = 1e-12;
    int num_thresholds = 64;          // bound_check

    double oracle_R = 1.0;            // oracle
    int oracle_n = 2;
    double oracle_h = 1.0;
    double oracle_eps = 0.0;          // 0: limit problem

    std::string output_dir = ".";
    bool dump_mesh = false;

    static ExperimentConfig from_data(const ConfigData& cfg);
    static ExperimentConfig from_stream(std::istream& in) {
        return from_data(ConfigData::parse(in));
    }
    static ExperimentConfig from_file(const std::string& path) {
        return from_data(ConfigData::parse_file(path));
    }
};

inline ExperimentConfig ExperimentConfig::from_data(const ConfigData& cfg) {
    ExperimentConfig ec;

    std::string exp = cfg.get_string("", "experiment");
    if (exp == "solve_limit") ec.experiment = ExperimentKind::solve_limit;
    else if (exp == "solve_layer") ec.experiment = ExperimentKind::solve_layer;
    else if (exp == "gamma_sweep") ec.experiment = ExperimentKind::gamma_sweep;
    else if (exp == "optimize") ec.experiment = ExperimentKind::optimize;
    else if (exp == "bound_check") ec.experiment = ExperimentKind::bound_check;
    else if (exp == "oracle") ec.experiment = ExperimentKind::oracle;
    else if (exp == "dirichlet_limit") ec.experiment = ExperimentKind::dirichlet_limit;
    else throw ConfigError(cfg.where("", "experiment") + ": unknown experiment '" + exp + "'");

    if (ec.experiment == ExperimentKind::oracle) {
        ec.oracle_R = cfg.get_number("oracle", "R");
        ec.oracle_n = cfg.get_int("oracle", "n", 2);
        ec.beta = cfg.get_number("oracle", "beta");
        ec.oracle_h = cfg.get_number("oracle", "h");
        ec.oracle_eps = cfg.get_number("oracle", "eps", 0.0);
    } else {
        std::string kind = cfg.get_string("geometry", "kind");
        int sources = 0;
        if (kind == "disk") {
            ec.geometry = GeometryKind::disk;
            ec.radius = cfg.get_number("geometry", "radius", 1.0);
            if (ec.radius <= 0.0)
                throw ConfigError(cfg.where("geometry", "radius") + ": must be positive");
            ec.refinement = cfg.get_int("geometry", "refinement", 3);
            ++sources;
        } else if (kind == "polygon") {
            ec.geometry = GeometryKind::polygon;
            ec.vertices = cfg.get_points("geometry", "vertices");
            if (ec.vertices.size() < 3)
                throw ConfigError(cfg.where("geometry", "vertices") +
                                  ": a polygon needs at least 3 vertices");
            ec.target_edge = cfg.get_number("geometry", "target_edge");
            if (ec.target_edge <= 0.0)
                throw ConfigError(cfg.where("geometry", "target_edge") + ": must be positive");
            ++sources;
        } else if (kind == "mesh_file") {
            ec.geometry = GeometryKind::mesh_file;
            ec.mesh_path = cfg.get_string("geometry", "path");
            ++sources;
        } else {
            throw ConfigError(cfg.where("geometry", "kind") + ": unknown geometry '" + kind + "'");
        }
        // exactly one geometry source: reject keys belonging to the others
        for (const char* k : {"radius", "refinement", "vertices", "target_edge", "path"}) {
            bool mine = (kind == "disk" && (k == std::string("radius") || k == std::string("refinement"))) ||
                        (kind == "polygon" && (k == std::string("vertices") || k == std::string("target_edge"))) ||
                        (kind == "mesh_file" && k == std::string("path"));
            if (!mine && cfg.has("geometry", k))
                throw ConfigError(cfg.where("geometry", k) +
                                  ": does not belong to geometry kind '" + kind + "'");
        }
        (void)sources;

        ec.beta = cfg.get_number("params", "beta");
        ec.mass = cfg.get_number("params", "mass");
        if (ec.beta <= 0.0) throw ConfigError(cfg.where("params", "beta") + ": must be positive");
        if (ec.mass <= 0.0) throw ConfigError(cfg.where("params", "mass") + ": must be positive");
        if (cfg.has("params", "source_file")) {
            if (cfg.has("params", "source"))
                throw ConfigError(cfg.where("params", "source") +
                                  ": give either source or source_file, not both");
            ec.source_path = cfg.get_string("params", "source_file");
        } else {
            ec.source_value = cfg.get_number("params", "source", 1.0);
            if (ec.source_value < 0.0)
                throw ConfigError(cfg.where("params", "source") + ": must be non-negative");
        }
    }

    switch (ec.experiment) {
        case ExperimentKind::solve_limit:
            ec.h_const = cfg.get_number("solve_limit", "h", 0.0);
            if (ec.h_const < 0.0)
                throw ConfigError(cfg.where("solve_limit", "h") + ": must be non-negative");
            break;
        case ExperimentKind::solve_layer:
            ec.h_const = cfg.get_number("solve_layer", "h");
            ec.eps = cfg.get_number("solve_layer", "eps");
            if (ec.h_const <= 0.0)
                throw ConfigError(cfg.where("solve_layer", "h") + ": must be positive");
            if (ec.eps <= 0.0)
                throw ConfigError(cfg.where("solve_layer", "eps") + ": must be positive");
            break;
        case ExperimentKind::gamma_sweep:
            ec.h_const = cfg.get_number("gamma_sweep", "h");
            ec.eps_schedule = cfg.get_numbers("gamma_sweep", "eps");
            for (double e : ec.eps_schedule)
                if (e <= 0.0)
                    throw ConfigError(cfg.where("gamma_sweep", "eps") +
                                      ": all eps must be positive");
            break;
        case ExperimentKind::optimize:
        case ExperimentKind::bound_check: {
            std::string sec = to_string(ec.experiment);
            ec.tol_energy = cfg.get_number(sec, "tol_energy", 1e-10);
            ec.max_outer = cfg.get_int(sec, "max_outer", 200);
            ec.solver_tol = cfg.get_number(sec, "solver_tol", 1e-12);
            if (ec.tol_energy <= 0.0)
                throw ConfigError(cfg.where(sec, "tol_energy") + ": must be positive");
            if (ec.solver_tol <= 0.0 || ec.solver_tol >= 1.0)
                throw ConfigError(cfg.where(sec, "solver_tol") + ": must be in (0, 1)");
            if (ec.experiment == ExperimentKind::bound_check) {
                ec.num_thresholds = cfg.get_int("bound_check", "thresholds", 64);
                if (ec.num_thresholds < 2)
                    throw ConfigError(cfg.where("bound_check", "thresholds") + ": need at least 2");
            }
            break;
        }
        case ExperimentKind::dirichlet_limit:
            ec.h_const = cfg.get_number("dirichlet_limit", "h");
            ec.beta_schedule = cfg.get_numbers("dirichlet_limit", "betas");
            if (ec.h_const <= 0.0)
                throw ConfigError(cfg.where("dirichlet_limit", "h") + ": must be positive");
            break;
        case ExperimentKind::oracle:
            break;
    }

    ec.output_dir = cfg.get_string("output", "dir", ".");
    ec.dump_mesh = cfg.get_bool("output", "dump_mesh", false);

    auto unused = cfg.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown field(s):";
        for (const auto& u : unused) msg += " " + u;
        throw ConfigError(msg);
    }
    return ec;
}

}  // namespace robin
