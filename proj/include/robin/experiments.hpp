#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "robin/bounds.hpp"
#include "robin/config.hpp"
#include "robin/insulation.hpp"
#include "robin/radial.hpp"

namespace robin {

using json = nlohmann::ordered_json;

namespace detail {

inline TriangleMesh build_geometry(const ExperimentConfig& cfg) {
    switch (cfg.geometry) {
        case GeometryKind::disk: return make_disk_mesh(cfg.radius, cfg.refinement);
        case GeometryKind::polygon: return make_polygon_mesh(cfg.vertices, cfg.target_edge);
        case GeometryKind::mesh_file: {
            std::ifstream in(cfg.mesh_path);
            if (!in) throw ConfigError("cannot open mesh file '" + cfg.mesh_path + "'");
            return load_mesh(in);
        }
    }
    throw std::logic_error("unreachable");
}

inline SourceField build_source(const ExperimentConfig& cfg, int num_vertices) {
    if (cfg.source_path.empty()) return SourceField::uniform(cfg.source_value);
    std::ifstream in(cfg.source_path);
    if (!in) throw ConfigError("cannot open source file '" + cfg.source_path + "'");
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (static_cast<int>(vals.size()) != num_vertices)
        throw ConfigError("source file has " + std::to_string(vals.size()) +
                          " values, mesh has " + std::to_string(num_vertices) + " vertices");
    return SourceField::from_nodal(std::move(vals));
}

inline json echo_config(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = to_string(cfg.experiment);
    if (cfg.experiment == ExperimentKind::oracle) {
        j["R"] = cfg.oracle_R;
        j["n"] = cfg.oracle_n;
        j["beta"] = cfg.beta;
        j["h"] = cfg.oracle_h;
        if (cfg.oracle_eps > 0.0) j["eps"] = cfg.oracle_eps;
        return j;
    }
    switch (cfg.geometry) {
        case GeometryKind::disk:
            j["geometry"] = {{"kind", "disk"}, {"radius", cfg.radius},
                             {"refinement", cfg.refinement}};
            break;
        case GeometryKind::polygon: {
            json verts = json::array();
            for (const Vec2& v : cfg.vertices) verts.push_back({v.x, v.y});
            j["geometry"] = {{"kind", "polygon"}, {"vertices", verts},
                             {"target_edge", cfg.target_edge}};
            break;
        }
        case GeometryKind::mesh_file:
            j["geometry"] = {{"kind", "mesh_file"}, {"path", cfg.mesh_path}};
            break;
    }
    j["params"] = {{"beta", cfg.beta}, {"mass", cfg.mass}};
    if (cfg.source_path.empty()) j["params"]["source"] = cfg.source_value;
    else j["params"]["source_file"] = cfg.source_path;
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace detail

// Runs one experiment, writing summary.json plus experiment CSVs into
// output_dir. Returns the summary. Throws ConfigError for input problems and
// other exceptions for numerical failures.
inline json run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path outdir(cfg.output_dir);
    fs::create_directories(outdir);

    json summary;
    summary["config"] = detail::echo_config(cfg);
    json& res = summary["results"];

    if (cfg.experiment == ExperimentKind::oracle) {
        RadialSolution s = cfg.oracle_eps > 0.0
            ? layer_ball_solution(cfg.oracle_R, cfg.oracle_n, cfg.beta, cfg.oracle_h, cfg.oracle_eps)
            : limit_ball_solution(cfg.oracle_R, cfg.oracle_n, cfg.beta, cfg.oracle_h);
        res["boundary_value"] = s.boundary_value;
        res["center_value"] = s.body_value(0.0);
        res["heat_content"] = s.heat_content;
        if (cfg.oracle_eps > 0.0) res["outer_value"] = s.outer_value;
        double wn = unit_ball_volume(cfg.oracle_n);
        double per = cfg.oracle_n * wn * std::pow(cfg.oracle_R, cfg.oracle_n - 1);
        ProblemParams p{cfg.beta, cfg.oracle_h * per, cfg.oracle_n};
        res["isoperimetric_bound"] =
            isoperimetric_bound(wn * std::pow(cfg.oracle_R, cfg.oracle_n), per, p);
    } else {
        TriangleMesh mesh = detail::build_geometry(cfg);
        BoundaryMap bmap = BoundaryMap::from_mesh(mesh);
        SourceField f = detail::build_source(cfg, mesh.num_vertices());
        ProblemParams params{cfg.beta, cfg.mass, 2};
        res["mesh"] = {{"vertices", mesh.num_vertices()},
                       {"triangles", mesh.num_triangles()},
                       {"area", mesh.area()},
                       {"perimeter", mesh.perimeter()}};

        switch (cfg.experiment) {
            case ExperimentKind::solve_limit: {
                std::vector<double> h(bmap.size(), cfg.h_const);
                LinearSystem sys = assemble_limit_energy(mesh, bmap, h, params, f);
                ScalarField u = solve(sys, 1e-12);
                res["energy"] = quadratic_energy(sys, u);
                res["heat_content"] = heat_content(mesh, u);
                res["h"] = cfg.h_const;
                std::ofstream csv(outdir / "field.csv");
                save_field_csv(mesh, u, csv);
                break;
            }
            case ExperimentKind::solve_layer: {
                std::vector<double> h(bmap.size(), cfg.h_const);
                TriangleMesh mesh_eps = extrude_layer(mesh, bmap, h, cfg.eps);
                LinearSystem sys = assemble_layer_energy(mesh_eps, cfg.eps, params, f);
                ScalarField u = solve(sys, 1e-12);
                res["energy"] = quadratic_energy(sys, u);
                res["heat_content"] = heat_content(mesh_eps, u);
                res["layer_area"] = mesh_eps.area(Region::layer);
                std::ofstream csv(outdir / "field.csv");
                save_field_csv(mesh_eps, u, csv);
                if (cfg.dump_mesh) {
                    std::ofstream mout(outdir / "mesh.txt");
                    save_mesh(mesh_eps, mout);
                }
                break;
            }
            case ExperimentKind::gamma_sweep: {
                std::vector<double> h(bmap.size(), cfg.h_const);
                LinearSystem lim_sys = assemble_limit_energy(mesh, bmap, h, params, f);
                double min_F = quadratic_energy(lim_sys, solve(lim_sys, 1e-12));
                res["min_F"] = min_F;
                std::string csv = "eps,min_F_eps,min_F,gap\n";
                json gaps = json::array();
                for (double eps : cfg.eps_schedule) {
                    TriangleMesh mesh_eps = extrude_layer(mesh, bmap, h, eps);
                    LinearSystem sys = assemble_layer_energy(mesh_eps, eps, params, f);
                    double fe = quadratic_energy(sys, solve(sys, 1e-12));
                    double gap = std::fabs(fe - min_F);
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                                  eps, fe, min_F, gap);
                    csv += buf;
                    gaps.push_back({{"eps", eps}, {"min_F_eps", fe}, {"gap", gap}});
                }
                res["sweep"] = gaps;
                json orders = json::array();
                for (size_t i = 1; i < gaps.size(); ++i) {
                    double g0 = gaps[i - 1]["gap"], g1 = gaps[i]["gap"];
                    double e0 = gaps[i - 1]["eps"], e1 = gaps[i]["eps"];
                    orders.push_back(std::log(g0 / g1) / std::log(e0 / e1));
                }
                res["orders"] = orders;
                detail::write_text(outdir / "gamma_sweep.csv", csv);
                break;
            }
            case ExperimentKind::optimize:
            case ExperimentKind::bound_check: {
                AlternatingReport rep = alternating_minimize(
                    mesh, bmap, params, f, cfg.tol_energy, cfg.max_outer, {}, cfg.solver_tol);
                double bound = isoperimetric_bound(mesh.area(), mesh.perimeter(), params);
                res["energy"] = rep.final_energy;
                res["heat_content"] = rep.heat;
                res["threshold_constant"] = rep.c;
                res["iterations"] = rep.iterations;
                res["isoperimetric_bound"] = bound;
                res["heat_to_bound_ratio"] = rep.heat / bound;
                double hmin = rep.h.values[0], hmax = rep.h.values[0];
                for (double v : rep.h.values) { hmin = std::min(hmin, v); hmax = std::max(hmax, v); }
                double hbar = cfg.mass / bmap.perimeter();
                res["h_min"] = hmin;
                res["h_max"] = hmax;
                res["h_uniformity_sup_deviation"] =
                    std::max(hmax - hbar, hbar - hmin) / hbar;
                {
                    std::ofstream csv(outdir / "field.csv");
                    save_field_csv(mesh, rep.u, csv);
                }
                {
                    std::ofstream csv(outdir / "insulation.csv");
                    save_insulation_csv(bmap, rep.h.values, csv);
                }
                {
                    std::ofstream csv(outdir / "energy_trace.csv");
                    save_energy_trace_csv(rep.energy_trace, csv);
                }
                if (cfg.experiment == ExperimentKind::bound_check) {
                    LevelSetProfile prof = level_set_diagnostic(mesh, bmap, rep.u, rep.h.values,
                                                                params, cfg.num_thresholds);
                    res["worst_violation_psquare"] = prof.worst_violation_psquare;
                    res["worst_violation_master"] = prof.worst_violation_master;
                    std::ofstream csv(outdir / "level_sets.csv");
                    save_level_set_csv(prof, csv);
                }
                break;
            }
            case ExperimentKind::dirichlet_limit: {
                std::vector<double> h(bmap.size(), cfg.h_const);
                DirichletLimitReport rep =
                    dirichlet_limit_check(mesh, bmap, h, f, cfg.beta_schedule, cfg.mass);
                res["reinforcement_heat"] = rep.reinforcement_heat;
                std::string csv = "beta,l2_gap\n";
                json gaps = json::array();
                for (size_t i = 0; i < rep.betas.size(); ++i) {
                    char buf[80];
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rep.betas[i], rep.l2_gaps[i]);
                    csv += buf;
                    gaps.push_back({{"beta", rep.betas[i]}, {"l2_gap", rep.l2_gaps[i]}});
                }
                res["gaps"] = gaps;
                res["orders"] = rep.orders;
                detail::write_text(outdir / "dirichlet_limit.csv", csv);
                break;
            }
            case ExperimentKind::oracle:
                break;  // handled above
        }
        if (cfg.dump_mesh && cfg.experiment != ExperimentKind::solve_layer) {
            std::ofstream mout(outdir / "mesh.txt");
            save_mesh(mesh, mout);
        }
    }

    summary["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now().time_since_epoch()).count();
    detail::write_text(outdir / "summary.json", summary.dump(2) + "\n");
    return summary;
}

}  // namespace robin
