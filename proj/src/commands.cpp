#include "moire/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "moire/agmon.hpp"
#include "moire/blochpw.hpp"
#include "moire/harmonic.hpp"
#include "moire/output.hpp"
#include "moire/parallel.hpp"
#include "moire/scan.hpp"
#include "moire/singlewell.hpp"
#include "moire/topology.hpp"

#ifndef MOIRE_VERSION
#define MOIRE_VERSION "0.0.0"
#endif

namespace moire {

using nlohmann::ordered_json;

namespace {

ordered_json params_json(const ModelParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"U", p.U}, {"phi", p.phi}, {"h", p.h}};
}

ordered_json provenance(const std::string& command, const ModelParams& p) {
    ordered_json j;
    j["code"] = "moire-bands";
    j["version"] = MOIRE_VERSION;
    j["command"] = command;
    j["params"] = params_json(p);
    return j;
}

ordered_json vec_json(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

ordered_json vector_json(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

double resolve_gcut(const RunConfig& cfg, const ModelParams& p, int nlevels, double tol = 1e-9) {
    return cfg.gcut ? *cfg.gcut : converged_cutoff(p, tol, nlevels);
}

std::string sidecar(const std::string& out, const std::string& suffix) {
    if (out.empty() || out == "-") throw ValidationError("this output needs --out to name its companion file");
    return out + suffix;
}

void cmd_landscape(const RunConfig& cfg, const CommandOptions& opt) {
    const Lattice lat = build_lattice();
    const int n = cfg.landscape.n;
    ordered_json prov = provenance("landscape", cfg.params);
    prov["grid"] = n;
    prov["mode"] = to_string(cfg.landscape.mode);
    CsvWriter csv(prov, {"x1", "x2", "lambda_minus", "lambda_plus"});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Vec2 x = lat.site(double(i) / n, double(j) / n);
            const EigenPair2 e = eigs(x, cfg.params, cfg.landscape.mode);
            csv.row({x.x(), x.y(), e.minus, e.plus});
        }
    }
    emit(opt.out, csv.str());
}

void cmd_bands(const RunConfig& cfg, const CommandOptions& opt) {
    const Lattice lat = build_lattice();
    const KPath path = kpath(cfg.bands.path, cfg.bands.n_per_segment, lat);
    const double gcut = resolve_gcut(cfg, cfg.params, cfg.bands.nbands);
    const BlochSolver solver(cfg.params, gcut);
    BandOptions bo;
    bo.nbands = cfg.bands.nbands;
    bo.workers = opt.workers;
    const BandStructure bs = solver.bands_on(path.points, bo);

    ordered_json prov = provenance("bands", cfg.params);
    prov["gcut"] = gcut;
    prov["dim"] = solver.basis().dim();
    prov["path"] = cfg.bands.path;
    prov["n_per_segment"] = cfg.bands.n_per_segment;
    prov["max_residual"] = bs.residuals.maxCoeff();
    std::vector<std::string> header{"arclength", "k1", "k2"};
    for (int b = 1; b <= bo.nbands; ++b) header.push_back("E" + std::to_string(b));
    CsvWriter csv(prov, header);
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        std::vector<double> row{path.arclength[i], path.points[i].x(), path.points[i].y()};
        for (int b = 0; b < bo.nbands; ++b) row.push_back(bs.energies(static_cast<Eigen::Index>(i), b));
        csv.row(row);
    }
    emit(opt.out, csv.str());
}

void cmd_chern(const RunConfig& cfg, const CommandOptions& opt) {
    const KGrid grid = make_kgrid(cfg.chern.grid[0], cfg.chern.grid[1], build_lattice());
    const double gcut = resolve_gcut(cfg, cfg.params, cfg.chern.nbands + 1);
    const BlochSolver solver(cfg.params, gcut);
    const CurvatureField cf = berry_links(solver, grid, cfg.chern.nbands, opt.workers);
    const OddnessReport odd = curvature_oddness(cf, cfg.params);

    ordered_json j;
    j["provenance"] = provenance("chern", cfg.params);
    j["provenance"]["gcut"] = gcut;
    j["provenance"]["dim"] = solver.basis().dim();
    j["nbands"] = cf.nbands;
    j["grid"] = cfg.chern.grid;
    j["chern"] = cf.chern;
    j["flux_sum_over_2pi"] = cf.total;
    j["min_gap"] = cf.min_gap;
    j["min_gap_k"] = vec_json(cf.min_gap_k);
    j["flux_stats"] = {{"max_abs", cf.plaquette_flux.cwiseAbs().maxCoeff()},
                       {"mean_abs", cf.plaquette_flux.cwiseAbs().mean()}};
    if (odd.skipped) {
        j["oddness"] = {{"skipped", true}, {"notice", odd.notice}};
    } else {
        j["oddness"] = {{"skipped", false}, {"defect", odd.defect}, {"max_flux", odd.max_flux}};
    }
    emit(opt.out, dump_json(j) + "\n");
}

void cmd_agmon(const RunConfig& cfg, const CommandOptions& opt) {
    AgmonGrid grid;
    grid.resolution = cfg.agmon.resolution;
    grid.stencil_radius = cfg.agmon.stencil_radius;
    const TunnelingAction t =
        tunneling_action(cfg.params, cfg.agmon.E.value_or(std::numeric_limits<double>::quiet_NaN()), grid);

    ordered_json j;
    j["provenance"] = provenance("agmon", cfg.params);
    j["E"] = t.E;
    j["S0"] = t.S0;
    ordered_json actions = ordered_json::array();
    for (std::size_t i = 0; i < 6; ++i) actions.push_back({{"neighbor", vec_json(t.neighbors[i])}, {"action", t.actions[i]}});
    j["actions"] = actions;
    j["grid"] = {{"resolution", grid.resolution},
                 {"stencil_radius", grid.stencil_radius},
                 {"n1", grid.n1()},
                 {"n2", grid.n2()},
                 {"step", grid.step()}};
    if (cfg.agmon.dump_rho) {
        const std::string path = sidecar(opt.out, ".rho.csv");
        CsvWriter csv(j["provenance"], {"x1", "x2", "weight", "rho"});
        for (int a = -grid.half1(); a <= grid.half1(); ++a) {
            for (int b = -grid.half2(); b <= grid.half2(); ++b) {
                const Vec2 x = grid.node(a, b);
                const std::size_t k = grid.index(a, b);
                csv.row({x.x(), x.y(), t.field.weight[k], t.field.rho[k]});
            }
        }
        emit(path, csv.str());
        // Relative to the main output, so the JSON does not depend on where the run happened.
        j["rho_file"] = std::filesystem::path(path).filename().string();
    }
    emit(opt.out, dump_json(j) + "\n");
}

void cmd_scan(const RunConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    AgmonGrid grid;
    grid.resolution = cfg.scan.agmon_resolution;
    const TunnelingAction t = tunneling_action(cfg.params, std::numeric_limits<double>::quiet_NaN(), grid);
    const KGrid kg = make_kgrid(cfg.scan.grid[0], cfg.scan.grid[1], build_lattice());
    const ScanResult r = run_scan(cfg.params, cfg.scan.h_list, kg, cfg.scan.nbands, cfg.gcut.value_or(0.0), t.S0,
                                  opt.workers);
    for (const auto& w : r.warnings) diag << "warning: " << w << "\n";

    ordered_json prov = provenance("scan", cfg.params);
    prov["gcut"] = r.table.gcut;
    prov["dim"] = r.table.dim;
    prov["kgrid"] = cfg.scan.grid;
    std::vector<std::string> header{"h"};
    for (int b = 1; b <= cfg.scan.nbands; ++b) header.push_back("width_" + std::to_string(b));
    CsvWriter csv(prov, header);
    for (std::size_t i = 0; i < r.table.h.size(); ++i) {
        std::vector<double> row{r.table.h[i]};
        for (int b = 0; b < cfg.scan.nbands; ++b) row.push_back(r.table.widths(static_cast<Eigen::Index>(i), b));
        csv.row(row);
    }

    ordered_json fit;
    fit["provenance"] = prov;
    ordered_json fits = ordered_json::array();
    for (std::size_t b = 0; b < r.fits.size(); ++b) {
        fits.push_back({{"band", b + 1}, {"a", r.fits[b].a}, {"b", r.fits[b].b}, {"r2", r.fits[b].r2},
                        {"points_used", r.fits[b].used}});
    }
    fit["fits"] = fits;
    fit["S0"] = r.S0;
    fit["b_over_S0"] = r.ratio;
    fit["warnings"] = r.warnings;
    if (opt.out.empty() || opt.out == "-") {
        emit("", csv.str() + dump_json(fit) + "\n");
    } else {
        emit(opt.out, csv.str());
        emit(sidecar(opt.out, ".fit.json"), dump_json(fit) + "\n");
    }
}

void cmd_harmonic(const RunConfig& cfg, const CommandOptions& opt) {
    const HarmonicData hd = harmonic_data(cfg.params, parse_harmonic_mode(cfg.harmonic.mode), cfg.harmonic.nlevels);
    ordered_json prov = provenance("harmonic", cfg.params);
    prov["mode"] = cfg.harmonic.mode;
    prov["m0"] = hd.m0;
    prov["c1"] = hd.c1;
    prov["c2"] = hd.c2;
    std::vector<std::string> header{"n", "lambda_n", "E_pred"};
    Eigen::VectorXd bloch;
    if (cfg.harmonic.compare_bloch) {
        const double gcut = resolve_gcut(cfg, cfg.params, cfg.harmonic.nlevels);
        const BlochSolver solver(cfg.params, gcut);
        bloch = solver.solve(Vec2::Zero(), cfg.harmonic.nlevels).values;
        prov["gcut"] = gcut;
        prov["dim"] = solver.basis().dim();
        header.insert(header.end(), {"E_gamma", "error_over_h"});
    }
    CsvWriter csv(prov, header);
    for (int n = 1; n <= cfg.harmonic.nlevels; ++n) {
        const double pred = predicted_E(hd, cfg.params.h, n);
        std::vector<double> row{double(n), hd.levels[static_cast<std::size_t>(n - 1)], pred};
        if (bloch.size() > 0) {
            row.push_back(bloch(n - 1));
            row.push_back((bloch(n - 1) - pred) / cfg.params.h);
        }
        csv.row(row);
    }
    emit(opt.out, csv.str());
}

void cmd_wells(const RunConfig& cfg, const CommandOptions& opt) {
    const WellAudit a = wells_audit(cfg.params, cfg.wells.grid_n, cfg.wells.mode);
    ordered_json j;
    j["provenance"] = provenance("wells", cfg.params);
    j["mode"] = to_string(a.mode);
    j["grid_n"] = a.grid_n;
    j["assumption1_holds"] = a.assumption1_holds;
    j["verdict"] = a.verdict;
    j["gap_ok"] = a.gap_ok;
    j["min_gap"] = a.min_gap;
    ordered_json minima = ordered_json::array();
    for (const auto& m : a.minima) {
        minima.push_back({{"location", vec_json(m.location)},
                          {"value", m.value},
                          {"hessian", {{m.hessian(0, 0), m.hessian(0, 1)}, {m.hessian(1, 0), m.hessian(1, 1)}}},
                          {"condition", m.condition},
                          {"degenerate", m.degenerate}});
    }
    j["minima"] = minima;
    // Eigenvalue gap of the potential at the origin under both eigenvalue formulas.
    const EigenPair2 ex = eigs_exact(Vec2::Zero(), cfg.params);
    ordered_json gap = {{"exact", ex.plus - ex.minus}};
    if (cfg.params.alpha == 1.0) {
        const EigenPair2 pm = eigs_papermode(Vec2::Zero(), cfg.params);
        gap["papermode"] = pm.plus - pm.minus;
    } else {
        gap["papermode"] = nullptr;
    }
    j["gap_at_origin"] = gap;
    emit(opt.out, dump_json(j) + "\n");
}

void cmd_well(const RunConfig& cfg, const CommandOptions& opt) {
    WellProblem wp;
    wp.params = cfg.params;
    wp.L = cfg.well.L;
    wp.n = cfg.well.n > 0 ? cfg.well.n : default_well_points(cfg.params.h);
    wp.chi.delta1 = cfg.well.delta1;
    wp.chi.delta2 = cfg.well.delta2;
    const WellSpectrum s = well_eigs(wp, cfg.well.nev);
    ordered_json j;
    j["provenance"] = provenance("well", cfg.params);
    j["h"] = cfg.params.h;
    j["E"] = vector_json(s.values);
    j["residuals"] = vector_json(s.residuals);
    j["grid"] = {{"L", wp.L}, {"n", wp.n}, {"step", wp.step()}};
    j["chi"] = {{"delta1", wp.chi.delta1}, {"delta2", wp.chi.delta2}};
    emit(opt.out, dump_json(j) + "\n");
}

void cmd_fourier(const RunConfig& cfg, const CommandOptions& opt) {
    const Lattice lat = build_lattice();
    const FourierTable table = fourier_table(cfg.params, lat);
    const int N = cfg.fourier.samples;
    std::vector<Mat2c> samples(static_cast<std::size_t>(N) * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            samples[static_cast<std::size_t>(a) * N + b] = assemble_V(lat.site(double(a) / N, double(b) / N), cfg.params);

    // Plain DFT over the sampled cell: exact for trigonometric polynomials of degree < N/2.
    double dft_err = 0.0;
    const int half = (N - 1) / 2;
    for (int m = -half; m <= half; ++m) {
        for (int n = -half; n <= half; ++n) {
            Mat2c acc = Mat2c::Zero();
            for (int a = 0; a < N; ++a) {
                for (int b = 0; b < N; ++b) {
                    const double ang = -2.0 * std::numbers::pi * (m * a + n * b) / N;
                    acc += samples[static_cast<std::size_t>(a) * N + b] * std::polar(1.0, ang);
                }
            }
            acc /= double(N) * N;
            dft_err = std::max(dft_err, (acc - table.coefficient(m, n)).cwiseAbs().maxCoeff());
        }
    }

    std::mt19937_64 rng(cfg.fourier.seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double recon_err = 0.0;
    for (int i = 0; i < cfg.fourier.points; ++i) {
        const Vec2 x(u(rng), u(rng));
        recon_err = std::max(recon_err, (table.evaluate(x, lat) - assemble_V(x, cfg.params)).cwiseAbs().maxCoeff());
    }

    ordered_json j;
    j["provenance"] = provenance("fourier-check", cfg.params);
    j["entries"] = table.entries.size();
    ordered_json list = ordered_json::array();
    for (const auto& [q, c] : table.entries) list.push_back(ordered_json::array({q.first, q.second}));
    j["momenta"] = list;
    j["samples"] = N;
    j["max_dft_error"] = dft_err;
    j["points"] = cfg.fourier.points;
    j["max_reconstruction_error"] = recon_err;
    j["pass"] = dft_err <= 1e-12 && recon_err <= 1e-12;
    emit(opt.out, dump_json(j) + "\n");
}

}  // namespace

std::vector<std::string> command_names() {
    return {"landscape", "bands", "chern", "agmon", "scan", "harmonic", "wells", "well", "fourier-check"};
}

void run_command(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    if (command == "landscape") return cmd_landscape(cfg, opt);
    if (command == "bands") return cmd_bands(cfg, opt);
    if (command == "chern") return cmd_chern(cfg, opt);
    if (command == "agmon") return cmd_agmon(cfg, opt);
    if (command == "scan") return cmd_scan(cfg, opt, diag);
    if (command == "harmonic") return cmd_harmonic(cfg, opt);
    if (command == "wells") return cmd_wells(cfg, opt);
    if (command == "well") return cmd_well(cfg, opt);
    if (command == "fourier-check") return cmd_fourier(cfg, opt);
    throw ValidationError("unknown command '" + command + "'");
}

int run(const std::string& command, const RunConfig& cfg, const CommandOptions& opt, std::ostream& diag) {
    try {
        run_command(command, cfg, opt, diag);
        return 0;
    } catch (const ValidationError& e) {
        diag << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        diag << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 3;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Band structures and semiclassical diagnostics for the twisted-bilayer continuum model",
                 "moire-bands"};
    app.set_version_flag("--version", std::string(MOIRE_VERSION));
    app.require_subcommand(1);
    std::string config_file, preset_name, out;
    int workers = 0;
    for (const auto& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        auto* cfg_opt = sub->add_option("--config", config_file, "JSON run configuration");
        auto* pre_opt = sub->add_option("--preset", preset_name, "named parameter preset");
        cfg_opt->excludes(pre_opt);
        sub->add_option("--out", out, "output path (default: standard output)");
        sub->add_option("--workers", workers, "worker threads (default: MOIRE_BANDS_WORKERS or 1)")
            ->check(CLI::NonNegativeNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg;
        if (!config_file.empty()) {
            std::ifstream f(config_file);
            if (!f) throw ValidationError("cannot read config file '" + config_file + "'");
            std::stringstream ss;
            ss << f.rdbuf();
            cfg = parse_config(ss.str());
        } else if (!preset_name.empty()) {
            cfg = preset(preset_name);
        } else {
            throw ValidationError("one of --config or --preset is required");
        }
        CommandOptions opt;
        opt.out = out;
        opt.workers = resolve_workers(workers);
        return run(command, cfg, opt, std::cerr);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace moire
