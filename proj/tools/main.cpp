// Command-line front end: generate drivers, solve, verify, run studies.
// Batch only; every command is deterministic given its config file.
//
// Exit codes: 0 pass, 1 check/solver failure, 2 insufficient data,
//             3 config or IO error.

#include "rough/analysis.hpp"
#include "rough/io.hpp"
#include "rough/sewing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using nlohmann::json;
using namespace rough;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    json j;
    in >> j;
    if (j.value("schema_version", 0) != io::schema_version)
        throw std::invalid_argument("config: unsupported schema_version");
    return j;
}

FbmSpec fbm_spec_from(const json& j) {
    FbmSpec spec;
    spec.H = j.at("H").get<double>();
    spec.dim = j.value("d", 1);
    spec.n_coarse = j.value("n", std::size_t(1024));
    spec.refine_factor = j.value("refine", 8);
    spec.seed = j.value("seed", std::uint64_t(1));
    spec.horizon = j.value("horizon", 1.0);
    spec.gamma_margin = j.value("gamma_margin", 0.02);
    return spec;
}

PowerCoefficient coefficient_from(const json& cfg) {
    if (cfg.contains("coefficient_file"))
        return io::coefficient_from_json_file(cfg.at("coefficient_file").get<std::string>());
    return io::coefficient_from_json(cfg.at("coefficient").dump());
}

SolverParams params_from(const json& cfg, double default_gamma, double kappa) {
    SolverParams p;
    p.gamma = default_gamma;
    p.kappa = kappa;
    if (cfg.contains("params")) {
        const json& j = cfg["params"];
        if (j.contains("gamma") && !j["gamma"].is_null()) p.gamma = j["gamma"].get<double>();
        p.c0 = j.value("c0", p.c0);
        p.step_frac = j.value("step_frac", p.step_frac);
        p.zero_threshold = j.value("zero_threshold", p.zero_threshold);
        p.max_steps = j.value("max_steps", p.max_steps);
        p.auto_halve_c0 = j.value("auto_halve_c0", p.auto_halve_c0);
    }
    return p;
}

ScalarField named_field(const std::string& name) {
    if (name == "sin")
        return ScalarField::scalar("sin", [](double x) { return std::sin(x); },
                                   [](double x) { return std::cos(x); },
                                   [](double x) { return -std::sin(x); });
    if (name == "quadratic")
        return ScalarField::scalar("quadratic", [](double x) { return 0.5 * x * x; },
                                   [](double x) { return x; }, [](double) { return 1.0; });
    if (name == "linear")
        return ScalarField::scalar("linear", [](double x) { return 2.0 * x - 1.0; },
                                   [](double) { return 2.0; }, [](double) { return 0.0; });
    throw std::invalid_argument("unknown field: " + name);
}

int cmd_gen_path(const json& cfg, const std::filesystem::path& out) {
    const json& dj = cfg.at("driver");
    const std::string type = dj.value("type", "fbm");
    io::PathMeta meta;
    RoughPath rp;
    if (type == "fbm") {
        const FbmSpec spec = fbm_spec_from(dj);
        rp = fbm_rough_path(spec);
        meta.H = spec.H;
        meta.seed = spec.seed;
        meta.refine_factor = spec.refine_factor;
        meta.dim = spec.dim;
        meta.n = spec.n_coarse;
        meta.horizon = spec.horizon;
        meta.driver = "fbm";
    } else if (type == "lacunary") {
        // deterministic trend + cascade driver (1-d)
        LacunarySpec lac;
        lac.exponent = dj.value("exponent", 0.42);
        lac.levels = dj.value("levels", 16);
        lac.amplitude = dj.value("amplitude", 1.0);
        lac.trend = dj.value("trend", 0.0);
        lac.phase_salt = dj.value("phase_salt", 0u);
        const double T = dj.value("horizon", 1.0);
        const std::size_t n = dj.value("n", std::size_t(4096));
        const int refine = dj.value("refine", 4);
        const double gamma = dj.value("gamma", std::min(lac.exponent - 0.02, 1.0));
        TimeGrid coarse = TimeGrid::uniform(T, n);
        rp = lift_piecewise_linear(lacunary_driver(coarse.refined(refine), lac), coarse, gamma);
        meta.refine_factor = refine;
        meta.dim = 1;
        meta.n = n;
        meta.horizon = T;
        meta.driver = "lacunary";
    } else {
        throw std::invalid_argument("gen-path: unknown driver type " + type);
    }
    meta.gamma = rp.gamma;
    io::write_rough_path(out, rp, meta);
    std::cout << "wrote driver to " << out.string() << "\n";
    return 0;
}

int cmd_solve(const json& cfg, const std::filesystem::path& out) {
    auto loaded = io::load_rough_path(cfg.at("driver_dir").get<std::string>());
    PowerCoefficient pc = coefficient_from(cfg);
    const std::string mode = cfg.value("mode", "md");
    std::vector<double> a;
    if (cfg.at("a").is_array()) a = cfg["a"].get<std::vector<double>>();
    else a = {cfg["a"].get<double>()};

    SolutionPath sp;
    if (mode == "lamperti") {
        const std::string zm = cfg.value("lamperti_zero_mode", "absorb");
        const auto m = zm == "absorb" ? LampertiZeroMode::absorb
                                      : LampertiZeroMode::continue_through;
        SolverParams p = params_from(cfg, loaded.meta.gamma, pc.kappa);
        sp = solve_1d_lamperti(pc, a.at(0), loaded.rp.x, m, p.zero_threshold);
        if (sp.zero_companion) {
            // the trivial solution is exhibited alongside the transform solution
            SolutionPath zero = sp;
            std::fill(zero.y.raw().begin(), zero.y.raw().end(), 0.0);
            zero.case_label = 'B';
            zero.tau = 0.0;
            io::write_solution(out, zero, "solution_zero");
        }
    } else if (mode == "md") {
        SolverParams p = params_from(cfg, loaded.meta.gamma, pc.kappa);
        sp = solve_md_davie(pc, a, loaded.rp, p);
    } else {
        throw std::invalid_argument("solve: unknown mode " + mode);
    }
    io::write_solution(out, sp);
    io::write_shells_json(out / "shells.json", sp);
    std::cout << "case " << sp.case_label << (sp.tau ? " tau=" + io::fmt(*sp.tau) : "") << "\n";
    return 0;
}

int cmd_verify(const json& cfg, const std::filesystem::path& out) {
    auto loaded = io::load_rough_path(cfg.at("driver_dir").get<std::string>());
    PowerCoefficient pc = coefficient_from(cfg);
    const double gamma = cfg.value("gamma", loaded.meta.gamma);

    struct Row {
        std::string name;
        bool pass;
        double value;
    };
    std::vector<Row> rows;

    const auto lift = validate_rough_path(loaded.rp);
    rows.push_back({"chen", lift.chen_residual_rel < 1e-10 &&
                                loaded.redundant_chen_residual < 1e-8,
                    std::max(lift.chen_residual_rel, loaded.redundant_chen_residual)});
    rows.push_back({"symmetry", lift.sym_residual_rel < 1e-10, lift.sym_residual_rel});
    rows.push_back({"x0_zero", lift.x0_zero, 0.0});

    const auto hyp = verify_hypotheses(pc, gamma);
    for (const auto& c : hyp.checks) rows.push_back({c.name, c.pass, c.worst});

    {
        // discrete Leibniz rule on seeded random data
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        TimeGrid g = TimeGrid::uniform(1.0, 24);
        Inc1 gf(g, 1);
        for (auto& v : gf.raw()) v = u(rng);
        Inc2Grid h(g, 1);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = i + 1; j < g.size(); ++j) h.set_scalar(i, j, u(rng));
        const double resid = product_rule_check(gf, h);
        rows.push_back({"product_rule", resid < 1e-12, resid});
    }
    {
        // K_mu oracle and the discrete sewing inequality on a seeded instance
        const double k2 = k_mu(2.0);
        rows.push_back({"kmu_oracle", std::abs(k2 - 4.0 * M_PI * M_PI / 6.0) < 1e-7, k2});
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        TimeGrid g = TimeGrid::dyadic(1.0, 5);
        Inc2Grid R(g, 1);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = i + 2; j < g.size(); ++j) R.set_scalar(i, j, u(rng));
        const auto chk = discrete_sewing_check(R, 1.2);
        rows.push_back({"discrete_sewing", chk.pass, chk.lhs / std::max(chk.rhs, 1e-300)});
    }
    {
        // delta(sew(h)) = h consistency on a Young-type instance from the driver
        const std::size_t n = loaded.rp.grid.size();
        const int depth = 5;
        const std::size_t stride = std::max<std::size_t>(1, (n - 1) >> depth);
        std::vector<double> pts, xv;
        for (std::size_t i = 0; i < n; i += stride) {
            pts.push_back(loaded.rp.grid[i]);
            xv.push_back(loaded.rp.x.value(i)[0]);
        }
        TimeGrid g(pts);
        Inc3Grid h(g, 1);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = i + 1; j < g.size(); ++j)
                for (std::size_t k = j + 1; k < g.size(); ++k)
                    h.at(i, j, k)[0] = -(xv[j] - xv[i]) * (xv[k] - xv[j]);
        const auto sr = sew(h, 1.2);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = i + 1; j < g.size(); ++j)
                for (std::size_t k = j + 1; k < g.size(); ++k)
                    worst = std::max(worst,
                                     std::abs(sr.lambda_h.scalar(i, k) - sr.lambda_h.scalar(i, j) -
                                              sr.lambda_h.scalar(j, k) - h.scalar(i, j, k)));
        const double scale = std::max(1e-300, sr.norm_h);
        rows.push_back({"sewing_delta_consistency", worst / scale < 1e-10, worst / scale});
    }

    bool all = true;
    json out_rows = json::array();
    for (const auto& r : rows) {
        all = all && r.pass;
        out_rows.push_back({{"check", r.name}, {"pass", r.pass}, {"value", r.value}});
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << io::fmt(r.value) << ")\n";
    }
    json rep;
    rep["schema_version"] = io::schema_version;
    rep["checks"] = out_rows;
    rep["all_pass"] = all;
    std::filesystem::create_directories(out);
    std::ofstream(out / "report.json") << rep.dump(2) << "\n";
    return all ? 0 : 1;
}

int cmd_study(const json& cfg, const std::filesystem::path& out) {
    const std::string kind = cfg.at("study").get<std::string>();
    std::filesystem::create_directories(out);

    if (kind == "ito_strat") {
        auto loaded = io::load_rough_path(cfg.at("driver_dir").get<std::string>());
        std::vector<ScalarField> fields;
        for (const auto& f : cfg.value("fields", std::vector<std::string>{"sin"}))
            fields.push_back(named_field(f));
        std::vector<int> depths = cfg.value("depths", std::vector<int>{8, 9, 10, 11, 12});
        const auto study = ito_stratonovich_study(loaded.rp, fields, depths);
        io::write_ito_study(out, study);
        for (const auto& [name, fit] : study.orders)
            std::cout << name << " order " << io::fmt(fit.slope) << " +- "
                      << io::fmt(fit.slope_stderr) << "\n";
        return 0;
    }

    if (kind == "convergence") {
        PowerCoefficient pc = coefficient_from(cfg);
        const FbmSpec spec = fbm_spec_from(cfg.at("fine"));
        RoughPath fine_rp = fbm_rough_path(spec);
        // rebuild the raw fine path from the lift grid for re-lifting
        Inc1 fine_path = fine_rp.x;
        std::vector<double> a = cfg.at("a").get<std::vector<double>>();
        SolverParams p = params_from(cfg, fine_rp.gamma, pc.kappa);
        std::vector<std::size_t> levels = cfg.at("levels").get<std::vector<std::size_t>>();
        const std::size_t ref = cfg.at("reference_level").get<std::size_t>();
        const auto rep = self_convergence_study(pc, a, fine_path, p.gamma, levels, ref, p);
        io::write_convergence_report(out, rep);
        std::cout << "order " << io::fmt(rep.order.slope) << "\n";
        return 0;
    }

    // scaling and gap studies run on a solve defined by the same config
    auto loaded = io::load_rough_path(cfg.at("driver_dir").get<std::string>());
    PowerCoefficient pc = coefficient_from(cfg);
    SolverParams p = params_from(cfg, loaded.meta.gamma, pc.kappa);
    std::vector<double> a = cfg.at("a").get<std::vector<double>>();
    SolutionPath sp = solve_md_davie(pc, a, loaded.rp, p);

    if (kind == "scaling") {
        StudyOptions opts;
        opts.eps1 = cfg.value("eps1", opts.eps1);
        if (cfg.contains("eps2") && !cfg["eps2"].is_null()) opts.eps2 = cfg["eps2"].get<double>();
        opts.q_min = cfg.value("q_min", opts.q_min);
        opts.q_max = cfg.value("q_max", opts.q_max);
        const auto rep = scaling_study(sp, loaded.rp, pc, p.gamma, opts);
        io::write_regularity_report(out, rep);
        std::cout << "y slope " << io::fmt(rep.y_fit.slope) << " (target " << io::fmt(rep.target_y)
                  << "), R slope " << io::fmt(rep.R_fit.slope) << " (target "
                  << io::fmt(rep.target_R) << ")\n";
        return 0;
    }
    if (kind == "gaps") {
        const double alpha = p.alpha();
        const double eps2 = cfg.contains("eps2") && !cfg["eps2"].is_null()
                                ? cfg["eps2"].get<double>()
                                : 0.9 * std::min(pc.kappa / (1.0 - p.gamma),
                                                 cfg.value("eps1", 0.05) * alpha /
                                                     (p.gamma + cfg.value("eps1", 0.05)));
        const double tol = cfg.value("band_tol", 0.25);
        const auto rep = gap_study(sp.shells, p, eps2, cfg.value("q_min", 3));
        io::write_gap_report(out, rep, tol);
        std::cout << "gap slope " << io::fmt(rep.fit.slope) << " band ["
                  << io::fmt(rep.band_lo(tol)) << ", " << io::fmt(rep.band_hi(tol)) << "]\n";
        return rep.in_band(tol) ? 0 : 1;
    }
    throw std::invalid_argument("study: unknown kind " + kind);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rough-path calculus toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory");
    };
    auto* gen = app.add_subcommand("gen-path", "generate a driver rough path");
    auto* solve = app.add_subcommand("solve", "solve dy = sigma(y) dx");
    auto* verify = app.add_subcommand("verify", "validate driver, coefficient and calculus");
    auto* study = app.add_subcommand("study", "scaling / gaps / ito_strat / convergence studies");
    for (auto* sub : {gen, solve, verify, study}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path);
        const std::filesystem::path out(out_dir);
        if (gen->parsed()) return cmd_gen_path(cfg, out);
        if (solve->parsed()) return cmd_solve(cfg, out);
        if (verify->parsed()) return cmd_verify(cfg, out);
        if (study->parsed()) return cmd_study(cfg, out);
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("InsufficientShells") != std::string::npos) return 2;
        return 1;
    }
}
