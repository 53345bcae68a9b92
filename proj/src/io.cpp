#include "rough/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rough::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
    std::filesystem::create_directories(file.parent_path().empty() ? "." : file.parent_path());
    std::ofstream out(file);
    if (!out) throw std::runtime_error("io: cannot open for writing: " + file.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("io: cannot open for reading: " + file.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_rough_path(const std::filesystem::path& dir, const RoughPath& rp,
                      const PathMeta& meta) {
    std::filesystem::create_directories(dir);
    const int d = rp.dim;
    {
        auto out = open_out(dir / "path.csv");
        out << "t";
        for (int c = 0; c < d; ++c) out << ",x" << (c + 1);
        out << "\n";
        for (std::size_t i = 0; i < rp.grid.size(); ++i) {
            out << fmt(rp.grid[i]);
            auto x = rp.x.value(i);
            for (int c = 0; c < d; ++c) out << "," << fmt(x[c]);
            out << "\n";
        }
    }
    {
        auto out = open_out(dir / "area.csv");
        out << "i,j";
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) out << ",v" << a << b;
        out << "\n";
        auto row = [&](std::size_t i, std::size_t j, std::span<const double> blk) {
            out << i << "," << j;
            for (double v : blk) out << "," << fmt(v);
            out << "\n";
        };
        for (std::size_t i = 0; i + 1 < rp.grid.size(); ++i) row(i, i + 1, rp.block(i));
        // redundancy rows: every second-neighbour block, so single-row
        // corruption is detectable against the consecutive data
        for (std::size_t i = 0; i + 2 < rp.grid.size(); ++i)
            row(i, i + 2, chen_extend(rp, i, i + 2));
    }
    {
        json j;
        j["schema_version"] = schema_version;
        j["driver"] = meta.driver;
        j["H"] = meta.H;
        j["seed"] = meta.seed;
        j["gamma"] = rp.gamma;
        j["refine_factor"] = meta.refine_factor;
        j["dim"] = d;
        j["n"] = rp.grid.intervals();
        j["horizon"] = rp.grid.horizon();
        auto out = open_out(dir / "meta.json");
        out << j.dump(2) << "\n";
    }
}

LoadedRoughPath load_rough_path(const std::filesystem::path& dir) {
    LoadedRoughPath loaded;
    json meta;
    open_in(dir / "meta.json") >> meta;
    loaded.meta.H = meta.value("H", 0.0);
    loaded.meta.seed = meta.value("seed", std::uint64_t(0));
    loaded.meta.gamma = meta.value("gamma", 0.0);
    loaded.meta.refine_factor = meta.value("refine_factor", 0);
    loaded.meta.dim = meta.value("dim", 1);
    loaded.meta.n = meta.value("n", std::size_t(0));
    loaded.meta.horizon = meta.value("horizon", 1.0);
    loaded.meta.driver = meta.value("driver", std::string("fbm"));

    const int d = loaded.meta.dim;
    auto& rp = loaded.rp;
    rp.dim = d;
    rp.gamma = loaded.meta.gamma;

    std::vector<double> times;
    std::vector<double> xs;
    {
        auto in = open_in(dir / "path.csv");
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv(line);
            if (int(cells.size()) != d + 1)
                throw std::runtime_error("io: path.csv row has wrong arity");
            times.push_back(std::stod(cells[0]));
            for (int c = 0; c < d; ++c) xs.push_back(std::stod(cells[1 + c]));
        }
    }
    rp.grid = TimeGrid(times);
    rp.x = Inc1(rp.grid, d, std::move(xs));
    rp.x2.assign((rp.grid.size() - 1) * std::size_t(d) * d, 0.0);

    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::vector<double>>> extended;
    {
        auto in = open_in(dir / "area.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            auto cells = split_csv(line);
            if (int(cells.size()) != d * d + 2)
                throw std::runtime_error("io: area.csv row has wrong arity");
            const std::size_t i = std::stoul(cells[0]);
            const std::size_t j = std::stoul(cells[1]);
            std::vector<double> blk(std::size_t(d) * d);
            for (int c = 0; c < d * d; ++c) blk[c] = std::stod(cells[2 + c]);
            if (j == i + 1) {
                std::copy(blk.begin(), blk.end(), rp.block(i).begin());
            } else {
                extended.push_back({{i, j}, std::move(blk)});
            }
        }
    }
    double worst = 0.0, scale = 1e-300;
    for (const auto& [ij, blk] : extended) {
        const auto ext = chen_extend(rp, ij.first, ij.second);
        for (int c = 0; c < d * d; ++c) {
            worst = std::max(worst, std::abs(ext[c] - blk[c]));
            scale = std::max(scale, std::abs(blk[c]));
        }
    }
    loaded.redundant_chen_residual = worst / scale;
    return loaded;
}

void write_solution(const std::filesystem::path& dir, const SolutionPath& sp,
                    const std::string& stem) {
    std::filesystem::create_directories(dir);
    const int m = sp.y.dim();
    auto out = open_out(dir / (stem + ".csv"));
    out << "t";
    for (int c = 0; c < m; ++c) out << ",y" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i < sp.grid.size(); ++i) {
        out << fmt(sp.grid[i]);
        auto y = sp.y.value(i);
        for (int c = 0; c < m; ++c) out << "," << fmt(y[c]);
        out << "\n";
    }
}

void write_shells_json(const std::filesystem::path& file, const SolutionPath& sp) {
    json j;
    j["schema_version"] = schema_version;
    j["case"] = std::string(1, sp.case_label);
    j["tau"] = sp.tau ? json(*sp.tau) : json(nullptr);
    j["zero_hit"] = sp.shells.zero_hit ? json(*sp.shells.zero_hit) : json(nullptr);
    j["b1"] = sp.shells.b1;
    j["b2"] = sp.shells.b2;
    j["shell_jumps"] = sp.shells.shell_jumps;
    j["coverage_end"] = sp.shells.coverage_end;
    j["c0_used"] = sp.c0_used;
    j["zero_companion"] = sp.zero_companion;
    json entries = json::array();
    for (const auto& e : sp.shells.entries) {
        json row;
        row["lambda"] = e.lambda;
        row["tau"] = std::isnan(e.tau) ? json(nullptr) : json(e.tau);
        row["q"] = e.q;
        if (e.q_hat != std::numeric_limits<int>::min()) row["q_hat"] = e.q_hat;
        entries.push_back(row);
    }
    j["entries"] = entries;
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

void write_inc1_csv(const std::filesystem::path& file, const Inc1& f) {
    auto out = open_out(file);
    out << "t";
    for (int c = 0; c < f.dim(); ++c) out << ",v" << (c + 1);
    out << "\n";
    for (std::size_t i = 0; i < f.points(); ++i) {
        out << fmt(f.grid()[i]);
        for (double v : f.value(i)) out << "," << fmt(v);
        out << "\n";
    }
}

void write_inc2_csv(const std::filesystem::path& file, const Inc2Grid& h) {
    auto out = open_out(file);
    out << "s,t";
    for (int c = 0; c < h.comp_dim(); ++c) out << ",v" << (c + 1);
    out << "\n";
    const std::size_t n = h.grid().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            out << fmt(h.grid()[i]) << "," << fmt(h.grid()[j]);
            for (double v : h.at(i, j)) out << "," << fmt(v);
            out << "\n";
        }
}

void write_inc2_header_json(const std::filesystem::path& file, const Inc2Grid& h) {
    json j;
    j["schema_version"] = schema_version;
    j["points"] = h.grid().size();
    j["horizon"] = h.grid().horizon();
    j["comp_dim"] = h.comp_dim();
    j["layout"] = "long: s,t,value components";
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

PowerCoefficient coefficient_from_json(const std::string& text) {
    json j = json::parse(text);
    PowerCoefficient pc;
    pc.kappa = j.at("kappa").get<double>();
    pc.c1 = j.value("c1", 1.0);
    if (j.contains("c2") && !j["c2"].is_null()) pc.c2 = j["c2"].get<double>();
    else pc.c2 = std::numeric_limits<double>::infinity();
    if (j.contains("directions")) {
        pc.directions.clear();
        for (const auto& row : j["directions"])
            pc.directions.push_back(row.get<std::vector<double>>());
    }
    const std::string sm = j.value("smoothing", std::string("none"));
    if (sm == "none") pc.smoothing = CapSmoothing::none;
    else if (sm == "mollified") pc.smoothing = CapSmoothing::mollified;
    else throw std::invalid_argument("coefficient: unknown smoothing: " + sm);
    pc.moll_rel_width = j.value("moll_rel_width", 1e-3);
    pc.validate();
    return pc;
}

PowerCoefficient coefficient_from_json_file(const std::filesystem::path& file) {
    std::stringstream ss;
    ss << open_in(file).rdbuf();
    return coefficient_from_json(ss.str());
}

std::string coefficient_to_json(const PowerCoefficient& pc) {
    json j;
    j["kappa"] = pc.kappa;
    j["c1"] = pc.c1;
    j["c2"] = pc.capped() ? json(pc.c2) : json(nullptr);
    j["directions"] = pc.directions;
    j["smoothing"] = pc.smoothing == CapSmoothing::none ? "none" : "mollified";
    j["moll_rel_width"] = pc.moll_rel_width;
    return j.dump(2);
}

void write_sewing_json(const std::filesystem::path& file, const SewingResult& sr) {
    json j;
    j["schema_version"] = schema_version;
    j["mu"] = sr.mu;
    j["bound_constant"] = sr.bound_constant;
    j["norm_h"] = sr.norm_h;
    j["norm_lambda"] = sr.norm_lambda;
    j["bound_satisfied"] = sr.bound_satisfied();
    auto out = open_out(file);
    out << j.dump(2) << "\n";
}

void write_regularity_report(const std::filesystem::path& dir, const RegularityReport& rep,
                             const std::string& stem) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / (stem + ".csv"));
        out << "k,q,window_lo,window_hi,points,n_y,n_R,n_r,n_r_levy,n_r_rem\n";
        for (const auto& r : rep.records) {
            out << r.k << "," << r.q << "," << fmt(r.window_lo) << "," << fmt(r.window_hi) << ","
                << r.points << "," << fmt(r.n_y) << "," << fmt(r.n_R) << "," << fmt(r.n_r) << ","
                << fmt(r.n_r_levy) << "," << fmt(r.n_r_rem) << "\n";
        }
    }
    json j;
    j["schema_version"] = schema_version;
    auto fit = [](const OlsFit& f) {
        return json{{"slope", f.slope}, {"intercept", f.intercept},
                    {"stderr", f.slope_stderr}, {"n", f.n}};
    };
    j["y"] = fit(rep.y_fit);
    j["y"]["target"] = rep.target_y;
    j["R"] = fit(rep.R_fit);
    j["R"]["target"] = rep.target_R;
    j["r"] = fit(rep.r_fit);
    j["r"]["target"] = rep.target_r;
    j["eps1"] = rep.eps1;
    j["eps2"] = rep.eps2;
    j["fitted_constants"] = {{"c1", rep.fitted_c1}, {"c2", rep.fitted_c2}, {"c3", rep.fitted_c3}};
    auto out = open_out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
}

void write_gap_report(const std::filesystem::path& dir, const GapReport& rep, double band_tol,
                      const std::string& stem) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / (stem + ".csv"));
        out << "q,gap\n";
        for (std::size_t i = 0; i < rep.gaps.size(); ++i)
            out << rep.qs[i] << "," << fmt(rep.gaps[i]) << "\n";
    }
    json j;
    j["schema_version"] = schema_version;
    j["slope"] = rep.fit.slope;
    j["stderr"] = rep.fit.slope_stderr;
    j["alpha"] = rep.alpha;
    j["eps2"] = rep.eps2;
    j["band"] = {rep.band_lo(band_tol), rep.band_hi(band_tol)};
    j["in_band"] = rep.in_band(band_tol);
    auto out = open_out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
}

void write_ito_study(const std::filesystem::path& dir, const ItoStudy& study,
                     const std::string& stem) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / (stem + ".csv"));
        out << "field,depth,sup_residual\n";
        for (const auto& r : study.rows)
            out << r.field << "," << r.depth << "," << fmt(r.sup_residual) << "\n";
    }
    json j;
    j["schema_version"] = schema_version;
    json orders = json::array();
    for (const auto& [name, fit] : study.orders)
        orders.push_back({{"field", name}, {"order", fit.slope}, {"stderr", fit.slope_stderr}});
    j["orders"] = orders;
    auto out = open_out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
}

void write_convergence_report(const std::filesystem::path& dir, const ConvergenceReport& rep,
                              const std::string& stem) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_out(dir / (stem + ".csv"));
        out << "level,error\n";
        for (std::size_t i = 0; i < rep.levels.size(); ++i)
            out << rep.levels[i] << "," << fmt(rep.errors[i]) << "\n";
    }
    json j;
    j["schema_version"] = schema_version;
    j["order"] = rep.order.slope;
    j["stderr"] = rep.order.slope_stderr;
    auto out = open_out(dir / (stem + ".json"));
    out << j.dump(2) << "\n";
}

} // namespace rough::io
