#pragma once

#include "rough/analysis.hpp"
#include "rough/coefficients.hpp"
#include "rough/rough_path.hpp"
#include "rough/sewing.hpp"
#include "rough/solver.hpp"

#include <filesystem>
#include <string>

namespace rough::io {

inline constexpr int schema_version = 1;

/// Formats a double so that binary64 round-trips exactly.
std::string fmt(double v);

struct PathMeta {
    double H = 0.0;
    std::uint64_t seed = 0;
    double gamma = 0.0;
    int refine_factor = 0;
    int dim = 1;
    std::size_t n = 0;
    double horizon = 1.0;
    std::string driver = "fbm";
};

/// path.csv (t, x1..xd), area.csv (i, j, row-major block; consecutive rows
/// plus (i, i+2) redundancy rows so corruption is detectable), meta.json.
void write_rough_path(const std::filesystem::path& dir, const RoughPath& rp,
                      const PathMeta& meta);

struct LoadedRoughPath {
    RoughPath rp;
    PathMeta meta;
    double redundant_chen_residual = 0.0; ///< worst defect of the (i,i+2) rows
};

LoadedRoughPath load_rough_path(const std::filesystem::path& dir);

void write_solution(const std::filesystem::path& dir, const SolutionPath& sp,
                    const std::string& stem = "solution");
void write_shells_json(const std::filesystem::path& file, const SolutionPath& sp);

void write_inc1_csv(const std::filesystem::path& file, const Inc1& f);
/// Long format: s, t, value components.
void write_inc2_csv(const std::filesystem::path& file, const Inc2Grid& h);
void write_inc2_header_json(const std::filesystem::path& file, const Inc2Grid& h);

PowerCoefficient coefficient_from_json(const std::string& text);
PowerCoefficient coefficient_from_json_file(const std::filesystem::path& file);
std::string coefficient_to_json(const PowerCoefficient& pc);

void write_sewing_json(const std::filesystem::path& file, const SewingResult& sr);

void write_regularity_report(const std::filesystem::path& dir, const RegularityReport& rep,
                             const std::string& stem = "scaling");
void write_gap_report(const std::filesystem::path& dir, const GapReport& rep,
                      double band_tol, const std::string& stem = "gaps");
void write_ito_study(const std::filesystem::path& dir, const ItoStudy& study,
                     const std::string& stem = "ito_strat");
void write_convergence_report(const std::filesystem::path& dir, const ConvergenceReport& rep,
                              const std::string& stem = "convergence");

} // namespace rough::io
