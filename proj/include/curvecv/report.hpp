#ifndef CURVECV_REPORT_HPP
#define CURVECV_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "curvecv/runner.hpp"

namespace curvecv {

// One CSV row of a rendered curve. Values are already report-rounded
// (4 decimals, half-even), which is what makes CSV -> SVG re-rendering
// byte-identical.
struct CurveRow {
    std::size_t size = 0;
    std::string arm;
    double mean = 0.0, min = 0.0, max = 0.0;

    bool operator==(const CurveRow&) const = default;
};

std::vector<CurveRow> rows_from_summary(const CurveSummary& summary);

// Frozen format: header "size,arm,mean,min,max", one row per (size, arm),
// values at 4 decimals.
void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurveRow>& rows);
std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path);

// Mean lines (solid = plain, dashed = warm) over min-max shaded bands,
// log-scaled x. Pure function of (rows, title): identical inputs render
// identical bytes.
std::string render_curve_svg(const std::vector<CurveRow>& rows,
                             const std::string& title);

struct CurveArtifact {
    std::string task_id;
    std::filesystem::path csv_path;
    std::filesystem::path svg_path;
};

// Writes <task>_curve.csv and <task>_curve.svg from one summary snapshot.
CurveArtifact emit_curve_artifact(const CurveSummary& summary,
                                  const std::filesystem::path& out_dir);

} // namespace curvecv

#endif
