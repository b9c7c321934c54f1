#include "curvecv/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "curvecv/error.hpp"
#include "curvecv/metrics.hpp"
#include "detail.hpp"

namespace curvecv {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

std::vector<CurveRow> rows_from_summary(const CurveSummary& summary) {
    std::vector<CurveRow> rows;
    rows.reserve(summary.cells.size());
    for (const auto& cell : summary.cells) {
        CurveRow row;
        row.size = cell.size;
        row.arm = arm_name(cell.arm);
        row.mean = round_score(cell.mean);
        row.min = round_score(cell.min);
        row.max = round_score(cell.max);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_curve_csv(const std::filesystem::path& path,
                     const std::vector<CurveRow>& rows) {
    std::string body = "size,arm,mean,min,max\n";
    for (const auto& r : rows) {
        body += std::to_string(r.size) + "," + r.arm + "," + format_score(r.mean) + "," +
                format_score(r.min) + "," + format_score(r.max) + "\n";
    }
    detail::write_file(path, body);
}

std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    detail::chomp_cr(line);
    if (line != "size,arm,mean,min,max") {
        throw ParseError(path.string() + ": expected header 'size,arm,mean,min,max', got '" +
                         line + "'");
    }

    std::vector<CurveRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        detail::chomp_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split(line, ',');
        if (fields.size() != 5) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 5 columns, got " + std::to_string(fields.size()));
        }
        CurveRow row;
        try {
            row.size = static_cast<std::size_t>(std::stoull(fields[0]));
            row.arm = fields[1];
            row.mean = std::stod(fields[2]);
            row.min = std::stod(fields[3]);
            row.max = std::stod(fields[4]);
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed row '" + line + "'");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 64.0, kRight = 24.0, kTop = 40.0, kBottom = 48.0;

struct ArmStyle {
    const char* stroke;
    const char* fill;
    const char* dash;  // empty = solid
};

ArmStyle style_for(const std::string& arm) {
    if (arm == "warm") return {"#d95f02", "#d95f02", "6,4"};
    return {"#1f77b4", "#1f77b4", ""};
}

} // namespace

std::string render_curve_svg(const std::vector<CurveRow>& rows, const std::string& title) {
    if (rows.empty()) throw ValidationError("render_curve_svg: no rows");

    double min_size = static_cast<double>(rows.front().size);
    double max_size = min_size;
    for (const auto& r : rows) {
        min_size = std::min(min_size, static_cast<double>(r.size));
        max_size = std::max(max_size, static_cast<double>(r.size));
    }
    const double lo = std::log10(min_size);
    const double hi = std::log10(max_size);
    const double span = (hi > lo) ? (hi - lo) : 1.0;

    auto x_of = [&](std::size_t size) {
        double t = (std::log10(static_cast<double>(size)) - lo) / span;
        return kLeft + t * (kWidth - kLeft - kRight);
    };
    auto y_of = [&](double value) {
        return kTop + (1.0 - value) * (kHeight - kTop - kBottom);
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + fixed(kWidth / 2, 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + "</text>\n";

    // y gridlines every 0.2
    for (int i = 0; i <= 5; ++i) {
        double v = i / 5.0;
        std::string y = fixed(y_of(v), 2);
        svg += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + y + "\" x2=\"" +
               fixed(kWidth - kRight, 2) + "\" y2=\"" + y +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fixed(kLeft - 8, 2) + "\" y=\"" + y +
               "\" text-anchor=\"end\" dominant-baseline=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"11\">" + fixed(v, 1) + "</text>\n";
    }

    // x ticks at each distinct size
    std::set<std::size_t> sizes;
    for (const auto& r : rows) sizes.insert(r.size);
    for (std::size_t size : sizes) {
        std::string x = fixed(x_of(size), 2);
        svg += "<line x1=\"" + x + "\" y1=\"" + fixed(kHeight - kBottom, 2) + "\" x2=\"" + x +
               "\" y2=\"" + fixed(kHeight - kBottom + 5, 2) +
               "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + fixed(kHeight - kBottom + 18, 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
               std::to_string(size) + "</text>\n";
    }
    svg += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + fixed(kHeight - kBottom, 2) +
           "\" x2=\"" + fixed(kWidth - kRight, 2) + "\" y2=\"" + fixed(kHeight - kBottom, 2) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + fixed(kTop, 2) + "\" x2=\"" +
           fixed(kLeft, 2) + "\" y2=\"" + fixed(kHeight - kBottom, 2) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // arms in fixed order: plain, then warm
    std::vector<std::string> arms;
    for (const auto& r : rows) {
        if (std::find(arms.begin(), arms.end(), r.arm) == arms.end()) arms.push_back(r.arm);
    }
    std::sort(arms.begin(), arms.end());

    double legend_y = kTop + 8;
    for (const auto& arm : arms) {
        std::vector<CurveRow> series;
        for (const auto& r : rows) {
            if (r.arm == arm) series.push_back(r);
        }
        std::sort(series.begin(), series.end(),
                  [](const CurveRow& a, const CurveRow& b) { return a.size < b.size; });
        ArmStyle style = style_for(arm);

        // min-max band
        std::string points;
        for (const auto& r : series) {
            points += fixed(x_of(r.size), 2) + "," + fixed(y_of(r.max), 2) + " ";
        }
        for (auto it = series.rbegin(); it != series.rend(); ++it) {
            points += fixed(x_of(it->size), 2) + "," + fixed(y_of(it->min), 2) + " ";
        }
        if (!points.empty()) points.pop_back();
        svg += "<polygon points=\"" + points + "\" fill=\"" + style.fill +
               "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";

        // mean line
        std::string line_points;
        for (const auto& r : series) {
            line_points += fixed(x_of(r.size), 2) + "," + fixed(y_of(r.mean), 2) + " ";
        }
        if (!line_points.empty()) line_points.pop_back();
        svg += "<polyline points=\"" + line_points + "\" fill=\"none\" stroke=\"" +
               std::string(style.stroke) + "\" stroke-width=\"2\"";
        if (style.dash[0] != '\0') {
            svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
        }
        svg += "/>\n";

        // legend entry
        svg += "<line x1=\"" + fixed(kLeft + 12, 2) + "\" y1=\"" + fixed(legend_y, 2) +
               "\" x2=\"" + fixed(kLeft + 44, 2) + "\" y2=\"" + fixed(legend_y, 2) +
               "\" stroke=\"" + std::string(style.stroke) + "\" stroke-width=\"2\"";
        if (style.dash[0] != '\0') {
            svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
        }
        svg += "/>\n";
        svg += "<text x=\"" + fixed(kLeft + 50, 2) + "\" y=\"" + fixed(legend_y + 4, 2) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + arm + "</text>\n";
        legend_y += 18;
    }

    svg += "</svg>\n";
    return svg;
}

CurveArtifact emit_curve_artifact(const CurveSummary& summary,
                                  const std::filesystem::path& out_dir) {
    if (summary.cells.empty()) throw ValidationError("emit_curve_artifact: empty summary");
    auto rows = rows_from_summary(summary);

    CurveArtifact artifact;
    artifact.task_id = summary.task_id;
    artifact.csv_path = out_dir / (summary.task_id + "_curve.csv");
    artifact.svg_path = out_dir / (summary.task_id + "_curve.svg");

    write_curve_csv(artifact.csv_path, rows);
    // Title carries the task id alone so a re-render from the CSV (whose
    // name encodes the task) reproduces the SVG byte-for-byte.
    detail::write_file(artifact.svg_path, render_curve_svg(rows, summary.task_id));
    return artifact;
}

} // namespace curvecv
