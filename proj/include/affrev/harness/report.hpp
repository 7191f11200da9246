#pragma once

#include "affrev/harness/verify.hpp"

#include <set>

namespace affrev::harness {

namespace detail {

inline void require_finite(const Json& j, const std::string& path) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) throw IoError("non-finite value at " + path);
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it) require_finite(it.value(), path + "." + it.key());
    if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "[" + std::to_string(i) + "]");
}

inline std::string csv_field(const Json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (v.is_null()) return "";
    return v.dump();
}

}  // namespace detail

// Validates a scan or verify report read back from disk.
inline const Json& check_report(const Json& j) {
    if (!j.is_object() || !j.contains("schema")) throw IoError("not a report: missing field 'schema'");
    detail::require_finite(j, "$");
    const std::string schema = j["schema"].get<std::string>();
    if (schema == "affrev-verify/1") {
        if (!require(j, "records").is_array() || j["records"].empty()) throw IoError("nothing to report");
    } else if (schema == "affrev-scan/1") {
        if (!require(j, "shadows").is_array() || j["shadows"].empty()) throw IoError("nothing to report");
    } else {
        throw IoError("unknown report schema '" + schema + "'");
    }
    return j;
}

// Verify reports: one row per trial. Scan reports: the m x m residual matrix.
inline std::string to_csv(const Json& report) {
    check_report(report);
    std::ostringstream os;
    if (report["schema"] == "affrev-scan/1") {
        for (const auto& row : require(report, "pairwise_residual_matrix")) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << detail::csv_field(row[i]);
            os << '\n';
        }
        return os.str();
    }
    std::set<std::string> keys;
    for (const auto& r : report["records"])
        for (auto it = r.at("residuals").begin(); it != r.at("residuals").end(); ++it) keys.insert(it.key());
    os << "lemma_id,trial,seed,status,resamples";
    for (const auto& k : keys) os << ',' << k;
    os << ",note\n";
    for (const auto& r : report["records"]) {
        os << detail::csv_field(r.at("lemma_id")) << ',' << r.at("trial") << ',' << r.at("seed") << ','
           << detail::csv_field(r.at("status")) << ',' << r.at("resamples");
        for (const auto& k : keys) os << ',' << (r["residuals"].contains(k) ? detail::csv_field(r["residuals"][k]) : "");
        os << ',' << detail::csv_field(r.at("note")) << '\n';
    }
    return os.str();
}

inline std::string emit_report(const Json& report, const std::string& format) {
    if (format == "json") return to_text(check_report(report));
    if (format == "csv") return to_csv(report);
    throw IoError("unknown report format '" + format + "'");
}

// Counterclockwise hull of the columns (Andrew's monotone chain).
inline Matrix convex_hull_2d(const Matrix& pts) {
    std::vector<std::pair<double, double>> p;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) p.emplace_back(pts(0, i), pts(1, i));
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) throw GeometryError("degenerate polygon");
    const auto cross = [](auto o, auto a, auto b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    Matrix out(2, static_cast<Eigen::Index>(k - 1));
    for (std::size_t i = 0; i + 1 < k; ++i) out.col(static_cast<Eigen::Index>(i)) << h[i].first, h[i].second;
    return out;
}

// Boundary polygon of a planar body: the hull of a point cloud, otherwise
// touching points for 256 equally spaced normals.
inline Matrix boundary_polygon(const ConvexBody& body) {
    if (body.dim() != 2) throw GeometryError("SVG needs a 2-D body");
    if (const auto* pc = body.as<PointCloud>()) return convex_hull_2d(pc->points);
    Matrix poly(2, 256);
    for (int i = 0; i < 256; ++i) {
        const double a = 2.0 * kPi * i / 256;
        poly.col(i) = body.touching(Vector(Eigen::Vector2d(std::cos(a), std::sin(a)))).point;
    }
    return poly;
}

// The boundary polygon and the given axes, clipped to a padded bounding box.
inline std::string emit_svg(const ConvexBody& body, const std::vector<Line>& axes = {}) {
    const Matrix poly = boundary_polygon(body);
    const Eigen::Vector2d lo = poly.rowwise().minCoeff(), hi = poly.rowwise().maxCoeff();
    const double pad = 0.1 * (hi - lo).maxCoeff();
    const Eigen::Vector2d a = lo.array() - pad, size = (hi - lo).array() + 2 * pad;
    const double scale = 400.0 / size.maxCoeff();
    const auto xy = [&](const Vector& p) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f %.4f", (p[0] - a[0]) * scale, (a[1] + size[1] - p[1]) * scale);
        std::string s = buf;
        return std::make_pair(s.substr(0, s.find(' ')), s.substr(s.find(' ') + 1));
    };
    const auto px = [&](const Vector& p) {
        const auto [x, y] = xy(p);
        return x + "," + y;
    };
    std::ostringstream os;
    char dims[96];
    std::snprintf(dims, sizeof dims, "width=\"%.4f\" height=\"%.4f\"", size[0] * scale, size[1] * scale);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" " << dims << ">\n";
    os << "<polygon fill=\"#dde6f0\" stroke=\"#1f3b5a\" stroke-width=\"1.5\" points=\"";
    for (Eigen::Index i = 0; i < poly.cols(); ++i) os << (i ? " " : "") << px(poly.col(i));
    os << "\"/>\n";
    const double reach = size.norm();
    for (const Line& l : axes) {
        if (l.ambient_dim() != 2) throw GeometryError("SVG axes must be planar");
        const Vector p = l.base_point(), d = l.direction();
        const auto [x1, y1] = xy(p - reach * d);
        const auto [x2, y2] = xy(p + reach * d);
        os << "<line stroke=\"#b03030\" stroke-dasharray=\"6 4\" x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
           << "\" y2=\"" << y2 << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace affrev::harness
