#pragma once

#include "affrev/harness/io.hpp"

namespace affrev::harness {

struct ShadowRecord {
    Vector direction;  // u
    Matrix basis;      // orthonormal basis of u^perp; shadow coordinates
    MveeResult field;  // F(u), in shadow coordinates
    AffineMap beta;    // shadow coordinates -> canonical frame
    ConvexBody canonical;
    std::string digest;
    double ellipsoid_residual = 0.0;
    // "axis", "degenerate" (near-tied axes), "elliptical" (every line is an
    // axis; not searched) or "none" (no axis within tolerance).
    std::string axis_status;
    double axis_residual = 0.0;
    std::optional<Line> axis;      // L_u, ambient coordinates
    std::optional<Vector> normal;  // N_u = H_u^perp ∩ u^perp, ambient
};

struct ScanOptions {
    Eigen::Index count = 8;          // number of directions when none are given
    std::vector<Vector> directions;  // explicit directions override count
    std::uint64_t seed = 0;
    double tol = 1e-3;            // axis acceptance
    double ellipse_tol = 1e-6;    // shadows with is_ellipsoid residual below are elliptical
    EquivalenceOptions equivalence{};
    RevolutionOptions revolution{};
};

struct ScanReport {
    std::string body_id;
    std::vector<ShadowRecord> shadows;
    Matrix pairwise;  // linear_equivalent residuals between canonical shadows
};

namespace detail {

// FNV-1a over the canonical support values (rounded to 1e-6) on fixed directions.
inline std::string support_digest(const ConvexBody& body) {
    const Vector h = body.support_many(sample_directions(body.dim(), 64, 0));
    std::uint64_t hash = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        const auto q = static_cast<std::int64_t>(std::llround(h[i] * 1e6));
        for (int b = 0; b < 8; ++b) {
            hash ^= static_cast<std::uint64_t>(q >> (8 * b)) & 0xffU;
            hash *= 1099511628211ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace detail

// The projection field of B: for each direction u the shadow on u^perp, its
// minimal ellipsoid F(u), the normalizer beta_u, the canonical shadow and
// its axis data, plus pairwise linear-equivalence residuals.
inline ScanReport scan_projection_field(const ConvexBody& body, const ScanOptions& opt = {},
                                        const std::string& body_id = "body") {
    const auto n = body.dim();
    if (n < 3) throw GeometryError("scan needs dimension >= 3");
    std::vector<Vector> dirs = opt.directions;
    if (dirs.empty()) {
        if (opt.count < 2) throw GeometryError("scan needs at least 2 directions");
        const Matrix grid = projective_grid(n, opt.count, opt.seed);
        for (Eigen::Index i = 0; i < grid.cols(); ++i) dirs.push_back(grid.col(i));
    }
    ScanReport report;
    report.body_id = body_id;
    const bool centered = body.symmetric();
    for (const Vector& raw : dirs) {
        if (raw.size() != n || raw.norm() < 1e-12) throw GeometryError("scan direction has the wrong dimension");
        const Vector u = raw.normalized();
        const Matrix basis = complement_of_vector(u);
        ConvexBody shadow = project_along(body, u);
        const Canonical c = canonicalize(shadow, opt.equivalence.eps, centered);
        ShadowRecord rec{u, basis, c.fit, c.map, c.body, detail::support_digest(c.body), 0.0, "none", 0.0, {}, {}};
        rec.ellipsoid_residual = is_ellipsoid(shadow, {.tol = opt.ellipse_tol}).residual;
        if (rec.ellipsoid_residual <= opt.ellipse_tol) {
            rec.axis_status = "elliptical";
        } else {
            const RevolutionCertificate cert = search_affine_revolution_axis(shadow, opt.revolution);
            rec.axis_residual = cert.residual;
            if (cert.residual > opt.tol) {
                rec.axis_status = "none";
            } else if (cert.degenerate) {
                rec.axis_status = "degenerate";
            } else {
                rec.axis_status = "axis";
                rec.axis = Line(basis * cert.axis.direction(), basis * cert.axis.base_point());
                const Matrix normal = complement_basis(cert.hyperplane.basis());
                rec.normal = canonical_sign(Vector(basis * normal.col(0)));
            }
        }
        report.shadows.push_back(std::move(rec));
    }
    const auto m = static_cast<Eigen::Index>(report.shadows.size());
    report.pairwise = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const auto& a = report.shadows[static_cast<std::size_t>(i)].canonical;
            const auto& b = report.shadows[static_cast<std::size_t>(j)].canonical;
            report.pairwise(i, j) = report.pairwise(j, i) = linear_equivalent(a, b, opt.equivalence).residual;
        }
    return report;
}

inline Json to_json(const ScanReport& r, const ScanOptions& opt) {
    Json shadows = Json::array();
    Json directions = Json::array();
    double max_ellipse = 0.0;
    int with_axis = 0;
    for (const auto& s : r.shadows) {
        max_ellipse = std::max(max_ellipse, s.ellipsoid_residual);
        if (s.axis) ++with_axis;
        directions.push_back(to_json(s.direction));
        shadows.push_back({{"direction", to_json(s.direction)},
                           {"field", to_json(s.field.ellipsoid)},
                           {"field_dual_gap", s.field.dual_gap},
                           {"beta", to_json(s.beta)},
                           {"canonical_shadow_digest", s.digest},
                           {"ellipsoid_residual", s.ellipsoid_residual},
                           {"axis_status", s.axis_status},
                           {"axis_residual", s.axis_residual},
                           {"axis", s.axis ? to_json(*s.axis) : Json(nullptr)},
                           {"normal", s.normal ? to_json(*s.normal) : Json(nullptr)}});
    }
    double max_pair = 0.0;
    double min_pair = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < r.pairwise.rows(); ++i)
        for (Eigen::Index j = i + 1; j < r.pairwise.cols(); ++j) {
            max_pair = std::max(max_pair, r.pairwise(i, j));
            min_pair = std::min(min_pair, r.pairwise(i, j));
        }
    if (!std::isfinite(min_pair)) min_pair = 0.0;
    return {{"schema", "affrev-scan/1"},
            {"body_id", r.body_id},
            {"directions", directions},
            {"shadows", shadows},
            {"pairwise_residual_matrix", to_json(r.pairwise)},
            {"tolerances",
             {{"axis", opt.tol}, {"ellipse", opt.ellipse_tol}, {"equivalence", opt.equivalence.tol}}},
            {"summary",
             {{"shadows", r.shadows.size()},
              {"max_ellipsoid_residual", max_ellipse},
              {"max_pairwise_residual", max_pair},
              {"min_pairwise_residual", min_pair},
              {"shadows_with_axis", with_axis},
              {"all_shadows_elliptical", max_ellipse <= opt.ellipse_tol},
              {"all_shadows_equivalent", max_pair <= opt.equivalence.tol}}}};
}

}  // namespace affrev::harness
