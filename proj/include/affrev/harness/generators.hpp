#pragma once

#include "affrev/harness/io.hpp"
#include "affrev/shapes.hpp"

namespace affrev::harness {

// Generator descriptors (JSON objects keyed by "type"):
//   {"type":"ball","dim":n}
//   {"type":"ellipsoid","dim":n,"condition":c} or {"type":"ellipsoid","shape":Q[,"center":c]}
//   {"type":"cube","dim":n} | {"type":"cross-polytope","dim":n}
//   {"type":"random-symmetric-polytope","dim":n,"points":m}
//   {"type":"revolution","dim":n,"profile":P[,"axis":a]} with P a list of [t, r]
//     levels, "random", "random-asymmetric", or {"smooth":p,"scale":s,"levels":k}
//   {"type":"affine-image","inner":D[,"matrix":A | "condition":c][,"translation":t]}
// Random parts draw from seeds derived from the given one.

namespace detail {

[[noreturn]] inline void invalid(const std::string& field, const std::string& why) {
    throw IoError("invalid descriptor: field '" + field + "' " + why);
}

inline Eigen::Index dim_field(const Json& d) {
    if (!d.contains("dim")) invalid("dim", "is required");
    if (!d["dim"].is_number_integer()) invalid("dim", "must be an integer");
    const auto n = d["dim"].get<Eigen::Index>();
    if (n < 1 || n > 12) invalid("dim", "must be in [1, 12]");
    return n;
}

inline double number_field(const Json& d, const std::string& key, double fallback) {
    if (!d.contains(key)) return fallback;
    if (!d[key].is_number() || !std::isfinite(d[key].get<double>())) invalid(key, "must be a finite number");
    return d[key].get<double>();
}

inline std::vector<shapes::ProfileLevel> profile_field(const Json& p, Rng& rng) {
    if (p.is_string()) {
        if (p == "random") return shapes::random_concave_profile(rng, 2);
        if (p == "random-asymmetric") return shapes::random_asymmetric_profile(rng);
        invalid("profile", "must be \"random\", \"random-asymmetric\", a level list or a smooth spec");
    }
    if (p.is_object()) {
        const double exponent = number_field(p, "smooth", 2.0);
        const double scale = number_field(p, "scale", 1.0);
        const double levels = number_field(p, "levels", 48);
        if (exponent < 1.0 || scale <= 0.0 || levels < 2) invalid("profile", "smooth spec out of range");
        return shapes::smooth_profile(exponent, scale, static_cast<int>(levels));
    }
    if (!p.is_array() || p.empty()) invalid("profile", "must be a nonempty list of [t, r] levels");
    std::vector<shapes::ProfileLevel> out;
    for (const auto& level : p) {
        if (!level.is_array() || level.size() != 2 || !level[0].is_number() || !level[1].is_number())
            invalid("profile", "levels must be [t, r] pairs");
        const double t = level[0].get<double>(), r = level[1].get<double>();
        if (!std::isfinite(t) || !std::isfinite(r) || r < 0) invalid("profile", "levels must be finite with r >= 0");
        out.push_back({t, r});
    }
    return out;
}

}  // namespace detail

// A generated body and, for (affine) bodies of revolution, its axis.
struct Generated {
    ConvexBody body;
    std::optional<Line> axis;
};

inline Generated generate(const Json& d, std::uint64_t seed) {
    if (!d.is_object()) throw IoError("invalid descriptor: expected a JSON object");
    if (!d.contains("type") || !d["type"].is_string()) detail::invalid("type", "is required");
    const std::string type = d["type"];
    Rng rng(mix_seed(seed, 0));
    try {
        if (type == "ball") return {shapes::unit_ball(detail::dim_field(d)), std::nullopt};
        if (type == "cube") return {shapes::cube(detail::dim_field(d), detail::number_field(d, "half", 1.0)), std::nullopt};
        if (type == "cross-polytope") return {shapes::cross_polytope(detail::dim_field(d)), std::nullopt};
        if (type == "random-symmetric-polytope") {
            const double m = detail::number_field(d, "points", 20);
            if (m < 2) detail::invalid("points", "must be at least 2");
            return {shapes::random_symmetric_polytope(detail::dim_field(d), static_cast<Eigen::Index>(m), rng), std::nullopt};
        }
        if (type == "ellipsoid") {
            Vector center;
            if (d.contains("center")) center = vector_from_json(d["center"], "center");
            if (d.contains("shape")) {
                const Matrix q = matrix_from_json(d["shape"], "shape");
                if (center.size() == 0) center = Vector::Zero(q.rows());
                return {ConvexBody::ellipsoid(Ellipsoid(center, q)), std::nullopt};
            }
            const auto n = detail::dim_field(d);
            const double cond = detail::number_field(d, "condition", 10.0);
            if (cond < 1.0) detail::invalid("condition", "must be >= 1");
            if (center.size() == 0) center = Vector::Zero(n);
            if (center.size() != n) detail::invalid("center", "has the wrong dimension");
            return {ConvexBody::ellipsoid(Ellipsoid::from_axes(center, random_conditioned_matrix(n, cond, rng))), std::nullopt};
        }
        if (type == "revolution") {
            const auto n = detail::dim_field(d);
            if (n < 2) detail::invalid("dim", "must be at least 2");
            Vector axis = Vector::Unit(n, n - 1);
            if (d.contains("axis")) axis = vector_from_json(d["axis"], "axis");
            if (axis.size() != n || axis.norm() < 1e-12) detail::invalid("axis", "must be a nonzero vector of length dim");
            if (!d.contains("profile")) detail::invalid("profile", "is required");
            return {shapes::revolution_body(detail::profile_field(d["profile"], rng), axis), Line(axis)};
        }
        if (type == "affine-image") {
            if (!d.contains("inner")) detail::invalid("inner", "is required");
            const Generated inner = generate(d["inner"], mix_seed(seed, 1));
            const auto n = inner.body.dim();
            Matrix a;
            if (d.contains("matrix")) {
                a = matrix_from_json(d["matrix"], "matrix");
                if (a.rows() != n || a.cols() != n) detail::invalid("matrix", "must be dim x dim");
                if (!(std::abs(a.determinant()) > 1e-12)) detail::invalid("matrix", "must be invertible");
            } else {
                const double cond = detail::number_field(d, "condition", 10.0);
                if (cond < 1.0) detail::invalid("condition", "must be >= 1");
                a = random_conditioned_matrix(n, cond, rng);
            }
            Vector t = Vector::Zero(n);
            if (d.contains("translation")) t = vector_from_json(d["translation"], "translation");
            if (t.size() != n) detail::invalid("translation", "has the wrong dimension");
            std::optional<Line> axis;
            if (inner.axis) axis = AffineMap(a, t).map_line(*inner.axis);
            return {map_body(inner.body, a, t), axis};
        }
    } catch (const GeometryError& e) {
        throw IoError(std::string("invalid descriptor: ") + e.what());
    }
    detail::invalid("type", "is unknown: '" + type + "'");
}

inline ConvexBody gen_body(const Json& d, std::uint64_t seed) { return generate(d, seed).body; }

}  // namespace affrev::harness
