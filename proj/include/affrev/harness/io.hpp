#pragma once

#include "affrev/equivalence.hpp"
#include "affrev/revolution.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace affrev::harness {

using Json = nlohmann::json;

// Malformed input, unwritable output and the like: exit code 2 in the CLI.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------- writer

inline std::string format_double(double x) {
    if (!std::isfinite(x)) throw IoError("non-finite value in report");
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) {
    os << Json(s).dump();
}

inline void write_json(std::ostream& os, const Json& j, int indent, int depth) {
    const auto pad = [&](int d) {
        if (indent > 0) os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys sorted
                if (!first) os << ',';
                first = false;
                pad(depth + 1);
                write_string(os, it.key());
                os << (indent > 0 ? ": " : ":");
                write_json(os, it.value(), indent, depth + 1);
            }
            pad(depth);
            os << '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // Numeric rows stay on one line.
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number(); });
            os << '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) os << (flat && indent > 0 ? ", " : ",");
                if (!flat) pad(depth + 1);
                write_json(os, j[i], indent, depth + 1);
            }
            if (!flat) pad(depth);
            os << ']';
            return;
        }
        case Json::value_t::number_float: os << format_double(j.get<double>()); return;
        default: os << j.dump(); return;
    }
}

}  // namespace detail

// Sorted keys, %.17g floats, two-space indentation, trailing newline.
inline std::string to_text(const Json& j, int indent = 2) {
    std::ostringstream os;
    detail::write_json(os, j, indent, 0);
    os << '\n';
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("cannot write " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline Json parse_json(const std::string& text, const std::string& what) {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw IoError(what + ": malformed JSON (" + e.what() + ")");
    }
}

// ------------------------------------------------------ value conversions

inline Json to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

// Row-major nested arrays.
inline Json to_json(const Matrix& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
    return a;
}

// Columns as a list of points.
inline Json columns_to_json(const Matrix& m) { return to_json(Matrix(m.transpose())); }

inline double finite_number(const Json& j, const std::string& field) {
    if (!j.is_number()) throw IoError("field '" + field + "' must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw IoError("field '" + field + "' is not finite");
    return x;
}

inline Vector vector_from_json(const Json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw IoError("field '" + field + "' must be a nonempty array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = finite_number(j[i], field);
    return v;
}

inline Matrix matrix_from_json(const Json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw IoError("field '" + field + "' must be a nonempty array of rows");
    const Vector first = vector_from_json(j[0], field);
    Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from_json(j[r], field);
        if (row.size() != first.size()) throw IoError("field '" + field + "' has ragged rows");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

inline Matrix columns_from_json(const Json& j, const std::string& field) {
    return Matrix(matrix_from_json(j, field).transpose());
}

inline const Json& require(const Json& j, const std::string& key) {
    if (!j.is_object() || !j.contains(key)) throw IoError("missing field '" + key + "'");
    return j.at(key);
}

inline Json to_json(const Ellipsoid& e) { return {{"center", to_json(e.center())}, {"shape", to_json(e.shape())}}; }

inline Json to_json(const AffineMap& f) {
    return {{"matrix", to_json(f.matrix())}, {"translation", to_json(f.translation())}};
}

inline Json to_json(const Line& l) {
    return {{"direction", to_json(l.direction())}, {"point", to_json(l.base_point())}};
}

inline Json to_json(const ConvexBody& body) {
    Json j{{"dim", body.dim()}, {"symmetric", body.symmetric()}, {"kind", std::string(kind_name(body.kind()))}};
    if (const auto* pc = body.as<PointCloud>()) j["points"] = columns_to_json(pc->points);
    if (const auto* s = body.as<SupportSample>()) {
        j["directions"] = columns_to_json(s->directions);
        j["values"] = to_json(s->values);
    }
    if (const auto* e = body.as<Ellipsoid>()) j["ellipsoid"] = to_json(*e);
    if (const auto* h = body.as<EllipsoidHull>()) {
        Json pieces = Json::array();
        for (const auto& p : h->pieces) pieces.push_back({{"center", to_json(p.center)}, {"axes", columns_to_json(p.axes)}});
        j["pieces"] = pieces;
        j["points"] = columns_to_json(h->points);
    }
    return j;
}

// Inverse of to_json(ConvexBody); every field is validated.
inline ConvexBody body_from_json(const Json& j) {
    const std::string kind = require(j, "kind").get<std::string>();
    const bool symmetric = j.value("symmetric", false);
    try {
        if (kind == "point-cloud") return ConvexBody::point_cloud(columns_from_json(require(j, "points"), "points"), symmetric);
        if (kind == "support-sample")
            return ConvexBody::support_sample(columns_from_json(require(j, "directions"), "directions"),
                                              vector_from_json(require(j, "values"), "values"), symmetric);
        if (kind == "ellipsoid") {
            const Json& e = require(j, "ellipsoid");
            return ConvexBody::ellipsoid(Ellipsoid(vector_from_json(require(e, "center"), "center"),
                                                   matrix_from_json(require(e, "shape"), "shape")),
                                         symmetric);
        }
        if (kind == "ellipsoid-hull") {
            const auto n = require(j, "dim").get<Eigen::Index>();
            std::vector<EllipsoidPiece> pieces;
            for (const auto& p : require(j, "pieces")) {
                const Vector c = vector_from_json(require(p, "center"), "center");
                const Json& axes = require(p, "axes");
                pieces.push_back({c, axes.empty() ? Matrix(n, 0) : columns_from_json(axes, "axes")});
            }
            const Json& pts = require(j, "points");
            return ConvexBody::ellipsoid_hull(std::move(pieces), pts.empty() ? Matrix(n, 0) : columns_from_json(pts, "points"),
                                              symmetric);
        }
    } catch (const Json::exception& e) {
        throw IoError(std::string("malformed body: ") + e.what());
    }
    throw IoError("unknown body kind '" + kind + "'");
}

inline ConvexBody read_body(const std::string& path) { return body_from_json(parse_json(read_text(path), path)); }

inline Json to_json(const MveeResult& r) {
    return {{"ellipsoid", to_json(r.ellipsoid)},
            {"dual_gap", r.dual_gap},
            {"iterations", r.iterations},
            {"condition", r.condition},
            {"ill_conditioned", r.ill_conditioned}};
}

inline Json to_json(const EquivalenceVerdict& v) {
    return {{"equivalent", v.equivalent},
            {"residual", v.residual},
            {"witness", to_json(v.witness)},
            {"restarts_used", v.restarts_used}};
}

inline Json to_json(const RevolutionCertificate& c) {
    return {{"axis", to_json(c.axis.direction())},
            {"axis_point", to_json(c.axis.base_point())},
            {"residual", c.residual},
            {"second_best", c.second_best},
            {"degenerate", c.degenerate},
            {"hyperplane_basis", columns_to_json(c.hyperplane.basis())}};
}

}  // namespace affrev::harness
