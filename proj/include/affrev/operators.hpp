#pragma once

#include "affrev/body.hpp"
#include "affrev/simplex.hpp"

namespace affrev {

// Image of K under x -> m x + t, where m is k x n of full row rank. Exact for
// every representation except support samples, which are re-sampled.
inline ConvexBody map_body(const ConvexBody& body, const Matrix& m, const Vector& t) {
    if (m.cols() != body.dim() || t.size() != m.rows()) throw GeometryError("map dimension mismatch");
    const auto k = m.rows();
    const bool symmetric = body.symmetric() && t.cwiseAbs().maxCoeff() == 0.0;
    if (const auto* pc = body.as<PointCloud>())
        return ConvexBody::trusted(k, PointCloud{(m * pc->points).colwise() + t}, symmetric);
    if (const auto* e = body.as<Ellipsoid>()) {
        Matrix cov = m * e->inverse_shape() * m.transpose();
        cov = 0.5 * (cov + cov.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
        if (!(es.eigenvalues().minCoeff() > 0)) throw GeometryError("map collapses the ellipsoid");
        Matrix shape = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
        shape = 0.5 * (shape + shape.transpose());
        return ConvexBody::trusted(k, Ellipsoid(m * e->center() + t, shape), symmetric);
    }
    if (const auto* h = body.as<EllipsoidHull>()) {
        EllipsoidHull out;
        out.pieces.reserve(h->pieces.size());
        for (const auto& p : h->pieces) out.pieces.push_back({m * p.center + t, m * p.axes});
        out.points = h->points.cols() > 0 ? Matrix((m * h->points).colwise() + t) : Matrix(k, 0);
        return ConvexBody::trusted(k, std::move(out), symmetric);
    }
    const auto& s = *body.as<SupportSample>();
    Matrix dirs = k == body.dim() ? s.directions : sample_directions(k, s.directions.cols(), 0);
    if (symmetric && k != body.dim()) {
        const auto half = (dirs.cols() + 1) / 2;
        Matrix sym(k, 2 * half);
        sym << dirs.leftCols(half), -dirs.leftCols(half);
        dirs = sym;
    }
    Vector values(dirs.cols());
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
        const Vector w = m.transpose() * dirs.col(i);
        const double norm = w.norm();
        values[i] = norm * body.support(w / norm) + t.dot(dirs.col(i));
    }
    if (symmetric && k != body.dim()) {
        const auto half = dirs.cols() / 2;
        values.tail(half) = values.head(half);
    }
    return ConvexBody::trusted(k, SupportSample{std::move(dirs), std::move(values)}, symmetric);
}

inline ConvexBody apply(const AffineMap& f, const ConvexBody& body) { return map_body(body, f.matrix(), f.translation()); }

// Orthogonal shadow of K on a linear subspace, in the subspace's basis
// coordinates.
inline ConvexBody project(const ConvexBody& body, const Subspace& s) {
    if (s.ambient_dim() != body.dim()) throw GeometryError("subspace dimension mismatch");
    if (!s.is_linear()) throw GeometryError("projection requires a linear subspace");
    if (s.dim() >= body.dim()) throw GeometryError("projection onto full space");
    return map_body(body, s.basis().transpose(), Vector::Zero(s.dim()));
}

// Shadow along a line, onto the orthogonal hyperplane (basis complement_of_vector).
inline ConvexBody project_along(const ConvexBody& body, const Vector& direction) {
    return project(body, Subspace(complement_of_vector(direction), Vector::Zero(body.dim())));
}

// Image under the linear projector onto the hyperplane H with kernel ell,
// expressed in H's basis coordinates. This is the section of the cylinder
// K + ell by H.
inline ConvexBody oblique_project(const ConvexBody& body, const Line& ell, const Subspace& h) {
    if (h.ambient_dim() != body.dim() || ell.ambient_dim() != body.dim()) throw GeometryError("dimension mismatch");
    if (!h.is_linear() || !h.is_hyperplane()) throw GeometryError("oblique projection requires a linear hyperplane");
    const Vector normal = h.normal();
    const Vector& d = ell.direction();
    const double denom = normal.dot(d);
    if (std::abs(denom) <= 1e-12) throw GeometryError("degenerate oblique direction");
    const auto n = body.dim();
    const Matrix projector = Matrix::Identity(n, n) - d * normal.transpose() / denom;
    return map_body(body, h.basis().transpose() * projector, Vector::Zero(h.dim()));
}

enum class SliceStatus { Empty, Point, Body };

struct SliceResult {
    SliceStatus status = SliceStatus::Empty;
    std::optional<ConvexBody> body;  // set when status == Body
    Vector point;                    // set when status == Point (hyperplane coordinates)
};

struct SliceOptions {
    Eigen::Index rays = 64;
    std::uint64_t seed = 0;
    double tol = 1e-10;
};

namespace detail {

inline SliceResult slice_ellipsoid(const Ellipsoid& e, bool symmetric, const Subspace& plane, double tol) {
    const Matrix& u = plane.basis();
    const Vector offset = plane.base_point() - e.center();
    const Matrix a = u.transpose() * e.shape() * u;
    const Vector b = u.transpose() * e.shape() * offset;
    const double gamma = offset.dot(e.shape() * offset);
    const Eigen::LLT<Matrix> llt(a);
    const Vector ainv_b = llt.solve(b);
    const double kappa = 1.0 - gamma + b.dot(ainv_b);
    Vector center = -ainv_b;
    if (kappa < -tol) return {};
    if (kappa <= tol) return {SliceStatus::Point, std::nullopt, center};
    const bool central = symmetric && plane.is_linear(0.0);
    if (central) center.setZero();
    Matrix shape = a / kappa;
    shape = 0.5 * (shape + shape.transpose());
    return {SliceStatus::Body, ConvexBody::trusted(plane.dim(), Ellipsoid(center, shape), central), Vector()};
}

// conv(points) ∩ plane via LP extreme points and ray shooting.
inline SliceResult slice_point_cloud(const PointCloud& pc, bool symmetric, const Subspace& plane,
                                     const SliceOptions& opt) {
    const Matrix& x = pc.points;
    const auto n = x.rows();
    const auto m = x.cols();
    const Matrix& u = plane.basis();
    const Vector normal = plane.normal();
    const double level = normal.dot(plane.base_point());
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());

    // Extreme points of the section along +-basis directions.
    Matrix a_eq(2, m);
    a_eq.row(0) = normal.transpose() * x;
    a_eq.row(1).setOnes();
    Vector b_eq(2);
    b_eq << level, 1.0;
    std::vector<Vector> extremes;
    double width = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        double hi = 0.0;
        double lo = 0.0;
        for (int sign : {1, -1}) {
            const Vector c = (static_cast<double>(sign) * u.col(j).transpose() * x).transpose();
            const LpResult r = solve_lp(c, Matrix(0, m), Vector(0), a_eq, b_eq, 1e-11);
            if (r.status != LpStatus::Optimal) return {};
            extremes.emplace_back(x * r.x);
            (sign > 0 ? hi : lo) = r.objective;
        }
        width = std::max(width, hi + lo);
    }
    Vector interior = Vector::Zero(n);
    for (const auto& e : extremes) interior += e;
    interior /= static_cast<double>(extremes.size());
    const bool central = symmetric && plane.is_linear(0.0);
    if (central) interior.setZero();
    if (width <= opt.tol * scale)
        return {SliceStatus::Point, std::nullopt, plane.to_local(interior)};

    // Ray shooting: maximize t with interior + t * dir in conv(points).
    const auto k = u.cols();
    Matrix rays = sample_directions(k, opt.rays, opt.seed);
    const Eigen::Index shots = central ? (opt.rays + 1) / 2 : opt.rays;
    Matrix a_ray(n + 1, m + 1);
    a_ray.topLeftCorner(n, m) = x;
    a_ray.row(n).head(m).setOnes();
    a_ray(n, m) = 0.0;
    Vector b_ray(n + 1);
    b_ray.head(n) = interior;
    b_ray[n] = 1.0;
    Vector c = Vector::Zero(m + 1);
    c[m] = 1.0;
    const auto extra = static_cast<Eigen::Index>(extremes.size());
    Matrix boundary(k, (central ? 2 * shots : shots) + extra);
    const Vector local_interior = plane.to_local(interior);
    for (Eigen::Index i = 0; i < extra; ++i) boundary.col(boundary.cols() - extra + i) = plane.to_local(extremes[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < shots; ++i) {
        const Vector dir = u * rays.col(i);
        a_ray.col(m).head(n) = -dir;
        const LpResult r = solve_standard_lp(c, a_ray, b_ray, 1e-11);
        if (r.status != LpStatus::Optimal) throw GeometryError("ray shooting failed");
        boundary.col(i) = local_interior + r.x[m] * rays.col(i);
        if (central) boundary.col(shots + i) = -boundary.col(i);
    }
    return {SliceStatus::Body, ConvexBody::trusted(k, PointCloud{boundary}, central), Vector()};
}

// Support of K ∩ {<normal, x> = level} at v ⊥ normal: min_s h(v + s normal) - s level.
inline double section_support(const ConvexBody& body, const Vector& v, const Vector& normal, double level) {
    auto phi = [&](double s) { return body.support(v + s * normal) - s * level; };
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 60 && phi(lo) < phi(lo * 0.5); ++i) lo *= 2.0;
    for (int i = 0; i < 60 && phi(hi) < phi(hi * 0.5); ++i) hi *= 2.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c1 = b - g * (b - a);
    double c2 = a + g * (b - a);
    double f1 = phi(c1);
    double f2 = phi(c2);
    for (int i = 0; i < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - g * (b - a);
            f1 = phi(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + g * (b - a);
            f2 = phi(c2);
        }
    }
    return std::min(f1, f2);
}

inline SliceResult slice_by_support(const ConvexBody& body, const Subspace& plane, const SliceOptions& opt) {
    const Vector normal = plane.normal();
    const double level = normal.dot(plane.base_point());
    const double top = body.support(normal);
    const double bottom = -body.support(-normal);
    const double scale = std::max(1.0, std::max(std::abs(top), std::abs(bottom)));
    if (level > top + opt.tol * scale || level < bottom - opt.tol * scale) return {};
    if (level >= top - opt.tol * scale) return {SliceStatus::Point, std::nullopt, plane.to_local(body.touching_point(normal))};
    if (level <= bottom + opt.tol * scale)
        return {SliceStatus::Point, std::nullopt, plane.to_local(body.touching_point(-normal))};

    const auto k = plane.dim();
    const bool central = body.symmetric() && plane.is_linear(0.0);
    Matrix dirs = sample_directions(k, opt.rays, opt.seed);
    if (central) {
        const auto half = (opt.rays + 1) / 2;
        Matrix sym(k, 2 * half);
        sym << dirs.leftCols(half), -dirs.leftCols(half);
        dirs = sym;
    }
    Vector values(dirs.cols());
    const Eigen::Index evaluate = central ? dirs.cols() / 2 : dirs.cols();
    for (Eigen::Index i = 0; i < evaluate; ++i) {
        const Vector v = plane.basis() * dirs.col(i);
        values[i] = section_support(body, v, normal, level) - plane.base_point().dot(v);
    }
    if (central) values.tail(evaluate) = values.head(evaluate);
    return {SliceStatus::Body, ConvexBody::trusted(k, SupportSample{dirs, values}, central), Vector()};
}

}  // namespace detail

// K ∩ plane for an affine hyperplane, in the plane's basis coordinates
// (origin at plane.base_point()). Empty and single-point sections are
// reported through the status tag.
inline SliceResult slice(const ConvexBody& body, const Subspace& plane, const SliceOptions& opt = {}) {
    if (plane.ambient_dim() != body.dim()) throw GeometryError("subspace dimension mismatch");
    if (!plane.is_hyperplane()) throw GeometryError("slice requires a hyperplane");
    if (const auto* e = body.as<Ellipsoid>()) return detail::slice_ellipsoid(*e, body.symmetric(), plane, opt.tol);
    if (const auto* pc = body.as<PointCloud>()) return detail::slice_point_cloud(*pc, body.symmetric(), plane, opt);
    return detail::slice_by_support(body, plane, opt);
}

// max over the columns u of dirs of |h_a(u) - h_b(u)|.
inline double support_distance(const ConvexBody& a, const ConvexBody& b, const Matrix& dirs) {
    if (a.dim() != b.dim()) throw GeometryError("dimension mismatch");
    if (dirs.cols() == 0) throw GeometryError("empty direction set");
    return (a.support_many(dirs) - b.support_many(dirs)).cwiseAbs().maxCoeff();
}

inline double support_distance(const ConvexBody& a, const ConvexBody& b, Eigen::Index count = 1000,
                               std::uint64_t seed = 0) {
    if (a.dim() != b.dim()) throw GeometryError("dimension mismatch");
    return support_distance(a, b, sample_directions(a.dim(), count, seed));
}

}  // namespace affrev
