#pragma once

#include "affrev/canonical.hpp"
#include "affrev/optimize.hpp"

#include <optional>

namespace affrev {

struct RevolutionCertificate {
    Line axis;
    double residual = 0.0;
    bool degenerate = false;
    Subspace hyperplane;       // hyperplane of revolution
    double second_best = 0.0;  // best grid residual away from the axis
};

struct RevolutionOptions {
    double tol = 1e-3;
    Eigen::Index grid = 2000;     // coarse axis grid on the projective sphere
    Eigen::Index samples = 96;    // directions u
    Eigen::Index rotations = 12;  // orbit points per u
    std::uint64_t seed = 0;
    double eps = kMveeDefaultEps;
};

namespace detail {

// Fixed sampling for the orbit residual, shared by every candidate axis so
// that the residual is a deterministic continuous function of the axis.
class OrbitResidual {
public:
    OrbitResidual(const ConvexBody& body, const RevolutionOptions& opt)
        : body_(body),
          u_(sample_directions(body.dim(), opt.samples, mix_seed(opt.seed, 1))),
          g_(body.dim(), opt.rotations),
          diameter_(body.diameter()) {
        Rng rng(mix_seed(opt.seed, 2));
        for (Eigen::Index k = 0; k < g_.cols(); ++k) g_.col(k) = gaussian_vector(body.dim(), rng);
    }

    [[nodiscard]] double diameter() const { return diameter_; }

    // max |h(alpha a + beta w') - h(alpha a + beta w)| / diam over u = alpha a + beta w
    // and sampled unit w' in a^perp, for the body re-centered at `base`.
    [[nodiscard]] double operator()(const Vector& axis, const Vector& base) const {
        const auto n = body_.dim();
        const Vector a = axis.normalized();
        const Eigen::Index s = u_.cols();
        const Eigen::Index r = g_.cols();
        Matrix all(n, s * (r + 1));
        for (Eigen::Index i = 0; i < s; ++i) {
            const Vector u = u_.col(i);
            const double alpha = u.dot(a);
            const Vector w = u - alpha * a;
            const double beta = w.norm();
            all.col(i * (r + 1)) = u;
            for (Eigen::Index k = 0; k < r; ++k) {
                Vector g = g_.col(k) - g_.col(k).dot(a) * a;
                const double norm = g.norm();
                g = norm > 1e-12 ? Vector(g / norm) : Vector(beta > 0 ? Vector(w / beta) : g);
                all.col(i * (r + 1) + k + 1) = alpha * a + beta * g;
            }
        }
        const Vector h = body_.support_many(all) - all.transpose() * base;
        double worst = 0.0;
        for (Eigen::Index i = 0; i < s; ++i) {
            const double h0 = h[i * (r + 1)];
            for (Eigen::Index k = 1; k <= r; ++k) worst = std::max(worst, std::abs(h[i * (r + 1) + k] - h0));
        }
        return worst / diameter_;
    }

private:
    const ConvexBody& body_;
    Matrix u_;
    Matrix g_;
    double diameter_;
};

// Typical spacing of `count` points on the projective sphere RP^{n-1}.
inline double projective_spacing(Eigen::Index n, Eigen::Index count) {
    const double dn = static_cast<double>(n);
    const double volume = std::pow(kPi, dn / 2.0) / std::tgamma(dn / 2.0);
    return std::pow(volume / static_cast<double>(count), 1.0 / (dn - 1.0));
}

}  // namespace detail

// Rotational invariance of h_K about the line a (which may miss the origin).
inline double revolution_residual(const ConvexBody& body, const Line& a, const RevolutionOptions& opt = {}) {
    if (a.ambient_dim() != body.dim()) throw GeometryError("axis dimension mismatch");
    return detail::OrbitResidual(body, opt)(a.direction(), a.base_point());
}

// Best axis through the origin: coarse projective grid, then Nelder-Mead on
// the top cells. Always returns the best candidate; callers threshold.
inline RevolutionCertificate search_revolution_axis(const ConvexBody& body, const RevolutionOptions& opt = {}) {
    const auto n = body.dim();
    if (n < 2) throw GeometryError("revolution axis needs dimension >= 2");
    const detail::OrbitResidual residual(body, opt);
    const Vector origin = Vector::Zero(n);
    const Matrix grid = projective_grid(n, opt.grid, opt.seed);
    std::vector<double> values(static_cast<std::size_t>(grid.cols()));
    for (Eigen::Index i = 0; i < grid.cols(); ++i) values[static_cast<std::size_t>(i)] = residual(grid.col(i), origin);

    std::vector<Eigen::Index> order(values.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)]; });

    const double spacing = detail::projective_spacing(n, grid.cols());
    const auto polish = [&](const Vector& a0) {
        const Matrix chart = complement_of_vector(a0);
        auto axis_at = [&](const Vector& t) -> Vector { return (a0 + chart * t).normalized(); };
        NelderMeadOptions nm;
        nm.initial_step = 0.5 * spacing;
        nm.max_evaluations = static_cast<int>(300 * (n - 1));
        nm.x_tol = 1e-12;
        const auto r = nelder_mead([&](const Vector& t) { return residual(axis_at(t), origin); },
                                   Vector::Zero(n - 1), nm);
        return std::make_pair(Vector(axis_at(r.x)), r.value);
    };
    Vector best_axis = grid.col(order.front());
    double best = values[static_cast<std::size_t>(order.front())];
    const std::size_t refine = std::min<std::size_t>(3, order.size());
    for (std::size_t c = 0; c < refine; ++c) {
        const auto [axis, value] = polish(grid.col(order[c]));
        if (value < best) {
            best = value;
            best_axis = axis;
        }
    }

    RevolutionCertificate cert;
    cert.axis = Line(best_axis);
    cert.residual = best;
    cert.hyperplane = Subspace(complement_of_vector(cert.axis.direction()), origin);
    int near_ties = 0;
    double second = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.cols(); ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (v <= 1.05 * best + 1e-9) ++near_ties;
        if (line_angle(grid.col(i), best_axis) > 2.0 * spacing) second = std::min(second, v);
    }
    // Polish the two best cells away from the axis: a second axis (a 2-D
    // centrally symmetric body has two perpendicular ones) must not hide
    // between grid points.
    int rivals = 0;
    for (std::size_t k = 0; k < order.size() && rivals < 2; ++k) {
        const Vector a0 = grid.col(order[k]);
        if (line_angle(a0, best_axis) <= 2.0 * spacing) continue;
        ++rivals;
        const auto [axis, value] = polish(a0);
        if (line_angle(axis, best_axis) > 2.0 * spacing) second = std::min(second, value);
    }
    cert.second_best = second;
    cert.degenerate = near_ties >= 2 || second < 2.0 * best;
    return cert;
}

inline std::optional<RevolutionCertificate> revolution_axis(const ConvexBody& body, const RevolutionOptions& opt = {}) {
    RevolutionCertificate cert = search_revolution_axis(body, opt);
    if (cert.residual > opt.tol) return std::nullopt;
    return cert;
}

// Axis search in the canonical frame, mapped back by the inverse normalizer.
// The reported residual is the canonical-frame one.
inline RevolutionCertificate search_affine_revolution_axis(const ConvexBody& body, const RevolutionOptions& opt = {}) {
    const Canonical c = canonicalize(body, opt.eps, body.symmetric());
    RevolutionCertificate cert = search_revolution_axis(c.body, opt);
    const AffineMap back = c.map.inverse();
    const Vector a = cert.axis.direction();
    cert.axis = back.map_line(cert.axis);
    cert.hyperplane = Subspace(orthonormalize(back.matrix() * complement_of_vector(a)), back(Vector::Zero(body.dim())));
    return cert;
}

inline std::optional<RevolutionCertificate> affine_revolution_axis(const ConvexBody& body,
                                                                   const RevolutionOptions& opt = {}) {
    RevolutionCertificate cert = search_affine_revolution_axis(body, opt);
    if (cert.residual > opt.tol) return std::nullopt;
    return cert;
}

// Residual of a claimed affine axis: revolution_residual of the canonical
// form at the image of the line.
inline double affine_revolution_residual(const ConvexBody& body, const Line& axis, const RevolutionOptions& opt = {}) {
    const Canonical c = canonicalize(body, opt.eps, body.symmetric());
    return revolution_residual(c.body, c.map.map_line(axis), opt);
}

// Axis of the orthogonal projection onto H of a ball centered at x inside
// the hyperplane gamma: L = (x + (gamma^perp + H^perp)) ∩ H.
inline Line predicted_projection_axis(const Subspace& gamma, const Vector& x, const Subspace& h) {
    if (!gamma.is_hyperplane() || !h.is_hyperplane()) throw GeometryError("flats must be hyperplanes");
    if (gamma.ambient_dim() != h.ambient_dim() || x.size() != h.ambient_dim()) throw GeometryError("dimension mismatch");
    if (!gamma.contains(x, 1e-9)) throw GeometryError("center is not on the flat");
    const Vector ng = gamma.normal();
    const Vector nh = h.normal();
    const Vector d = ng - ng.dot(nh) * nh;
    if (d.norm() <= 1e-12) {
        if (h.contains(gamma.base_point(), 1e-12)) throw GeometryError("coincident flats");
        throw GeometryError("parallel flats");
    }
    return Line(d, x - (x - h.base_point()).dot(nh) * nh);
}

struct RevolutionShadow {
    ConvexBody shadow;             // coordinates of basis
    Matrix basis;                  // orthonormal basis of ell^perp
    std::optional<Line> predicted; // empty: predicted to be an ellipsoid
};

// Shadow along ell with the projection law's prediction: an ellipsoid when
// the axis is parallel to ell, otherwise the projected axis.
inline RevolutionShadow project_revolution(const ConvexBody& body, const Line& axis, const Vector& ell,
                                           double angle_tol = 1e-9) {
    if (axis.ambient_dim() != body.dim() || ell.size() != body.dim()) throw GeometryError("dimension mismatch");
    RevolutionShadow out{project_along(body, ell), complement_of_vector(ell.normalized()), std::nullopt};
    if (line_angle(axis.direction(), ell) > angle_tol)
        out.predicted = Line(out.basis.transpose() * axis.direction(), out.basis.transpose() * axis.base_point());
    return out;
}

struct ShadowBoundary {
    Matrix points;   // touching points, one per column
    Matrix normals;  // outer normals u ⊥ ell
    Vector direction;
    double planarity_residual = 0.0;
    Vector plane_normal;  // total-least-squares hyperplane through the centroid
};

struct ShadowBoundaryOptions {
    Eigen::Index count = 256;
    double band_tol = 0.05;  // touching-set size relative to the diameter
    std::uint64_t seed = 0;
};

// Touching points for outer normals orthogonal to ell.
inline ShadowBoundary shadow_boundary(const ConvexBody& body, const Vector& ell, const ShadowBoundaryOptions& opt = {}) {
    if (ell.size() != body.dim()) throw GeometryError("dimension mismatch");
    if (body.is_polytope()) throw GeometryError("shadow boundary of a polytope");
    const auto n = body.dim();
    const Vector d = ell.normalized();
    const double diameter = body.diameter();
    ShadowBoundary out;
    out.direction = d;
    out.normals = directions_in(complement_of_vector(d), opt.count, opt.seed);
    out.points.resize(n, out.normals.cols());
    for (Eigen::Index i = 0; i < out.normals.cols(); ++i) {
        const Touching t = body.touching(out.normals.col(i));
        if (t.spread > opt.band_tol * diameter) throw GeometryError("shadow boundary is a band");
        out.points.col(i) = t.point;
    }
    // A face between neighboring normals shows up as a touching-point jump
    // that survives bisection of the arc between them; on a smooth body the
    // jump shrinks with the arc.
    const double threshold = opt.band_tol * diameter;
    const Matrix gram = out.normals.transpose() * out.normals;
    for (Eigen::Index i = 0; i < gram.cols(); ++i) {
        Eigen::Index j = 0;
        Vector row = gram.col(i);
        row[i] = -2.0;
        row.maxCoeff(&j);
        if ((out.points.col(i) - out.points.col(j)).norm() <= threshold) continue;
        Vector lo = out.normals.col(i), hi = out.normals.col(j);
        Vector xl = out.points.col(i), xh = out.points.col(j);
        for (int it = 0; it < 40; ++it) {
            const Vector mid = (lo + hi).normalized();
            const Vector xm = body.touching(mid).point;
            if ((xl - xm).norm() >= (xm - xh).norm()) {
                hi = mid;
                xh = xm;
            } else {
                lo = mid;
                xl = xm;
            }
        }
        if ((xl - xh).norm() > threshold) throw GeometryError("shadow boundary is a band");
    }
    const Vector centroid = out.points.rowwise().mean();
    const Matrix centered = out.points.colwise() - centroid;
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeFullU);
    out.plane_normal = svd.matrixU().col(n - 1);
    out.planarity_residual = (out.plane_normal.transpose() * centered).cwiseAbs().maxCoeff() / diameter;
    return out;
}

}  // namespace affrev
