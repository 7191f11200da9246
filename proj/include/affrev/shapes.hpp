#pragma once

#include "affrev/operators.hpp"

namespace affrev::shapes {

inline ConvexBody unit_ball(Eigen::Index n) { return ConvexBody::ellipsoid(Ellipsoid::ball(n)); }

// [-half, half]^n.
inline ConvexBody cube(Eigen::Index n, double half = 1.0) {
    const Eigen::Index count = Eigen::Index{1} << n;
    Matrix pts(n, count);
    for (Eigen::Index v = 0; v < count; ++v)
        for (Eigen::Index i = 0; i < n; ++i) pts(i, v) = ((v >> i) & 1) ? half : -half;
    return ConvexBody::point_cloud(std::move(pts), true);
}

// conv{±e_i}.
inline ConvexBody cross_polytope(Eigen::Index n) {
    Matrix pts(n, 2 * n);
    pts << Matrix::Identity(n, n), -Matrix::Identity(n, n);
    return ConvexBody::point_cloud(std::move(pts), true);
}

// m Gaussian points (m rounded up to even) closed under negation.
inline ConvexBody random_symmetric_polytope(Eigen::Index n, Eigen::Index m, Rng& rng) {
    const Eigen::Index half = std::max<Eigen::Index>((m + 1) / 2, n);
    Matrix pts(n, 2 * half);
    for (Eigen::Index i = 0; i < half; ++i) {
        pts.col(i) = gaussian_vector(n, rng);
        pts.col(half + i) = -pts.col(i);
    }
    return ConvexBody::point_cloud(std::move(pts), true);
}

// Radius profile sample of a body of revolution: the section at height t
// along the axis is a ball of the given radius (0 = a single point).
struct ProfileLevel {
    double t;
    double radius;
};

// Hull of the level balls. For a concave piecewise-linear profile whose
// breakpoints are the levels this is exactly the profile body.
inline ConvexBody revolution_body(const std::vector<ProfileLevel>& profile, const Vector& axis) {
    if (profile.empty()) throw GeometryError("empty profile");
    const auto n = axis.size();
    const Vector a = axis.normalized();
    const Matrix ortho = complement_of_vector(a);
    std::vector<EllipsoidPiece> pieces;
    std::vector<Vector> points;
    bool symmetric = true;
    for (const auto& level : profile) {
        if (level.radius < 0) throw GeometryError("negative profile radius");
        if (level.radius == 0.0)
            points.emplace_back(level.t * a);
        else
            pieces.push_back({level.t * a, level.radius * ortho});
        const bool mirrored = std::any_of(profile.begin(), profile.end(), [&](const ProfileLevel& o) {
            return o.t == -level.t && o.radius == level.radius;
        });
        symmetric = symmetric && mirrored;
    }
    Matrix pts(n, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = points[i];
    return ConvexBody::ellipsoid_hull(std::move(pieces), std::move(pts), symmetric);
}

// Mirror a profile given on t >= 0 into a symmetric one.
inline std::vector<ProfileLevel> mirrored(const std::vector<ProfileLevel>& upper) {
    std::vector<ProfileLevel> out;
    for (const auto& l : upper) {
        out.push_back(l);
        if (l.t != 0.0) out.push_back({-l.t, l.radius});
    }
    std::sort(out.begin(), out.end(), [](const ProfileLevel& a, const ProfileLevel& b) { return a.t < b.t; });
    return out;
}

// Symmetric concave piecewise-linear profile on [-1, 1] with `breaks`
// interior breakpoints per side. Radii come from random decreasing slopes,
// so the profile is concave and the body is not an ellipsoid.
inline std::vector<ProfileLevel> random_concave_profile(Rng& rng, int breaks = 2, bool apex = true) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> ts{0.0, 1.0};
    for (int i = 0; i < breaks; ++i) ts.push_back(0.15 + 0.7 * unit(rng));
    std::sort(ts.begin(), ts.end());
    std::vector<double> slopes;  // on [ts[i], ts[i+1]], increasingly steep
    for (std::size_t i = 1; i < ts.size(); ++i) slopes.push_back(-(0.2 + 2.5 * unit(rng)));
    std::sort(slopes.begin(), slopes.end(), std::greater<>());
    std::vector<double> radii(ts.size());
    radii.back() = apex ? 0.0 : 0.1 + 0.3 * unit(rng);
    for (std::size_t i = ts.size() - 1; i > 0; --i) radii[i - 1] = radii[i] - slopes[i - 1] * (ts[i] - ts[i - 1]);
    const double scale = (0.5 + unit(rng)) / radii.front();
    std::vector<ProfileLevel> upper;
    for (std::size_t i = 0; i < ts.size(); ++i) upper.push_back({ts[i], scale * radii[i]});
    return mirrored(upper);
}

// Concave piecewise-linear profile on [-1, 1] with no mirror symmetry:
// decreasing random slopes, shifted so the smaller end radius is small.
inline std::vector<ProfileLevel> random_asymmetric_profile(Rng& rng, int breaks = 3) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> ts{-1.0, 1.0};
    for (int i = 0; i < breaks; ++i) ts.push_back(-0.85 + 1.7 * unit(rng));
    std::sort(ts.begin(), ts.end());
    std::vector<double> slopes;
    for (std::size_t i = 1; i < ts.size(); ++i) slopes.push_back(-2.0 + 4.0 * unit(rng));
    std::sort(slopes.begin(), slopes.end(), std::greater<>());
    std::vector<double> radii(ts.size(), 0.0);
    for (std::size_t i = 1; i < ts.size(); ++i) radii[i] = radii[i - 1] + slopes[i - 1] * (ts[i] - ts[i - 1]);
    const double shift = 0.2 * unit(rng) - std::min(radii.front(), radii.back());
    for (double& r : radii) r += shift;
    const double scale = (0.5 + unit(rng)) / *std::max_element(radii.begin(), radii.end());
    std::vector<ProfileLevel> out;
    for (std::size_t i = 0; i < ts.size(); ++i) out.push_back({ts[i], scale * radii[i]});
    return out;
}

// Polytope with the same profile whose level sets are `sides`-gons (dim 3)
// or cross-polytopes of the axis complement (other dims): close to, but not,
// a body of revolution.
inline ConvexBody polygonal_revolution(const std::vector<ProfileLevel>& profile, const Vector& axis, int sides = 6) {
    const auto n = axis.size();
    const Vector a = axis.normalized();
    const Matrix ortho = complement_of_vector(a);
    Matrix ring;
    if (n == 3) {
        ring.resize(2, sides);
        for (int k = 0; k < sides; ++k) ring.col(k) << std::cos(2 * kPi * k / sides), std::sin(2 * kPi * k / sides);
    } else {
        ring.resize(n - 1, 2 * (n - 1));
        ring << Matrix::Identity(n - 1, n - 1), -Matrix::Identity(n - 1, n - 1);
    }
    std::vector<Vector> pts;
    bool symmetric = true;
    for (const auto& level : profile) {
        if (level.radius == 0.0) pts.emplace_back(level.t * a);
        else
            for (Eigen::Index k = 0; k < ring.cols(); ++k) pts.emplace_back(level.t * a + level.radius * ortho * ring.col(k));
        symmetric = symmetric && std::any_of(profile.begin(), profile.end(), [&](const ProfileLevel& o) {
                        return o.t == -level.t && o.radius == level.radius;
                    });
    }
    if (n == 3 && sides % 2 == 1) symmetric = false;
    Matrix m(n, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
    return ConvexBody::point_cloud(std::move(m), symmetric);
}

// Profile |t|^p + |r / scale|^p = 1 with `levels` heights per side, spaced
// evenly in arc length so that no facet of the hull is long.
inline std::vector<ProfileLevel> smooth_profile(double p, double scale, int levels) {
    const int fine = 4096;
    std::vector<double> ts(fine + 1), rs(fine + 1), arc(fine + 1, 0.0);
    for (int i = 0; i <= fine; ++i) {
        const double phi = 0.5 * kPi * static_cast<double>(i) / fine;
        ts[i] = std::pow(std::cos(phi), 2.0 / p);
        rs[i] = scale * std::pow(std::sin(phi), 2.0 / p);
        if (i > 0) arc[i] = arc[i - 1] + std::hypot(ts[i] - ts[i - 1], rs[i] - rs[i - 1]);
    }
    std::vector<ProfileLevel> upper{{0.0, scale}};
    int j = fine;
    for (int k = 1; k < levels; ++k) {
        const double target = arc[fine] * (1.0 - static_cast<double>(k) / levels);
        while (j > 0 && arc[j - 1] >= target) --j;
        upper.push_back({ts[j], rs[j]});
    }
    upper.push_back({1.0, 0.0});
    return mirrored(upper);
}

// hull(unit ball ∪ {±height·e_axis}).
inline ConvexBody capped_ball(Eigen::Index n, Eigen::Index axis = -1, double height = 2.0) {
    if (axis < 0) axis = n - 1;
    Matrix pts = Matrix::Zero(n, 2);
    pts(axis, 0) = height;
    pts(axis, 1) = -height;
    std::vector<EllipsoidPiece> pieces{{Vector::Zero(n), Matrix::Identity(n, n)}};
    return ConvexBody::ellipsoid_hull(std::move(pieces), std::move(pts), true);
}

}  // namespace affrev::shapes
