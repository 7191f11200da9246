#include <gtest/gtest.h>

#include "affrev/operators.hpp"
#include "affrev/shapes.hpp"

#include <algorithm>
#include <cmath>

using namespace affrev;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

ConvexBody disk_2d() { return shapes::unit_ball(2); }

ConvexBody square_2d() { return shapes::cube(2); }

}  // namespace

// ---------------------------------------------------------------- support

TEST(Support, UnitBallIsOneEverywhere) {
    Rng rng(3);
    const auto ball = shapes::unit_ball(4);
    for (int i = 0; i < 20; ++i) EXPECT_NEAR(ball.support(random_unit_vector(4, rng)), 1.0, 1e-15);
}

TEST(Support, CubeDiagonal) {
    const auto cube = shapes::cube(3);
    EXPECT_NEAR(cube.support(Vector::Ones(3) / std::sqrt(3.0)), std::sqrt(3.0), 1e-15);
}

TEST(Support, EllipsoidClosedForm) {
    Matrix q = Matrix::Zero(2, 2);
    q(0, 0) = 1.0;
    q(1, 1) = 0.25;
    const auto e = ConvexBody::ellipsoid(Ellipsoid(Vector::Zero(2), q));
    EXPECT_NEAR(e.support(vec({0, 1})), 2.0, 1e-15);
    EXPECT_NEAR(e.support(vec({1, 0})), 1.0, 1e-15);
}

TEST(Support, EllipsoidHullTakesMaxOverGenerators) {
    const auto capped = shapes::capped_ball(3);
    EXPECT_NEAR(capped.support(vec({0, 0, 1})), 2.0, 1e-15);
    EXPECT_NEAR(capped.support(vec({1, 0, 0})), 1.0, 1e-15);
    const Vector u = vec({1, 0, 1}).normalized();
    EXPECT_NEAR(capped.support(u), std::max(1.0, 2.0 / std::sqrt(2.0)), 1e-15);
}

TEST(Support, SupportManyMatchesSingle) {
    Rng rng(11);
    const Matrix dirs = sample_directions(3, 50, 4);
    for (const auto& body : {shapes::cube(3), shapes::capped_ball(3), shapes::unit_ball(3),
                             shapes::random_symmetric_polytope(3, 20, rng)}) {
        const Vector many = body.support_many(dirs);
        for (Eigen::Index i = 0; i < dirs.cols(); ++i) EXPECT_NEAR(many[i], body.support(dirs.col(i)), 1e-14);
    }
}

TEST(Support, SupportSampleInterpolatesSmoothBody) {
    Matrix q(3, 3);
    q << 1.0, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 2.0;
    const Ellipsoid e(Vector::Zero(3), q);
    auto sampled = [&](Eigen::Index count) {
        const Matrix dirs = sample_directions(3, count, 1);
        Vector vals(dirs.cols());
        for (Eigen::Index i = 0; i < dirs.cols(); ++i) vals[i] = e.support(dirs.col(i));
        return ConvexBody::support_sample(dirs, vals);
    };
    const auto coarse = sampled(3000);
    const auto fine = sampled(12000);
    Rng rng(5);
    double coarse_err = 0.0;
    double fine_err = 0.0;
    for (int i = 0; i < 40; ++i) {
        const Vector u = random_unit_vector(3, rng);
        coarse_err = std::max(coarse_err, std::abs(coarse.support(u) - e.support(u)));
        fine_err = std::max(fine_err, std::abs(fine.support(u) - e.support(u)));
        EXPECT_LT((coarse.touching_point(u) - e.touching_point(u)).norm(), 1e-2);
        EXPECT_LT((fine.touching_point(u) - e.touching_point(u)).norm(), 2.5e-3);
    }
    EXPECT_LT(coarse_err, 1e-4);
    // Halving the spacing cuts the error well beyond the quadratic rate.
    EXPECT_LT(fine_err, coarse_err / 4);
}

// ------------------------------------------------------------- validation

TEST(Validation, RejectsDegenerateAndAsymmetricClouds) {
    Matrix flat(3, 4);
    flat << 0, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0, 0;
    EXPECT_THROW(ConvexBody::point_cloud(flat), GeometryError);
    Matrix tri(2, 3);
    tri << 0, 1, 0, 0, 0, 1;
    EXPECT_NO_THROW(ConvexBody::point_cloud(tri));
    EXPECT_THROW(ConvexBody::point_cloud(tri, true), GeometryError);
    Matrix bad = tri;
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(ConvexBody::point_cloud(bad), GeometryError);
}

TEST(Validation, SymmetricSupportSampleNeedsPositiveMirroredValues) {
    Matrix dirs(2, 4);
    dirs << 1, -1, 0, 0, 0, 0, 1, -1;
    Matrix more = sample_directions(2, 8, 0);
    Matrix all(2, 8);
    all << more;
    Vector vals = Vector::Ones(8);
    EXPECT_NO_THROW(ConvexBody::support_sample(all, vals, true));
    vals[3] = 2.0;
    EXPECT_THROW(ConvexBody::support_sample(all, vals, true), GeometryError);
}

TEST(Validation, SubspaceAndMapInvariants) {
    Matrix nonortho(3, 2);
    nonortho << 1, 1, 0, 1, 0, 0;
    EXPECT_THROW(Subspace(nonortho, Vector::Zero(3)), GeometryError);
    EXPECT_NO_THROW(Subspace::span(nonortho));
    EXPECT_THROW(AffineMap(Matrix::Zero(2, 2), Vector::Zero(2)), GeometryError);
    const Line l(vec({0, -2, 1}), vec({1, 0, 0}));
    EXPECT_GT(l.direction()[1], 0.0);
    EXPECT_NEAR(l.direction().norm(), 1.0, 1e-15);
}

TEST(AffineMapAlgebra, ComposeAndInverse) {
    Rng rng(8);
    const AffineMap f(random_conditioned_matrix(3, 10, rng), gaussian_vector(3, rng));
    const AffineMap g(random_conditioned_matrix(3, 10, rng), gaussian_vector(3, rng));
    const Vector x = gaussian_vector(3, rng);
    EXPECT_LT((f.compose(g)(x) - f(g(x))).norm(), 1e-12);
    EXPECT_LT((f.inverse()(f(x)) - x).norm(), 1e-12);
}

// --------------------------------------------------------------- project

TEST(Project, BallOntoCoordinatePlaneIsUnitDisk) {
    const auto shadow = project(shapes::unit_ball(3), Subspace::coordinate(3, {0, 1}));
    EXPECT_EQ(shadow.dim(), 2);
    EXPECT_LT(support_distance(shadow, disk_2d(), 500), 1e-15);
}

TEST(Project, CubeAlongAxisIsSquare) {
    const auto shadow = project(shapes::cube(3), Subspace::coordinate(3, {0, 1}));
    EXPECT_LT(support_distance(shadow, square_2d(), 500), 1e-15);
}

TEST(Project, CubeAlongDiagonalIsRegularHexagon) {
    const Vector d = Vector::Ones(3) / std::sqrt(3.0);
    const auto shadow = project_along(shapes::cube(3), d);
    // Oracle: project the 8 vertices by hand and inspect the hull.
    const Matrix basis = complement_of_vector(d);
    const Matrix verts = shapes::cube(3).as<PointCloud>()->points;
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < verts.cols(); ++i) {
        const Vector p = verts.col(i) - verts.col(i).dot(d) * d;
        if (p.norm() < 1e-12) continue;
        EXPECT_NEAR(p.norm(), std::sqrt(8.0 / 3.0), 1e-14);
        const Vector local = basis.transpose() * p;
        angles.push_back(std::atan2(local[1], local[0]));
    }
    ASSERT_EQ(angles.size(), 6u);
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 1; i < angles.size(); ++i) EXPECT_NEAR(angles[i] - angles[i - 1], kPi / 3.0, 1e-12);
    // The shadow's support is the hexagon's: circumradius at the vertices.
    Vector local0(2);
    local0 << std::cos(angles[0]), std::sin(angles[0]);
    EXPECT_NEAR(shadow.support(local0), std::sqrt(8.0 / 3.0), 1e-14);
    local0 << std::cos(angles[0] + kPi / 6), std::sin(angles[0] + kPi / 6);
    EXPECT_NEAR(shadow.support(local0), std::sqrt(8.0 / 3.0) * std::cos(kPi / 6), 1e-14);
}

TEST(Project, RejectsFullSpace) {
    EXPECT_THROW(project(shapes::cube(3), Subspace::coordinate(3, {0, 1, 2})), GeometryError);
    Subspace affine(Matrix::Identity(3, 2), vec({0, 0, 1}));
    EXPECT_THROW(project(shapes::cube(3), affine), GeometryError);
}

TEST(Project, SupportIdentityOnRandomBodies) {
    Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 3 + trial % 3;
        const auto body = shapes::random_symmetric_polytope(n, 40, rng);
        const Eigen::Index k = 1 + trial % (n - 1);
        Matrix g(n, k);
        for (Eigen::Index j = 0; j < k; ++j) g.col(j) = gaussian_vector(n, rng);
        const Subspace s = Subspace::span(g);
        const auto shadow = project(body, s);
        const Matrix local = sample_directions(k, 200, static_cast<std::uint64_t>(trial));
        for (Eigen::Index i = 0; i < local.cols(); ++i)
            EXPECT_NEAR(shadow.support(local.col(i)), body.support(s.basis() * local.col(i)), 1e-10);
    }
}

TEST(Project, CompositionOfNestedProjections) {
    Rng rng(4);
    const auto body = shapes::random_symmetric_polytope(4, 30, rng);
    Matrix g(4, 3);
    for (Eigen::Index j = 0; j < 3; ++j) g.col(j) = gaussian_vector(4, rng);
    const Subspace s1 = Subspace::span(g);
    // s2 ⊂ s1, described both in s1-coordinates and in ambient coordinates.
    Matrix inner(3, 2);
    inner.col(0) = gaussian_vector(3, rng);
    inner.col(1) = gaussian_vector(3, rng);
    const Subspace s2_local = Subspace::span(inner);
    const Subspace s2_ambient(s1.basis() * s2_local.basis(), Vector::Zero(4));
    const auto twice = project(project(body, s1), s2_local);
    const auto once = project(body, s2_ambient);
    EXPECT_LE(support_distance(twice, once, 500), 1e-10);
}

TEST(Project, SymmetryPreserved) {
    Rng rng(9);
    const auto body = shapes::random_symmetric_polytope(4, 24, rng);
    const auto shadow = project_along(body, gaussian_vector(4, rng));
    EXPECT_TRUE(shadow.symmetric());
    EXPECT_NO_THROW(ConvexBody::point_cloud(shadow.as<PointCloud>()->points, true));
    const Matrix dirs = sample_directions(3, 300, 2);
    EXPECT_LE((shadow.support_many(dirs) - shadow.support_many(-dirs)).cwiseAbs().maxCoeff(), 1e-10);
}

// ------------------------------------------------------- oblique_project

TEST(ObliqueProject, OrthogonalDirectionMatchesProject) {
    Rng rng(17);
    for (const auto& body : {shapes::random_symmetric_polytope(3, 20, rng), shapes::capped_ball(3)}) {
        const Vector normal = gaussian_vector(3, rng).normalized();
        const Subspace h = Subspace::hyperplane(normal);
        const auto oblique = oblique_project(body, Line(normal), h);
        const auto straight = project(body, h);
        EXPECT_LE(support_distance(oblique, straight, 400), 1e-12);
    }
}

TEST(ObliqueProject, BallAlongTiltedLineIsEllipse) {
    const Subspace h = Subspace::coordinate(3, {0, 1});
    const auto shadow = oblique_project(shapes::unit_ball(3), Line(vec({0, 1, 1})), h);
    const Matrix dirs = sample_directions(2, 360, 1);
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
        const double u1 = dirs(0, i);
        const double u2 = dirs(1, i);
        EXPECT_NEAR(shadow.support(dirs.col(i)), vec({u1, u2, -u2}).norm(), 1e-14);
    }
    EXPECT_NEAR(shadow.support(vec({1, 0})), 1.0, 1e-14);
    EXPECT_NEAR(shadow.support(vec({0, 1})), std::sqrt(2.0), 1e-14);
}

TEST(ObliqueProject, CubeAlongAxisIsSquare) {
    const auto shadow = oblique_project(shapes::cube(3), Line(vec({0, 0, 1})), Subspace::coordinate(3, {0, 1}));
    EXPECT_LT(support_distance(shadow, square_2d(), 400), 1e-15);
}

TEST(ObliqueProject, DirectionInsidePlaneIsRejected) {
    try {
        (void)oblique_project(shapes::cube(3), Line(vec({1, 1, 0})), Subspace::coordinate(3, {0, 1}));
        FAIL() << "expected an error";
    } catch (const GeometryError& e) {
        EXPECT_STREQ(e.what(), "degenerate oblique direction");
    }
}

// ------------------------------------------------------------------ slice

TEST(Slice, BallEquatorIsDisk) {
    const auto r = slice(shapes::unit_ball(3), Subspace::hyperplane(vec({0, 0, 1})));
    ASSERT_EQ(r.status, SliceStatus::Body);
    EXPECT_TRUE(r.body->symmetric());
    EXPECT_LT(support_distance(*r.body, disk_2d(), 400), 1e-14);
}

TEST(Slice, TangentPlaneGivesPoint) {
    const auto r = slice(shapes::unit_ball(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 1})));
    ASSERT_EQ(r.status, SliceStatus::Point);
    EXPECT_LT(r.point.norm(), 1e-12);
    const auto miss = slice(shapes::unit_ball(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 1.5})));
    EXPECT_EQ(miss.status, SliceStatus::Empty);
}

TEST(Slice, EllipsoidLevelSetClosedForm) {
    Matrix q = Matrix::Identity(3, 3);
    q(2, 2) = 0.25;
    const auto e = ConvexBody::ellipsoid(Ellipsoid(Vector::Zero(3), q));
    for (double c : {0.0, 0.5, 1.2, 1.9}) {
        const auto r = slice(e, Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, c})));
        ASSERT_EQ(r.status, SliceStatus::Body);
        const double radius = std::sqrt(1.0 - c * c / 4.0);
        EXPECT_LT(support_distance(*r.body, ConvexBody::ellipsoid(Ellipsoid::ball(2, radius)), 300), 1e-12);
    }
}

TEST(Slice, SupportRouteAgreesWithClosedForm) {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_conditioned_matrix(3, 5, rng);
        const Vector c = 0.2 * gaussian_vector(3, rng);
        const Ellipsoid e = Ellipsoid::from_axes(c, a);
        const auto closed = ConvexBody::ellipsoid(e, false);
        // Same set, evaluated only through its support function.
        const auto hull = ConvexBody::ellipsoid_hull({{c, a}}, Matrix(3, 0));
        const Vector normal = gaussian_vector(3, rng).normalized();
        const Subspace plane = Subspace::hyperplane(normal, c + 0.3 * gaussian_vector(3, rng));
        const auto exact = slice(closed, plane);
        const auto numeric = slice(hull, plane, {.rays = 200, .seed = 1, .tol = 1e-10});
        if (exact.status != SliceStatus::Body) continue;
        ASSERT_EQ(numeric.status, SliceStatus::Body);
        const auto& s = *numeric.body->as<SupportSample>();
        EXPECT_LE((exact.body->support_many(s.directions) - s.values).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Slice, CubePointCloudSectionViaRayShooting) {
    const auto r = slice(shapes::cube(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 0.5})), {.rays = 128});
    ASSERT_EQ(r.status, SliceStatus::Body);
    EXPECT_NEAR(r.body->support(vec({1, 0})), 1.0, 1e-9);
    EXPECT_NEAR(r.body->support(vec({0, -1})), 1.0, 1e-9);
    // Rays spaced 2pi/128 apart miss the corners by at most ~tan(2pi/128).
    const double coarse = support_distance(*r.body, square_2d(), 400);
    EXPECT_LT(coarse, std::tan(2 * kPi / 128));
    const auto fine = slice(shapes::cube(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 0.5})), {.rays = 512});
    EXPECT_LT(support_distance(*fine.body, square_2d(), 400), coarse / 3);
    const auto top = slice(shapes::cube(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 1.5})));
    EXPECT_EQ(top.status, SliceStatus::Empty);
    const auto apex = slice(shapes::cross_polytope(3), Subspace::hyperplane(vec({0, 0, 1}), vec({0, 0, 1})));
    EXPECT_EQ(apex.status, SliceStatus::Point);
}

TEST(Slice, CentralSlicesOfSymmetricBodiesAreSymmetric) {
    Rng rng(12);
    const auto body = shapes::random_symmetric_polytope(3, 30, rng);
    const auto r = slice(body, Subspace::hyperplane(gaussian_vector(3, rng)), {.rays = 40});
    ASSERT_EQ(r.status, SliceStatus::Body);
    EXPECT_TRUE(r.body->symmetric());
    EXPECT_NO_THROW(ConvexBody::point_cloud(r.body->as<PointCloud>()->points, true));
    const auto rev = slice(shapes::capped_ball(3), Subspace::hyperplane(gaussian_vector(3, rng)), {.rays = 40});
    ASSERT_EQ(rev.status, SliceStatus::Body);
    const Matrix dirs = sample_directions(2, 50, 3);
    EXPECT_LE((rev.body->support_many(dirs) - rev.body->support_many(-dirs)).cwiseAbs().maxCoeff(), 1e-10);
}

// ------------------------------------------------------ support_distance

TEST(SupportDistance, Examples) {
    const auto cube = shapes::cube(3);
    EXPECT_EQ(support_distance(cube, cube, 500), 0.0);
    EXPECT_NEAR(support_distance(shapes::unit_ball(3), ConvexBody::ellipsoid(Ellipsoid::ball(3, 2.0)), 500), 1.0,
                1e-14);
    // The gap h_ball - h_cube = sqrt(3) - <max vertex, u> peaks at ±e_i.
    Matrix axes(3, 6);
    axes << Matrix::Identity(3, 3), -Matrix::Identity(3, 3);
    const auto big_ball = ConvexBody::ellipsoid(Ellipsoid::ball(3, std::sqrt(3.0)));
    EXPECT_NEAR(support_distance(cube, big_ball, axes), std::sqrt(3.0) - 1.0, 1e-14);
    const double dense = support_distance(cube, big_ball, 20000);
    EXPECT_LE(dense, std::sqrt(3.0) - 1.0 + 1e-14);
    // The gap falls off like |u_2| + |u_3| near e_1; 20000 directions come
    // within ~0.02 rad of each axis.
    EXPECT_NEAR(dense, std::sqrt(3.0) - 1.0, 0.02 * std::sqrt(2.0));
    EXPECT_THROW((void)support_distance(cube, disk_2d(), 10), GeometryError);
}

TEST(Directions, DeterministicAndUnit) {
    for (Eigen::Index d : {2, 3, 5}) {
        const Matrix a = sample_directions(d, 100, 7);
        const Matrix b = sample_directions(d, 100, 7);
        EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LT((a.colwise().norm().array() - 1.0).abs().maxCoeff(), 1e-14);
    }
}
