#include <gtest/gtest.h>

#include "affrev/canonical.hpp"
#include "affrev/shapes.hpp"

#include <cmath>

using namespace affrev;

namespace {

Matrix square_vertices() {
    Matrix v(2, 4);
    v << 1, 1, -1, -1, 1, -1, 1, -1;
    return v;
}

double max_norm(const Ellipsoid& e, const Matrix& pts) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) worst = std::max(worst, e.norm_of(pts.col(i)));
    return worst;
}

// Best centered ellipse {a x^2 + 2 b x y + c y^2 <= 1} around the square by
// grid search: for fixed (a, b) the largest feasible c is 1 - a - 2|b|.
Matrix brute_force_square_shape(int steps) {
    double best_det = 0.0;
    Matrix best = Matrix::Zero(2, 2);
    for (int i = 1; i < steps; ++i) {
        for (int j = -steps; j <= steps; ++j) {
            const double a = static_cast<double>(i) / steps;
            const double b = 0.5 * static_cast<double>(j) / steps;
            const double c = 1.0 - a - 2.0 * std::abs(b);
            const double det = a * c - b * b;
            if (c > 0 && det > best_det) {
                best_det = det;
                best << a, b, b, c;
            }
        }
    }
    return best;
}

// Smallest-area enclosing ellipse found by random search over centers and
// shapes, each scaled to just contain the points.
double brute_force_area(const Matrix& pts, Rng& rng, int samples) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Vector mean = pts.rowwise().mean();
    const double spread = (pts.colwise() - mean).cwiseAbs().maxCoeff();
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Vector c(2);
        c << mean[0] + 0.5 * spread * gauss(rng), mean[1] + 0.5 * spread * gauss(rng);
        Matrix l(2, 2);
        l << std::exp(gauss(rng)), 0.0, gauss(rng), std::exp(gauss(rng));
        const Matrix q = l * l.transpose();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < pts.cols(); ++i) {
            const Vector d = pts.col(i) - c;
            worst = std::max(worst, d.dot(q * d));
        }
        best = std::min(best, kPi * worst / std::sqrt(q.determinant()));
    }
    return best;
}

}  // namespace

TEST(Mvee, CrossPolytopeCenteredIsUnitBall) {
    const Matrix pts = shapes::cross_polytope(3).as<PointCloud>()->points;
    const auto r = mvee(pts, 1e-7, true);
    EXPECT_LE(r.dual_gap, 1e-7);
    EXPECT_GE(r.dual_gap, 0.0);
    EXPECT_LT((r.ellipsoid.shape() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(r.ellipsoid.center().norm(), 1e-15);
}

TEST(Mvee, SquareMatchesBruteForceGrid) {
    const Matrix oracle = brute_force_square_shape(400);
    // The grid optimum is the disk of radius sqrt(2): Q = I / 2.
    EXPECT_LT((oracle - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
    const auto r = mvee(square_vertices(), 1e-7, true);
    EXPECT_LE(r.dual_gap, 1e-7);
    EXPECT_LT((r.ellipsoid.shape() - oracle).cwiseAbs().maxCoeff(), 1e-6);
    // Every vertex on the boundary.
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(r.ellipsoid.norm_of(square_vertices().col(i)), 1.0, 1e-7);
}

TEST(Mvee, GeneralSquareIsCentered) {
    Matrix pts = square_vertices();
    pts.colwise() += Vector::Constant(2, 3.0);
    const auto r = mvee(pts, 1e-7, false);
    EXPECT_LT((r.ellipsoid.center() - Vector::Constant(2, 3.0)).norm(), 1e-6);
    EXPECT_LT((r.ellipsoid.shape() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Mvee, EquivarianceOnCrossPolytope) {
    Rng rng(14);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = random_conditioned_matrix(3, 20, rng);
        const Matrix pts = a * shapes::cross_polytope(3).as<PointCloud>()->points;
        const auto r = mvee(pts, 1e-7, true);
        const auto image = map_body(shapes::unit_ball(3), a, Vector::Zero(3));
        EXPECT_LE(support_distance(ConvexBody::ellipsoid(r.ellipsoid), image, 2000), 1e-5);
    }
}

TEST(Mvee, RejectsDegeneratePoints) {
    Matrix flat(3, 5);
    flat << 1, 2, 3, 4, 5, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0;
    try {
        (void)mvee(flat);
        FAIL() << "expected an error";
    } catch (const GeometryError& e) {
        EXPECT_STREQ(e.what(), "points do not span");
    }
    Matrix line(2, 3);
    line << 0, 1, 2, 0, 1, 2;
    EXPECT_THROW((void)mvee(line, 1e-7, true), GeometryError);
    EXPECT_THROW((void)mvee(square_vertices(), 0.0), GeometryError);
}

TEST(Mvee, ContainmentAndGapOnRandomClouds) {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        Matrix pts(n, 30 + 10 * trial);
        for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) = gaussian_vector(n, rng);
        for (bool centered : {false, true}) {
            const double eps = 1e-7;
            const auto r = mvee(pts, eps, centered);
            EXPECT_GE(r.dual_gap, 0.0);
            EXPECT_LE(r.dual_gap, eps);
            EXPECT_LE(max_norm(r.ellipsoid, pts), 1.0 + eps);
            if (centered) {
                EXPECT_LE(max_norm(r.ellipsoid, -pts), 1.0 + eps);
            }
        }
    }
}

TEST(Mvee, Deterministic) {
    Rng rng(2);
    const auto body = shapes::random_symmetric_polytope(4, 40, rng);
    const auto a = mvee(body, 1e-7, true);
    const auto b = mvee(body, 1e-7, true);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ((a.ellipsoid.shape() - b.ellipsoid.shape()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mvee, SymmetricJohnCondition) {
    Rng rng(8);
    for (int trial = 0; trial < 8; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const auto body = shapes::random_symmetric_polytope(n, 12 + 6 * trial, rng);
        const auto e = mvee(body, 1e-7, true).ellipsoid;
        const Matrix dirs = sample_directions(n, 500, static_cast<std::uint64_t>(trial));
        const Vector hk = body.support_many(dirs);
        for (Eigen::Index i = 0; i < dirs.cols(); ++i)
            EXPECT_GE(hk[i] - e.support(dirs.col(i)) / std::sqrt(static_cast<double>(n)), -1e-6);
    }
}

TEST(Mvee, AffineEquivariance) {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + trial % 3;
        Matrix pts(n, 25);
        for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) = gaussian_vector(n, rng);
        const Matrix a = random_conditioned_matrix(n, 50, rng);
        const Vector t = gaussian_vector(n, rng);
        const auto base = mvee(pts, 1e-7, false).ellipsoid;
        const auto moved = mvee(Matrix((a * pts).colwise() + t), 1e-7, false).ellipsoid;
        const auto expected = map_body(ConvexBody::ellipsoid(base, false), a, t);
        EXPECT_LE(support_distance(ConvexBody::ellipsoid(moved, false), expected, 2000), 1e-5);
    }
}

TEST(Mvee, VolumeNotAboveBruteForce) {
    Rng rng(23);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index m = 3 + trial % 6;
        Matrix pts(2, m);
        for (Eigen::Index i = 0; i < m; ++i) pts.col(i) = gaussian_vector(2, rng);
        const double area = mvee(pts, 1e-7, false).ellipsoid.volume();
        const double brute = brute_force_area(pts, rng, 20000);
        EXPECT_LE(area, brute * (1.0 + 1e-6));
    }
}

TEST(Mvee, IllConditionedFlag) {
    Matrix pts = shapes::cross_polytope(2).as<PointCloud>()->points;
    pts.row(1) *= 1e-5;
    const auto r = mvee(pts, 1e-7, true);
    EXPECT_TRUE(r.ill_conditioned);
    EXPECT_GT(r.condition, 1e8);
    EXPECT_FALSE(mvee(shapes::cube(2), 1e-7, true).ill_conditioned);
}

TEST(BallMax, MatchesDenseSearchIncludingHardCase) {
    Matrix b(2, 2);
    b << 1, 0, 0, 2;
    Vector off(2);
    off << 1, 0;
    // (cos t + 1)^2 + 4 sin^2 t peaks at cos t = 1/3 with value 16/3.
    const auto hard = detail::maximize_on_ball(b, off);
    EXPECT_NEAR(hard.value, 16.0 / 3.0, 1e-12);
    EXPECT_NEAR(hard.y[0], 1.0 / 3.0, 1e-9);
    EXPECT_NEAR(hard.y.norm(), 1.0, 1e-12);

    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index k = 2 + trial % 2;
        const Matrix bm = Matrix::NullaryExpr(3, k, [&] { return std::normal_distribution<double>()(rng); });
        const Vector bv = gaussian_vector(3, rng);
        const auto r = detail::maximize_on_ball(bm, bv);
        const Matrix dirs = sample_directions(k, 20000, 0);
        double dense = 0.0;
        for (Eigen::Index i = 0; i < dirs.cols(); ++i) dense = std::max(dense, (bm * dirs.col(i) + bv).squaredNorm());
        EXPECT_GE(r.value, dense - 1e-12);
        EXPECT_LE(r.value, dense * (1.0 + 1e-3));
    }
}

TEST(Mvee, CappedBallIsSpheroid) {
    // Any enclosing ellipsoid has semi-axes >= 1 across and >= 2 along the
    // caps; the spheroid (1, 1, 2) already contains the hull.
    const auto r = mvee(shapes::capped_ball(3), 1e-7, true);
    Matrix expected = Matrix::Identity(3, 3);
    expected(2, 2) = 0.25;
    EXPECT_LT((r.ellipsoid.shape() - expected).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(r.dual_gap, 1e-7);
}

TEST(Mvee, EllipsoidAsHullRecoversItself) {
    Rng rng(6);
    const Matrix a = random_conditioned_matrix(3, 10, rng);
    const Vector c = gaussian_vector(3, rng);
    const auto hull = ConvexBody::ellipsoid_hull({{c, a}}, Matrix(3, 0));
    const auto r = mvee(hull, 1e-7, false);
    const Ellipsoid truth = Ellipsoid::from_axes(c, a);
    EXPECT_LE(support_distance(ConvexBody::ellipsoid(r.ellipsoid, false), ConvexBody::ellipsoid(truth, false), 2000),
              1e-5);
}

TEST(Mvee, HullOfEllipsoidsAgainstDenseSampling) {
    Rng rng(13);
    std::vector<EllipsoidPiece> pieces;
    for (int i = 0; i < 3; ++i) pieces.push_back({gaussian_vector(3, rng), random_conditioned_matrix(3, 4, rng)});
    Matrix disk_axes(3, 2);
    disk_axes << 1, 0, 0, 1, 0.3, 0.2;
    pieces.push_back({gaussian_vector(3, rng), disk_axes});
    const auto hull = ConvexBody::ellipsoid_hull(pieces, Matrix(3, 0));
    const auto r = mvee(hull, 1e-7, false);
    EXPECT_LE(r.dual_gap, 1e-7);
    // Containment of the whole body: no boundary point outside.
    const Matrix boundary = hull.boundary_points(5000, 3);
    EXPECT_LE(max_norm(r.ellipsoid, boundary), 1.0 + 1e-9);
    // Dense inner sampling converges from below.
    const auto inner = mvee(boundary, 1e-7, false).ellipsoid;
    EXPECT_LE(inner.volume(), r.ellipsoid.volume() * (1.0 + 1e-6));
    EXPECT_LE(support_distance(ConvexBody::ellipsoid(inner, false), ConvexBody::ellipsoid(r.ellipsoid, false), 1000),
              2e-2);
}

TEST(Mvee, SupportSampleUsesTouchingPoints) {
    Matrix q(3, 3);
    q << 1.0, 0.1, 0.0, 0.1, 0.6, 0.0, 0.0, 0.0, 0.3;
    const Ellipsoid truth(Vector::Zero(3), q);
    const Matrix half = sample_directions(3, 2000, 2);
    Matrix dirs(3, 4000);
    dirs << half, -half;
    Vector vals(dirs.cols());
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) vals[i] = truth.support(dirs.col(i));
    const auto sampled = ConvexBody::support_sample(dirs, vals, true);
    const auto r = mvee(sampled, 1e-7, true);
    EXPECT_LE(support_distance(ConvexBody::ellipsoid(r.ellipsoid), ConvexBody::ellipsoid(truth), 1000), 1e-3);
}

// ------------------------------------------------------------ canonicalize

TEST(Canonicalize, UnitBallIsFixed) {
    const auto c = canonicalize(shapes::unit_ball(3));
    EXPECT_LT((c.map.matrix() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(c.map.translation().norm(), 1e-15);
    EXPECT_LT(support_distance(c.body, shapes::unit_ball(3), 500), 1e-14);
}

TEST(Canonicalize, EllipsoidMapIsSquareRoot) {
    Matrix q(3, 3);
    q << 2.0, 0.3, 0.0, 0.3, 1.0, 0.2, 0.0, 0.2, 0.5;
    const auto c = canonicalize(ConvexBody::ellipsoid(Ellipsoid(Vector::Zero(3), q)));
    EXPECT_LT((c.map.matrix() * c.map.matrix() - q).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((c.map.matrix() - c.map.matrix().transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(support_distance(c.body, shapes::unit_ball(3), 500), 1e-12);
}

TEST(Canonicalize, CubeScaledOntoSphere) {
    const auto c = canonicalize(shapes::cube(3));
    EXPECT_LT((c.map.matrix() - Matrix::Identity(3, 3) / std::sqrt(3.0)).cwiseAbs().maxCoeff(), 1e-7);
    const Matrix verts = c.body.as<PointCloud>()->points;
    ASSERT_EQ(verts.cols(), 8);
    for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(verts.col(i).norm(), 1.0, 1e-7);
    EXPECT_TRUE(c.body.symmetric());
}

TEST(Canonicalize, Idempotent) {
    Rng rng(29);
    for (int trial = 0; trial < 6; ++trial) {
        const Eigen::Index n = 2 + trial % 3;
        const auto body = trial % 2 == 0 ? shapes::random_symmetric_polytope(n, 20, rng)
                                         : ConvexBody::point_cloud([&] {
                                               Matrix p(n, 20);
                                               for (Eigen::Index i = 0; i < 20; ++i) p.col(i) = gaussian_vector(n, rng);
                                               return p;
                                           }());
        const auto once = canonicalize(body);
        const auto twice = canonicalize(once.body);
        const Matrix w = twice.map.matrix();
        EXPECT_LE((w.transpose() * w - Matrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-5);
        EXPECT_LE(twice.map.translation().norm(), 1e-5);
    }
}

TEST(Canonicalize, AffineImageHasOrthogonalDiscrepancy) {
    Rng rng(30);
    const auto body = shapes::random_symmetric_polytope(3, 24, rng);
    const Matrix a = random_conditioned_matrix(3, 30, rng);
    const auto c1 = canonicalize(body);
    const auto c2 = canonicalize(map_body(body, a, Vector::Zero(3)));
    // f2 ∘ A ∘ f1^{-1} preserves the unit ball, so it is orthogonal.
    const Matrix w = c2.map.matrix() * a * c1.map.inverse().matrix();
    EXPECT_LE((w.transpose() * w - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-5);
}

// ------------------------------------------------------------ is_ellipsoid

TEST(IsEllipsoid, UnitBall) {
    const auto v = is_ellipsoid(shapes::unit_ball(3));
    EXPECT_TRUE(v.is_ellipsoid);
    EXPECT_LE(v.residual, 1e-8);
}

TEST(IsEllipsoid, AffineImageOfBall) {
    Rng rng(7);
    for (int trial = 0; trial < 4; ++trial) {
        const Matrix a = random_conditioned_matrix(3, 20, rng);
        const auto v = is_ellipsoid(ConvexBody::ellipsoid_hull({{gaussian_vector(3, rng), a}}, Matrix(3, 0)));
        EXPECT_TRUE(v.is_ellipsoid);
        EXPECT_LE(v.residual, 1e-6);
    }
}

TEST(IsEllipsoid, CubeResidualAtFaceNormal) {
    const auto v = is_ellipsoid(shapes::cube(3));
    EXPECT_FALSE(v.is_ellipsoid);
    // MVEE is the radius-sqrt(3) ball; the worst gap is at e_1.
    const double oracle = (std::sqrt(3.0) - shapes::cube(3).support(Vector::Unit(3, 0))) / std::sqrt(3.0);
    EXPECT_NEAR(oracle, 1.0 - 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(v.residual, oracle, 1e-6);
}

TEST(IsEllipsoid, DilationAndTranslationInvariant) {
    Rng rng(3);
    const auto body = shapes::random_symmetric_polytope(3, 16, rng);
    const auto base = is_ellipsoid(body);
    const auto moved = is_ellipsoid(map_body(body, 3.5 * Matrix::Identity(3, 3), Vector::Constant(3, 2.0)));
    EXPECT_NEAR(base.residual, moved.residual, 1e-5);
}
