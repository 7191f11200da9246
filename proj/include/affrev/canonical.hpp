#pragma once

#include "affrev/mvee.hpp"
#include "affrev/operators.hpp"

namespace affrev {

struct Canonical {
    ConvexBody body;  // map(K); its MVEE is the unit ball
    AffineMap map;
    MveeResult fit;   // MVEE of the input body
};

// Affine normalization sending the minimal ellipsoid (centered one for
// symmetric bodies) onto the unit ball: f(x) = Q^{1/2}(x - c).
inline Canonical canonicalize(const ConvexBody& body, double eps, bool centered) {
    MveeResult fit = mvee(body, eps, centered);
    const Matrix root = symmetric_sqrt(fit.ellipsoid.shape());
    AffineMap f(root, -root * fit.ellipsoid.center());
    return {apply(f, body), std::move(f), std::move(fit)};
}

inline Canonical canonicalize(const ConvexBody& body, double eps = kMveeDefaultEps) {
    return canonicalize(body, eps, body.symmetric());
}

struct EllipsoidVerdict {
    bool is_ellipsoid = false;
    double residual = 0.0;
    Ellipsoid fit;
};

struct EllipsoidTestOptions {
    double tol = 1e-3;
    Eigen::Index dirs = 2000;
    std::uint64_t seed = 0;
    double eps = kMveeDefaultEps;
};

// Relative support gap to the minimal ellipsoid E:
//   max_u (h_E(u) - h_K(u)) / (h_E(u) - <c_E, u>).
// The denominator is E's half-width about its own center, so the residual is
// dilation- and translation-invariant.
inline EllipsoidVerdict is_ellipsoid(const ConvexBody& body, const EllipsoidTestOptions& opt = {}) {
    if (const auto* e = body.as<Ellipsoid>()) return {0.0 <= opt.tol, 0.0, *e};
    const auto n = body.dim();
    const Ellipsoid e = mvee(body, opt.eps, body.symmetric()).ellipsoid;
    const Matrix sampled = sample_directions(n, opt.dirs, opt.seed);
    const Matrix principal = e.principal_axes().second;
    Matrix dirs(n, sampled.cols() + 4 * n);
    dirs << sampled, Matrix::Identity(n, n), -Matrix::Identity(n, n), principal, -principal;
    const Vector hk = body.support_many(dirs);
    double residual = 0.0;
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) {
        const Vector u = dirs.col(i);
        const double half = std::sqrt(u.dot(e.inverse_shape() * u));
        residual = std::max(residual, (e.support(u) - hk[i]) / half);
    }
    return {residual <= opt.tol, residual, e};
}

}  // namespace affrev
