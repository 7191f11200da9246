#pragma once

#include "affrev/canonical.hpp"
#include "affrev/optimize.hpp"

namespace affrev {

struct SymmetryCenter {
    Vector center;
    double residual = 0.0;
};

// Chebyshev fit of c in h(u) - h(-u) = 2<c, u> over sampled half-directions:
// minimize t subject to |h(u_i) - h(-u_i) - 2<c, u_i>| <= t, an LP.
inline SymmetryCenter central_symmetry_center(const ConvexBody& body, Eigen::Index count = 128,
                                              std::uint64_t seed = 0) {
    const auto n = body.dim();
    const Matrix grid = projective_grid(n, count, seed);
    Matrix dirs(n, grid.cols() + n);
    dirs << grid, Matrix::Identity(n, n);
    const auto m = dirs.cols();
    const Vector b = body.support_many(dirs) - body.support_many(-dirs);

    // Variables [c+, c-, t] >= 0; maximize -t.
    Matrix a_ub = Matrix::Zero(2 * m, 2 * n + 1);
    Vector b_ub(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Vector u = 2.0 * dirs.col(i);
        a_ub.row(i).head(n) = -u.transpose();
        a_ub.row(i).segment(n, n) = u.transpose();
        a_ub(i, 2 * n) = -1.0;
        b_ub[i] = -b[i];
        a_ub.row(m + i).head(n) = u.transpose();
        a_ub.row(m + i).segment(n, n) = -u.transpose();
        a_ub(m + i, 2 * n) = -1.0;
        b_ub[m + i] = b[i];
    }
    Vector c = Vector::Zero(2 * n + 1);
    c[2 * n] = -1.0;
    const LpResult r = solve_lp(c, a_ub, b_ub, Matrix(0, 2 * n + 1), Vector(0), 1e-12);
    if (r.status != LpStatus::Optimal) throw GeometryError("symmetry center LP failed");
    const Vector center = r.x.head(n) - r.x.segment(n, n);
    return {center, (b - 2.0 * dirs.transpose() * center).cwiseAbs().maxCoeff()};
}

struct EquivalenceOptions {
    double tol = 1e-3;
    int restarts = 50;
    std::uint64_t seed = 0;
    Eigen::Index dirs = 0;  // 0: chosen by dimension
    double eps = kMveeDefaultEps;
};

struct EquivalenceVerdict {
    bool equivalent = false;
    double residual = 0.0;  // support distance in the canonical frame of K2
    AffineMap witness;      // best map found, K1 -> K2
    int restarts_used = 0;
    Matrix alignment;       // orthogonal matrix between the canonical forms
};

namespace detail {

inline Eigen::Index search_directions(Eigen::Index n) {
    switch (n) {
        case 1: return 2;
        case 2: return 256;
        case 3: return 512;
        case 4: return 1024;
        default: return 1536;
    }
}

// Smooth bodies given by samples are searched through their touching points.
inline ConvexBody searchable(const ConvexBody& body) {
    if (body.as<SupportSample>() == nullptr) return body;
    return ConvexBody::trusted(body.dim(), PointCloud{body.boundary_points()}, body.symmetric());
}

// Second moment of the support function, W-equivariant up to sampling.
inline Matrix support_moment(const ConvexBody& body, const Matrix& dirs) {
    const Vector h = body.support_many(dirs);
    return dirs * h.cwiseAbs2().asDiagonal() * dirs.transpose();
}

// Points of a cloud that attain the support in some sampled direction.
inline Matrix extreme_points(const PointCloud& cloud, const Matrix& dirs) {
    const Matrix scores = cloud.points.transpose() * dirs;
    std::vector<Eigen::Index> hit;
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
        Eigen::Index arg = 0;
        scores.col(j).maxCoeff(&arg);
        hit.push_back(arg);
    }
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    Matrix out(cloud.points.rows(), static_cast<Eigen::Index>(hit.size()));
    for (std::size_t i = 0; i < hit.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = cloud.points.col(hit[i]);
    return out;
}

// Candidate orthogonal maps between canonical polytopes: a well-spread
// n-tuple of vertices of K1 is matched against n-tuples of vertices of K2
// with the same Gram matrix (backtracking), and W = B A^{-1} is projected
// onto O(n).
inline std::vector<Matrix> vertex_matchings(const ConvexBody& k1, const ConvexBody& k2, const Matrix& dirs,
                                            double gram_tol, std::size_t limit) {
    const auto* p1 = k1.as<PointCloud>();
    const auto* p2 = k2.as<PointCloud>();
    if (p1 == nullptr || p2 == nullptr) return {};
    const auto n = k1.dim();
    // Small clouds are used whole: sampled directions can miss thin normal
    // cones differently in the two frames.
    const Matrix v1 = p1->points.cols() <= 256 ? p1->points : extreme_points(*p1, dirs);
    const Matrix v2 = p2->points.cols() <= 256 ? p2->points : extreme_points(*p2, dirs);

    Matrix a(n, n);
    {
        Matrix basis(n, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = -1.0;
            Eigen::Index arg = -1;
            for (Eigen::Index j = 0; j < v1.cols(); ++j) {
                Vector r = v1.col(j);
                if (basis.cols() > 0) r -= basis * (basis.transpose() * r);
                if (r.norm() > best) {
                    best = r.norm();
                    arg = j;
                }
            }
            if (best < 1e-3) return {};
            a.col(i) = v1.col(arg);
            Vector r = a.col(i);
            if (basis.cols() > 0) r -= basis * (basis.transpose() * r);
            basis.conservativeResize(n, basis.cols() + 1);
            basis.col(basis.cols() - 1) = r.normalized();
        }
    }
    const Matrix gram_a = a.transpose() * a;
    const Matrix gram_2 = v2.transpose() * v2;
    const Eigen::PartialPivLU<Matrix> at_lu(a.transpose());

    std::vector<Matrix> out;
    std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
    std::function<void(Eigen::Index)> extend = [&](Eigen::Index i) {
        if (out.size() >= limit) return;
        if (i == n) {
            Matrix b(n, n);
            for (Eigen::Index c = 0; c < n; ++c) b.col(c) = v2.col(pick[static_cast<std::size_t>(c)]);
            const Matrix w = at_lu.solve(b.transpose()).transpose();
            Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
            out.push_back(svd.matrixU() * svd.matrixV().transpose());
            return;
        }
        for (Eigen::Index j = 0; j < v2.cols(); ++j) {
            bool fits = true;
            for (Eigen::Index c = 0; c <= i && fits; ++c) {
                const Eigen::Index other = c == i ? j : pick[static_cast<std::size_t>(c)];
                fits = std::abs(gram_2(j, other) - gram_a(i, c)) <= gram_tol;
            }
            if (!fits) continue;
            pick[static_cast<std::size_t>(i)] = j;
            extend(i + 1);
        }
    };
    extend(0);
    return out;
}

struct Alignment {
    Matrix w;
    double value = std::numeric_limits<double>::infinity();
    int restarts = 0;
};

// Multi-start search over O(n) for min_W max_u |h_{K1}(W^T u) - h_{K2}(u)|.
inline Alignment align_orthogonal(const ConvexBody& k1, const ConvexBody& k2, const EquivalenceOptions& opt) {
    const auto n = k1.dim();
    const Eigen::Index count = opt.dirs > 0 ? opt.dirs : search_directions(n);
    const Matrix dirs = sample_directions(n, count, mix_seed(opt.seed, 0x5eed));
    const Vector h2 = k2.support_many(dirs);
    const Eigen::Index params = n * (n - 1) / 2;

    auto residual = [&](const Matrix& w, bool mean_square) {
        const Vector diff = k1.support_many(w.transpose() * dirs) - h2;
        return mean_square ? std::sqrt(diff.squaredNorm() / static_cast<double>(diff.size())) : diff.cwiseAbs().maxCoeff();
    };
    auto chart = [&](const Matrix& w0, const Vector& theta) -> Matrix {
        return params == 0 ? w0 : Matrix(w0 * cayley(skew_from_params(theta, n)));
    };

    // Starting points: sign patterns between support-moment eigenbases
    // (ordered by their initial residual), then Haar-random matrices
    // alternating between the two components of O(n).
    std::vector<Matrix> starts;
    {
        const Matrix dense = sample_directions(n, 4 * count, mix_seed(opt.seed, 0x30e));
        Eigen::SelfAdjointEigenSolver<Matrix> e1(support_moment(k1, dense));
        Eigen::SelfAdjointEigenSolver<Matrix> e2(support_moment(k2, dense));
        std::vector<std::pair<double, Matrix>> seeded;
        for (Matrix& w : vertex_matchings(k1, k2, dense, 4.0 * opt.tol, 256)) seeded.emplace_back(residual(w, false), std::move(w));
        const int patterns = n <= 5 ? (1 << n) : 32;
        for (int mask = 0; mask < patterns; ++mask) {
            Vector signs(n);
            for (Eigen::Index i = 0; i < n; ++i) signs[i] = (mask >> i) & 1 ? -1.0 : 1.0;
            const Matrix w = e2.eigenvectors() * signs.asDiagonal() * e1.eigenvectors().transpose();
            seeded.emplace_back(residual(w, false), w);
        }
        std::stable_sort(seeded.begin(), seeded.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto keep = std::min<std::size_t>(seeded.size(), static_cast<std::size_t>(std::max(1, opt.restarts / 2)));
        for (std::size_t i = 0; i < keep; ++i) starts.push_back(seeded[i].second);
    }
    for (int r = 0; static_cast<int>(starts.size()) < opt.restarts; ++r) {
        Rng rng(mix_seed(opt.seed, static_cast<std::uint64_t>(r) + 1));
        Matrix w = random_orthogonal(n, rng);
        const bool want_negative = r % 2 == 1;
        if ((w.determinant() < 0) != want_negative) w.col(0) = -w.col(0);
        starts.push_back(w);
    }

    Alignment best;
    const double stop = opt.tol * 1e-2;
    const int budget = static_cast<int>(150 * std::max<Eigen::Index>(params, 1));
    for (const Matrix& w0 : starts) {
        ++best.restarts;
        Matrix w = w0;
        if (params > 0) {
            NelderMeadOptions smooth;
            smooth.initial_step = 0.3;
            smooth.max_evaluations = budget;
            const auto phase1 = nelder_mead([&](const Vector& t) { return residual(chart(w0, t), true); },
                                            Vector::Zero(params), smooth);
            w = chart(w0, phase1.x);
            double current = residual(w, false);
            // Restarts stop early once a good match is found, but the local
            // polish always runs to convergence.
            for (double step : {0.05, 0.01, 0.002, 4e-4}) {
                NelderMeadOptions sharp;
                sharp.initial_step = step;
                sharp.max_evaluations = budget;
                const Matrix base = w;
                const auto phase2 = nelder_mead([&](const Vector& t) { return residual(chart(base, t), false); },
                                                Vector::Zero(params), sharp);
                if (phase2.value < current) {
                    current = phase2.value;
                    w = chart(base, phase2.x);
                }
            }
        }
        const double value = residual(w, false);
        if (value < best.value) {
            best.value = value;
            best.w = w;
        }
        if (best.value <= stop) break;
    }
    return best;
}

inline EquivalenceVerdict decide(const ConvexBody& k1, const ConvexBody& k2, const EquivalenceOptions& opt,
                                 bool centered, bool linear_only) {
    if (k1.dim() != k2.dim()) throw GeometryError("dimension mismatch");
    const auto n = k1.dim();
    const Canonical c1 = canonicalize(searchable(k1), opt.eps, centered);
    const Canonical c2 = canonicalize(searchable(k2), opt.eps, centered);
    const Alignment a = align_orthogonal(c1.body, c2.body, opt);

    // g = f2^{-1} ∘ W ∘ f1; a linear equivalence carries no translation.
    AffineMap g = c2.map.inverse().compose(AffineMap::linear(a.w)).compose(c1.map);
    if (linear_only) g = AffineMap::linear(g.matrix());

    const Eigen::Index count = opt.dirs > 0 ? opt.dirs : search_directions(n);
    Matrix check(n, 3 * count);
    check << sample_directions(n, count, mix_seed(opt.seed, 0x5eed)),
        sample_directions(n, 2 * count, mix_seed(opt.seed, 0xc4ec));
    const ConvexBody moved = apply(c2.map.compose(g), searchable(k1));
    EquivalenceVerdict v;
    v.residual = support_distance(moved, c2.body, check);
    v.equivalent = v.residual <= opt.tol;
    v.witness = std::move(g);
    v.restarts_used = a.restarts;
    v.alignment = a.w;
    return v;
}

}  // namespace detail

// Is there an invertible linear g with g(K1) = K2? Both bodies are
// canonicalized (centered MVEE when both are symmetric); any linear
// equivalence of canonical forms is orthogonal, which is searched for.
inline EquivalenceVerdict linear_equivalent(const ConvexBody& k1, const ConvexBody& k2,
                                            const EquivalenceOptions& opt = {}) {
    const bool both_symmetric = k1.symmetric() && k2.symmetric();
    return detail::decide(k1, k2, opt, both_symmetric, !both_symmetric);
}

// Affine version: each body is first translated to its symmetry center
// when it is centrally symmetric (to tolerance), otherwise to the center of
// its minimal ellipsoid.
inline EquivalenceVerdict affine_equivalent(const ConvexBody& k1, const ConvexBody& k2,
                                            const EquivalenceOptions& opt = {}) {
    if (k1.dim() != k2.dim()) throw GeometryError("dimension mismatch");
    auto center_of = [&](const ConvexBody& k) -> Vector {
        const SymmetryCenter sc = central_symmetry_center(k);
        if (sc.residual <= opt.tol * k.diameter()) return sc.center;
        return mvee(detail::searchable(k), opt.eps, false).ellipsoid.center();
    };
    const Vector t1 = center_of(k1);
    const Vector t2 = center_of(k2);
    const auto n = k1.dim();
    const AffineMap s1(Matrix::Identity(n, n), -t1);
    const AffineMap s2(Matrix::Identity(n, n), -t2);
    EquivalenceVerdict v = detail::decide(apply(s1, k1), apply(s2, k2), opt, false, false);
    v.witness = s2.inverse().compose(v.witness).compose(s1);
    return v;
}

}  // namespace affrev
