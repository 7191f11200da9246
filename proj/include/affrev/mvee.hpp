#pragma once

#include "affrev/body.hpp"

#include <vector>

namespace affrev {

struct MveeResult {
    Ellipsoid ellipsoid;
    double dual_gap = 0.0;
    int iterations = 0;
    double condition = 1.0;      // of the shape matrix
    bool ill_conditioned = false;  // condition > 1e8
};

inline constexpr double kMveeDefaultEps = 1e-7;
inline constexpr double kIllConditioned = 1e8;

namespace detail {

struct TyState {
    Vector weights;
    Matrix m_inv;  // (sum_i w_i y_i y_i^T)^{-1}
    Vector g;      // g_i = y_i^T m_inv y_i
    double eps_plus = 0.0;
    double eps_minus = 0.0;
    int iterations = 0;
};

inline void ty_refresh(const Matrix& y, TyState& s) {
    const Matrix m = y * s.weights.asDiagonal() * y.transpose();
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) throw GeometryError("points do not span");
    s.m_inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
    s.m_inv = 0.5 * (s.m_inv + s.m_inv.transpose());
    s.g = (y.array() * (s.m_inv * y).array()).colwise().sum().transpose();
}

// Todd-Yildirim coordinate ascent with away steps for
//   max log det(sum_i w_i y_i y_i^T),  w in the simplex.
// Stops when g_i <= d(1 + eps) everywhere and g_i >= d(1 - eps) on the support.
inline void todd_yildirim(const Matrix& y, TyState& s, double eps, int max_iterations) {
    const auto d = static_cast<double>(y.rows());
    const Eigen::Index m = y.cols();
    ty_refresh(y, s);
    for (int it = 0;; ++it) {
        Eigen::Index up = 0;
        Eigen::Index down = -1;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (s.g[i] > s.g[up]) up = i;
            if (s.weights[i] > 0 && (down < 0 || s.g[i] < s.g[down])) down = i;
        }
        s.eps_plus = s.g[up] / d - 1.0;
        s.eps_minus = 1.0 - s.g[down] / d;
        if (std::max(s.eps_plus, s.eps_minus) <= eps || it >= max_iterations) break;
        ++s.iterations;

        Eigen::Index j = up;
        double lambda = 0.0;
        bool drop = false;
        if (s.eps_plus >= s.eps_minus) {
            lambda = (s.g[up] - d) / (d * (s.g[up] - 1.0));
        } else {
            j = down;
            const double wj = s.weights[j];
            const double floor = -wj / (1.0 - wj);
            const double gj = s.g[j];
            lambda = gj > 1.0 ? (gj - d) / (d * (gj - 1.0)) : floor;
            if (lambda <= floor) {
                lambda = floor;
                drop = true;
            }
        }

        const Vector w = s.m_inv * y.col(j);
        const double denom = 1.0 - lambda + lambda * s.g[j];
        const Vector proj = y.transpose() * w;
        s.m_inv = (s.m_inv - (lambda / denom) * w * w.transpose()) / (1.0 - lambda);
        s.g = (s.g - (lambda / denom) * proj.cwiseAbs2()) / (1.0 - lambda);
        s.weights *= (1.0 - lambda);
        s.weights[j] += lambda;
        if (drop) s.weights[j] = 0.0;
        if (s.iterations % 256 == 0) ty_refresh(y, s);
    }
    ty_refresh(y, s);
}

// Log-barrier Newton method for the same problem,
//   max log det M(w) + mu * sum log w_i  over the simplex, mu -> 0,
// for small working sets where coordinate ascent crawls (many points
// touching the optimum, e.g. along a circle). Finishes with TY polishing.
inline void barrier_newton(const Matrix& y, TyState& s, double eps, int max_iterations) {
    const Eigen::Index m = y.cols();
    const auto d = static_cast<double>(y.rows());
    Vector w = Vector::Constant(m, 1.0 / static_cast<double>(m));
    auto merit = [&](const Vector& v, double mu, double& out) {
        Eigen::LLT<Matrix> llt(y * v.asDiagonal() * y.transpose());
        if (llt.info() != Eigen::Success) return false;
        const Matrix l = llt.matrixL();
        out = 2.0 * l.diagonal().array().log().sum() + mu * v.array().log().sum();
        return true;
    };
    const double mu_min = 1e-3 * eps * d / static_cast<double>(m);
    for (double mu = 1.0 / static_cast<double>(m);; mu = std::max(0.05 * mu, mu_min)) {
        for (int newton = 0; newton < 100; ++newton) {
            ++s.iterations;
            const Matrix minv = (y * w.asDiagonal() * y.transpose()).llt().solve(Matrix::Identity(y.rows(), y.rows()));
            const Matrix gram = y.transpose() * minv * y;
            const Vector grad = gram.diagonal() + mu * w.cwiseInverse();
            Matrix neg_h = gram.cwiseAbs2();
            neg_h.diagonal() += mu * w.cwiseInverse().cwiseAbs2();
            const Eigen::LDLT<Matrix> ldlt(neg_h);
            const Vector a = ldlt.solve(grad);
            const Vector b = ldlt.solve(Vector::Ones(m));
            const Vector step = a - (a.sum() / b.sum()) * b;
            const double decrement = step.dot(neg_h * step);
            if (!(decrement > 1e-20)) break;
            double t = 1.0;
            for (Eigen::Index i = 0; i < m; ++i)
                if (step[i] < 0) t = std::min(t, -0.99 * w[i] / step[i]);
            double f0 = 0.0;
            merit(w, mu, f0);
            const double slope = grad.dot(step);
            Vector next;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                next = w + t * step;
                double f1 = 0.0;
                if (merit(next, mu, f1) && f1 >= f0 + 0.25 * t * slope) break;
            }
            w = next / next.sum();
            if (decrement < 1e-14) break;
        }
        if (mu <= mu_min || s.iterations >= max_iterations) break;
    }
    // Points off the optimal contact set keep weights of order mu; zero them
    // so the support is explicit, then certify with TY.
    Vector rounded = (w.array() < 1e-9).select(0.0, w);
    rounded /= rounded.sum();
    s.weights = Eigen::LLT<Matrix>(y * rounded.asDiagonal() * y.transpose()).info() == Eigen::Success ? rounded : w;
    todd_yildirim(y, s, eps, max_iterations);
}

inline void require_span(const Matrix& y) {
    Eigen::ColPivHouseholderQR<Matrix> qr(y);
    qr.setThreshold(1e-10);
    if (y.cols() == 0 || qr.rank() < y.rows()) throw GeometryError("points do not span");
}

// Lifted / centered design matrix for the TY problem.
inline Matrix design_points(const Matrix& points, bool centered) {
    if (centered) return points;
    Matrix y(points.rows() + 1, points.cols());
    y.topRows(points.rows()) = points;
    y.bottomRows(1).setOnes();
    return y;
}

// Ellipsoid from converged weights; scaled by kappa = max g so every point
// (and anything whose g is known to be <= kappa) is contained.
inline Ellipsoid ellipsoid_from_weights(const Matrix& points, const Vector& w, bool centered, double kappa) {
    const auto n = points.rows();
    if (centered) {
        const Matrix m = points * w.asDiagonal() * points.transpose();
        Matrix q = m.llt().solve(Matrix::Identity(n, n)) / kappa;
        return {Vector::Zero(n), 0.5 * (q + q.transpose())};
    }
    const Vector c = points * w;
    const Matrix sigma = points * w.asDiagonal() * points.transpose() - c * c.transpose();
    Matrix q = sigma.llt().solve(Matrix::Identity(n, n)) / (kappa - 1.0);
    return {c, 0.5 * (q + q.transpose())};
}

inline MveeResult finish(Ellipsoid e, double gap, int iterations) {
    MveeResult r;
    r.condition = condition_number(e.shape());
    r.ill_conditioned = r.condition > kIllConditioned;
    r.ellipsoid = std::move(e);
    r.dual_gap = std::max(0.0, gap);
    r.iterations = iterations;
    return r;
}

// max ||B y + b||^2 over ||y|| <= 1 (attained on the sphere since the
// objective is convex). Secular equation in the eigenbasis of B^T B,
// including the hard case.
struct BallMax {
    Vector y;
    double value = 0.0;
};

inline BallMax maximize_on_ball(const Matrix& b_mat, const Vector& b) {
    const auto k = b_mat.cols();
    if (k == 0) return {Vector(0), b.squaredNorm()};
    Eigen::SelfAdjointEigenSolver<Matrix> es(b_mat.transpose() * b_mat);
    const Vector& sigma = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    const Vector beta = v.transpose() * (b_mat.transpose() * b);
    const double smax = sigma[k - 1];
    const double gap_tol = 1e-12 * std::max(1.0, std::abs(smax));
    double top_norm2 = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        if (sigma[i] >= smax - gap_tol) top_norm2 += beta[i] * beta[i];

    auto y_at = [&](double mu) {
        Vector z(k);
        for (Eigen::Index i = 0; i < k; ++i) z[i] = beta[i] / (mu - sigma[i]);
        return z;
    };
    Vector z;
    if (top_norm2 <= 1e-28 * std::max(1.0, beta.squaredNorm())) {
        Vector z0 = Vector::Zero(k);
        for (Eigen::Index i = 0; i < k; ++i)
            if (sigma[i] < smax - gap_tol) z0[i] = beta[i] / (smax - sigma[i]);
        if (z0.squaredNorm() <= 1.0) {
            z0[k - 1] = std::sqrt(1.0 - z0.squaredNorm());
            z = z0;
        }
    }
    if (z.size() == 0) {
        double lo = smax;
        double hi = smax + beta.norm() + 1e-300;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (y_at(mid).squaredNorm() > 1.0 ? lo : hi) = mid;
        }
        z = y_at(hi);
        const double nz = z.norm();
        if (nz > 0) z /= nz;
    }
    BallMax out;
    out.y = v * z;
    out.value = (b_mat * out.y + b).squaredNorm();
    return out;
}

// Exact max of the TY function g over a piece for the current weights.
inline BallMax piece_max_g(const EllipsoidPiece& p, const Matrix& factor, const Vector& c, bool centered) {
    // g(x) = |R(x - c)|^2 (+1 when lifted) with R^T R the centered inverse.
    BallMax r = maximize_on_ball(factor * p.axes, factor * (p.center - c));
    if (!centered) r.value += 1.0;
    return r;
}

// Column generation state: each column of the working point set is either a
// fixed input point (piece < 0) or a point p.center + p.axes * y on a piece.
struct HullNode {
    int piece = -1;
    Vector y;
    bool anchor = true;  // initial discretization
};

inline MveeResult mvee_hull(const EllipsoidHull& h, double eps, bool centered, int max_iterations) {
    const auto n = h.points.rows() > 0 ? h.points.rows() : h.pieces.front().center.size();
    std::vector<HullNode> nodes;
    for (Eigen::Index i = 0; i < h.points.cols(); ++i) nodes.push_back({-1, Vector()});
    for (std::size_t p = 0; p < h.pieces.size(); ++p) {
        const auto k = h.pieces[p].axes.cols();
        if (k == 0) {
            nodes.push_back({static_cast<int>(p), Vector(0)});
            continue;
        }
        for (Eigen::Index j = 0; j < k; ++j)
            for (double sign : {1.0, -1.0}) nodes.push_back({static_cast<int>(p), sign * Vector::Unit(k, j)});
        const Matrix s = sample_directions(k, k == 1 ? 2 : 4 * k, 0);
        for (Eigen::Index j = 0; j < s.cols(); ++j) nodes.push_back({static_cast<int>(p), s.col(j)});
    }
    auto location = [&](const HullNode& node, Eigen::Index fixed_index) -> Vector {
        if (node.piece < 0) return h.points.col(fixed_index);
        const auto& piece = h.pieces[static_cast<std::size_t>(node.piece)];
        return piece.axes.cols() == 0 ? piece.center : Vector(piece.center + piece.axes * node.y);
    };
    auto assemble = [&] {
        Matrix pts(n, static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t i = 0; i < nodes.size(); ++i)
            pts.col(static_cast<Eigen::Index>(i)) = location(nodes[i], static_cast<Eigen::Index>(i));
        return pts;
    };

    Matrix pts = assemble();
    Matrix y = design_points(pts, centered);
    require_span(y);
    const auto d = static_cast<double>(y.rows());
    const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());

    TyState s;
    s.weights = Vector::Constant(y.cols(), 1.0 / static_cast<double>(y.cols()));
    double gap = 1.0;
    for (int round = 0; round < 500; ++round) {
        barrier_newton(y, s, 0.5 * eps, max_iterations);
        Vector c = Vector::Zero(n);
        Matrix inv;
        if (centered) {
            inv = s.m_inv;
        } else {
            c = pts * s.weights;
            const Matrix sigma = pts * s.weights.asDiagonal() * pts.transpose() - c * c.transpose();
            inv = sigma.llt().solve(Matrix::Identity(n, n));
        }
        const Matrix factor = Eigen::LLT<Matrix>(0.5 * (inv + inv.transpose())).matrixU();
        double worst = s.g.maxCoeff();
        std::vector<HullNode> cuts;
        for (std::size_t p = 0; p < h.pieces.size(); ++p) {
            const auto& piece = h.pieces[p];
            if (piece.axes.cols() == 0) continue;
            const BallMax r = piece_max_g(piece, factor, c, centered);
            worst = std::max(worst, r.value);
            if (r.value > d * (1.0 + 0.5 * eps)) cuts.push_back({static_cast<int>(p), r.y, false});
        }
        gap = std::max(worst / d - 1.0, s.eps_minus);
        if (gap <= eps || s.iterations >= max_iterations || round == 499)
            return finish(ellipsoid_from_weights(pts, s.weights, centered, worst), gap, s.iterations);

        // Keep fixed points and supporting piece points (the initial
        // discretization only in the first round), merge coincident ones,
        // then add the global maximizers.
        std::vector<HullNode> kept;
        std::vector<double> weights;
        auto add = [&](HullNode node, double w) {
            const Vector x = node.piece < 0 ? Vector() : location(node, 0);
            if (node.piece >= 0) {
                for (std::size_t i = 0; i < kept.size(); ++i) {
                    if (kept[i].piece != node.piece) continue;
                    if ((location(kept[i], 0) - x).norm() <= 1e-9 * scale) {
                        weights[i] += w;
                        return;
                    }
                }
            }
            kept.push_back(std::move(node));
            weights.push_back(w);
        };
        // Fixed points keep their column positions at the front.
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].piece < 0 || (round == 0 && nodes[i].anchor)) {
                kept.push_back(nodes[i]);
                weights.push_back(s.weights[static_cast<Eigen::Index>(i)]);
            }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double w = s.weights[static_cast<Eigen::Index>(i)];
            if (nodes[i].piece < 0 || (round == 0 && nodes[i].anchor) || w <= 0.0) continue;
            add(nodes[i], w);
        }
        for (auto& cut : cuts) add(std::move(cut), 0.0);
        nodes = std::move(kept);
        pts = assemble();
        y = design_points(pts, centered);
        s.weights = Eigen::Map<const Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
        if (Eigen::LLT<Matrix>(y * s.weights.asDiagonal() * y.transpose()).info() != Eigen::Success)
            s.weights.setConstant(1.0 / static_cast<double>(s.weights.size()));
    }
    throw GeometryError("mvee column generation did not terminate");
}

}  // namespace detail

namespace detail {

inline constexpr std::size_t kMaxWorkingSet = 160;

// Working-set solver: barrier Newton on a small candidate set, then add the
// worst violators from the full set until every point is certified.
inline TyState working_set_mvee(const Matrix& y, double eps, int max_iterations) {
    const Eigen::Index m = y.cols();
    const auto d = static_cast<double>(y.rows());
    TyState s;
    s.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
    if (m <= 64) {
        barrier_newton(y, s, eps, max_iterations);
        return s;
    }
    todd_yildirim(y, s, 1e-3, max_iterations);
    std::vector<Eigen::Index> work;
    std::vector<bool> in_work(static_cast<std::size_t>(m), false);
    auto take = [&](Eigen::Index i) {
        if (!in_work[static_cast<std::size_t>(i)]) {
            in_work[static_cast<std::size_t>(i)] = true;
            work.push_back(i);
        }
    };
    // Seed with the heaviest points of the coarse solution; uniform start
    // leaves every weight positive, so positivity alone says nothing.
    {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
        const auto seed = std::min<Eigen::Index>(m, std::max<Eigen::Index>(4 * y.rows(), 24));
        std::partial_sort(order.begin(), order.begin() + seed, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return s.weights[a] > s.weights[b] || (s.weights[a] == s.weights[b] && a < b);
        });
        for (Eigen::Index r = 0; r < seed; ++r) take(order[static_cast<std::size_t>(r)]);
    }
    const int total_budget = s.iterations;
    for (int round = 0; round < 1000; ++round) {
        std::sort(work.begin(), work.end());
        Matrix sub(y.rows(), static_cast<Eigen::Index>(work.size()));
        for (std::size_t i = 0; i < work.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = y.col(work[i]);
        TyState ws;
        ws.iterations = s.iterations - total_budget;
        barrier_newton(sub, ws, 0.5 * eps, max_iterations);
        s.iterations = total_budget + ws.iterations;
        s.weights.setZero();
        for (std::size_t i = 0; i < work.size(); ++i) s.weights[work[i]] = ws.weights[static_cast<Eigen::Index>(i)];
        ty_refresh(y, s);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
        const auto top = std::min<Eigen::Index>(m, std::max<Eigen::Index>(2 * y.rows(), 16));
        std::partial_sort(order.begin(), order.begin() + top, order.end(),
                          [&](Eigen::Index a, Eigen::Index b) { return s.g[a] > s.g[b] || (s.g[a] == s.g[b] && a < b); });
        s.eps_plus = s.g[order[0]] / d - 1.0;
        s.eps_minus = ws.eps_minus;
        if (s.eps_plus <= eps || s.iterations >= max_iterations) break;
        // Keep the support, add violators.
        std::vector<Eigen::Index> next;
        std::fill(in_work.begin(), in_work.end(), false);
        work.swap(next);
        for (Eigen::Index i : next)
            if (s.weights[i] > 0) take(i);
        if (work.size() > kMaxWorkingSet) {
            // Contact set too large for Newton: finish with TY on everything.
            todd_yildirim(y, s, eps, max_iterations);
            break;
        }
        for (Eigen::Index r = 0; r < top; ++r)
            if (s.g[order[static_cast<std::size_t>(r)]] > d * (1.0 + 0.5 * eps)) take(order[static_cast<std::size_t>(r)]);
    }
    return s;
}

}  // namespace detail

// (1+eps)-approximate minimum-volume enclosing ellipsoid of the columns.
// centered: the ellipsoid is centered at the origin (the MVEE of
// points ∪ -points).
inline MveeResult mvee(const Matrix& points, double eps = kMveeDefaultEps, bool centered = false,
                       int max_iterations = 1000000) {
    if (!(eps > 0)) throw GeometryError("mvee tolerance must be positive");
    if (!points.allFinite()) throw GeometryError("non-finite point coordinates");
    const Matrix y = detail::design_points(points, centered);
    detail::require_span(y);
    const detail::TyState s = detail::working_set_mvee(y, eps, max_iterations);
    const double kappa = s.g.maxCoeff();
    return detail::finish(detail::ellipsoid_from_weights(points, s.weights, centered, kappa),
                          std::max(s.eps_plus, s.eps_minus), s.iterations);
}

// MVEE of a body: exact for ellipsoids, column generation for ellipsoid
// hulls, touching points for support samples.
inline MveeResult mvee(const ConvexBody& body, double eps = kMveeDefaultEps, bool centered = false,
                       int max_iterations = 1000000) {
    if (!(eps > 0)) throw GeometryError("mvee tolerance must be positive");
    if (const auto* pc = body.as<PointCloud>()) return mvee(pc->points, eps, centered, max_iterations);
    if (const auto* e = body.as<Ellipsoid>()) {
        if (!centered || e->center().cwiseAbs().maxCoeff() == 0.0) return detail::finish(*e, 0.0, 0);
        EllipsoidHull h{{{e->center(), symmetric_sqrt(e->inverse_shape())}}, Matrix(body.dim(), 0)};
        return detail::mvee_hull(h, eps, true, max_iterations);
    }
    if (const auto* h = body.as<EllipsoidHull>()) return detail::mvee_hull(*h, eps, centered, max_iterations);
    return mvee(body.boundary_points(), eps, centered, max_iterations);
}

}  // namespace affrev
