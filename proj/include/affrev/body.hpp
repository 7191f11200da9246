#pragma once

#include "affrev/directions.hpp"
#include "affrev/flats.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace affrev {

// {x : (x - center)^T shape (x - center) <= 1}, shape symmetric positive definite.
class Ellipsoid {
public:
    Ellipsoid() = default;

    Ellipsoid(Vector center, Matrix shape) : center_(std::move(center)), shape_(std::move(shape)) {
        const auto n = center_.size();
        if (n < 1 || shape_.rows() != n || shape_.cols() != n) throw GeometryError("ellipsoid dimension mismatch");
        if (!center_.allFinite() || !shape_.allFinite()) throw GeometryError("non-finite ellipsoid data");
        const double scale = std::max(1.0, shape_.cwiseAbs().maxCoeff());
        if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw GeometryError("ellipsoid shape is not symmetric");
        shape_ = 0.5 * (shape_ + shape_.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(shape_);
        if (!(es.eigenvalues().minCoeff() > 0)) throw GeometryError("ellipsoid shape is not positive definite");
        inverse_ = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
        inverse_ = 0.5 * (inverse_ + inverse_.transpose());
    }

    static Ellipsoid ball(Eigen::Index n, double radius = 1.0) {
        return {Vector::Zero(n), Matrix::Identity(n, n) / (radius * radius)};
    }
    // center + axes * (unit ball) for square invertible axes.
    static Ellipsoid from_axes(const Vector& center, const Matrix& axes) {
        Matrix cov = axes * axes.transpose();
        return {center, cov.inverse()};
    }

    [[nodiscard]] Eigen::Index dim() const { return center_.size(); }
    [[nodiscard]] const Vector& center() const { return center_; }
    [[nodiscard]] const Matrix& shape() const { return shape_; }
    // Q^{-1}; its square root maps the unit ball onto the centered ellipsoid.
    [[nodiscard]] const Matrix& inverse_shape() const { return inverse_; }

    [[nodiscard]] double support(const Vector& u) const {
        return center_.dot(u) + std::sqrt(std::max(0.0, u.dot(inverse_ * u)));
    }
    [[nodiscard]] Vector touching_point(const Vector& u) const {
        const Vector w = inverse_ * u;
        const double s = std::sqrt(std::max(0.0, u.dot(w)));
        return s > 0 ? Vector(center_ + w / s) : center_;
    }
    [[nodiscard]] double norm_of(const Vector& x) const {
        const Vector d = x - center_;
        return d.dot(shape_ * d);
    }
    [[nodiscard]] bool contains(const Vector& x, double slack = 0.0) const { return norm_of(x) <= 1.0 + slack; }

    [[nodiscard]] double volume() const {
        const double n = static_cast<double>(dim());
        const double unit_ball = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
        return unit_ball / std::sqrt(shape_.determinant());
    }

    // Semi-axis lengths (ascending) and matching unit directions (columns).
    [[nodiscard]] std::pair<Vector, Matrix> principal_axes() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(inverse_);
        return {es.eigenvalues().cwiseMax(0.0).cwiseSqrt(), es.eigenvectors()};
    }

private:
    Vector center_;
    Matrix shape_;
    Matrix inverse_;
};

// Convex hull of the columns.
struct PointCloud {
    Matrix points;
};

// Sampled support function: h(directions.col(i)) = values[i].
struct SupportSample {
    Matrix directions;
    Vector values;
};

// A possibly flat ellipsoid center + axes * B^k (axes is n x k, k may be 0).
struct EllipsoidPiece {
    Vector center;
    Matrix axes;
};

// Convex hull of finitely many pieces and points.
struct EllipsoidHull {
    std::vector<EllipsoidPiece> pieces;
    Matrix points;  // n x m, m may be 0
};

enum class BodyKind { PointCloud, SupportSample, Ellipsoid, EllipsoidHull };

inline std::string_view kind_name(BodyKind kind) {
    switch (kind) {
        case BodyKind::PointCloud: return "point-cloud";
        case BodyKind::SupportSample: return "support-sample";
        case BodyKind::Ellipsoid: return "ellipsoid";
        case BodyKind::EllipsoidHull: return "ellipsoid-hull";
    }
    return "unknown";
}

// Local quadratic fit of a sampled support function around u; the linear
// part is the touching point.
struct LocalSupportFit {
    Vector touching;
    double value = 0.0;
    double residual = 0.0;  // max abs misfit over the neighbourhood
};

namespace detail {

inline LocalSupportFit fit_support_sample(const SupportSample& s, const Vector& u) {
    const auto n = s.directions.rows();
    const auto m = s.directions.cols();
    // Linear part <x, v> plus quadratic and cubic terms in tangent coordinates.
    const Eigen::Index quad_terms = (n - 1) * n / 2;
    const Eigen::Index cubic_terms = n <= 3 ? (n - 1) * n * (n + 1) / 6 : 0;
    const Eigen::Index params = n + quad_terms + cubic_terms;
    const Eigen::Index k = std::min<Eigen::Index>(m, std::max<Eigen::Index>(2 * params, 16));

    const Vector dots = s.directions.transpose() * u;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return dots[a] > dots[b] || (dots[a] == dots[b] && a < b); });
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());

    const Matrix tangent = complement_of_vector(u);
    Matrix design(k, params);
    Vector rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Vector v = s.directions.col(idx[static_cast<std::size_t>(r)]);
        const Vector t = tangent.transpose() * v;
        design.row(r).head(n) = v.transpose();
        Eigen::Index c = n;
        for (Eigen::Index a = 0; a < n - 1; ++a)
            for (Eigen::Index b = a; b < n - 1; ++b) design(r, c++) = t[a] * t[b];
        if (cubic_terms > 0)
            for (Eigen::Index a = 0; a < n - 1; ++a)
                for (Eigen::Index b = a; b < n - 1; ++b)
                    for (Eigen::Index d = b; d < n - 1; ++d) design(r, c++) = t[a] * t[b] * t[d];
        rhs[r] = s.values[idx[static_cast<std::size_t>(r)]];
    }
    Vector coeff;
    if (k >= params) {
        coeff = design.colPivHouseholderQr().solve(rhs);
    } else {
        coeff = Vector::Zero(params);
        coeff.head(n) = design.leftCols(n).colPivHouseholderQr().solve(rhs);
    }
    LocalSupportFit fit;
    fit.touching = coeff.head(n);
    fit.value = fit.touching.dot(u);
    fit.residual = (design * coeff - rhs).cwiseAbs().maxCoeff();
    return fit;
}

inline double piece_support(const EllipsoidPiece& p, const Vector& u) {
    return p.center.dot(u) + (p.axes.cols() > 0 ? (p.axes.transpose() * u).norm() : 0.0);
}

inline Vector piece_touching(const EllipsoidPiece& p, const Vector& u) {
    if (p.axes.cols() == 0) return p.center;
    const Vector w = p.axes.transpose() * u;
    const double s = w.norm();
    return s > 0 ? Vector(p.center + p.axes * (w / s)) : p.center;
}

// Rank of the affine hull of a column set.
inline Eigen::Index affine_rank(const Matrix& pts, double tol) {
    if (pts.cols() == 0) return -1;
    const Vector c = pts.rowwise().mean();
    const Matrix centered = pts.colwise() - c;
    Eigen::ColPivHouseholderQR<Matrix> qr(centered);
    qr.setThreshold(tol);
    return qr.rank();
}

inline bool columns_negation_closed(const Matrix& pts, double tol) {
    const auto m = pts.cols();
    if (m == 0) return true;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return pts(0, a) < pts(0, b); });
    std::vector<double> first(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) first[i] = pts(0, order[i]);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double target = -pts(0, i);
        auto lo = std::lower_bound(first.begin(), first.end(), target - tol);
        bool found = false;
        for (auto it = lo; it != first.end() && *it <= target + tol; ++it) {
            const Eigen::Index j = order[static_cast<std::size_t>(it - first.begin())];
            if ((pts.col(j) + pts.col(i)).cwiseAbs().maxCoeff() <= tol) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace detail

// Touching point plus a measure of how far the touching set is from a single
// point (0 for strictly convex representations).
struct Touching {
    Vector point;
    double spread = 0.0;
};

// Immutable convex body with nonempty interior.
class ConvexBody {
public:
    using Representation = std::variant<PointCloud, SupportSample, Ellipsoid, EllipsoidHull>;

    static ConvexBody point_cloud(Matrix points, bool symmetric = false) {
        const Eigen::Index dim = points.rows();
        ConvexBody b(dim, PointCloud{std::move(points)}, symmetric);
        b.validate();
        return b;
    }
    static ConvexBody support_sample(Matrix directions, Vector values, bool symmetric = false) {
        const Eigen::Index dim = directions.rows();
        ConvexBody b(dim, SupportSample{std::move(directions), std::move(values)}, symmetric);
        b.validate();
        return b;
    }
    static ConvexBody ellipsoid(Ellipsoid e) {
        const bool symmetric = e.center().cwiseAbs().maxCoeff() == 0.0;
        return ellipsoid(std::move(e), symmetric);
    }
    static ConvexBody ellipsoid(Ellipsoid e, bool symmetric) {
        const auto n = e.dim();
        ConvexBody b(n, std::move(e), symmetric);
        b.validate();
        return b;
    }
    static ConvexBody ellipsoid_hull(std::vector<EllipsoidPiece> pieces, Matrix points, bool symmetric = false) {
        const auto n = !pieces.empty() ? pieces.front().center.size() : points.rows();
        if (points.cols() == 0) points.resize(n, 0);
        ConvexBody b(n, EllipsoidHull{std::move(pieces), std::move(points)}, symmetric);
        b.validate();
        return b;
    }

    // Skips validation; for bodies derived from validated ones by exact maps.
    static ConvexBody trusted(Eigen::Index dim, Representation rep, bool symmetric) {
        return ConvexBody(dim, std::move(rep), symmetric);
    }

    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] bool symmetric() const { return symmetric_; }
    [[nodiscard]] const Representation& representation() const { return rep_; }
    [[nodiscard]] BodyKind kind() const { return static_cast<BodyKind>(rep_.index()); }
    [[nodiscard]] bool is_polytope() const {
        if (kind() == BodyKind::PointCloud) return true;
        if (const auto* h = std::get_if<EllipsoidHull>(&rep_)) {
            for (const auto& p : h->pieces)
                if (p.axes.cols() > 0) return false;
            return true;
        }
        return false;
    }

    template <class T>
    [[nodiscard]] const T* as() const {
        return std::get_if<T>(&rep_);
    }

    [[nodiscard]] double support(const Vector& u) const {
        if (u.size() != dim_) throw GeometryError("direction dimension mismatch");
        return std::visit([&](const auto& r) { return support_impl(r, u); }, rep_);
    }

    // Support values for every column of dirs.
    [[nodiscard]] Vector support_many(const Matrix& dirs) const {
        if (dirs.rows() != dim_) throw GeometryError("direction dimension mismatch");
        if (const auto* pc = as<PointCloud>()) {
            Vector out(dirs.cols());
            constexpr Eigen::Index block = 256;
            for (Eigen::Index start = 0; start < dirs.cols(); start += block) {
                const auto len = std::min(block, dirs.cols() - start);
                const Matrix prod = dirs.middleCols(start, len).transpose() * pc->points;
                out.segment(start, len) = prod.rowwise().maxCoeff();
            }
            return out;
        }
        if (const auto* e = as<Ellipsoid>()) {
            const Matrix w = e->inverse_shape() * dirs;
            Vector out = dirs.transpose() * e->center();
            out.array() += (dirs.cwiseProduct(w)).colwise().sum().transpose().array().max(0.0).sqrt();
            return out;
        }
        if (const auto* h = as<EllipsoidHull>()) {
            Vector out = Vector::Constant(dirs.cols(), -std::numeric_limits<double>::infinity());
            if (h->points.cols() > 0) out = (dirs.transpose() * h->points).rowwise().maxCoeff();
            for (const auto& p : h->pieces) {
                Vector val = dirs.transpose() * p.center;
                if (p.axes.cols() > 0) val.array() += (p.axes.transpose() * dirs).colwise().norm().transpose().array();
                out = out.cwiseMax(val);
            }
            return out;
        }
        Vector out(dirs.cols());
        for (Eigen::Index i = 0; i < dirs.cols(); ++i) out[i] = support(dirs.col(i));
        return out;
    }

    [[nodiscard]] Touching touching(const Vector& u) const {
        if (u.size() != dim_) throw GeometryError("direction dimension mismatch");
        return std::visit([&](const auto& r) { return touching_impl(r, u); }, rep_);
    }
    [[nodiscard]] Vector touching_point(const Vector& u) const { return touching(u).point; }

    // Exact for point clouds and ellipsoids; max sampled width otherwise.
    [[nodiscard]] double diameter() const {
        if (const auto* pc = as<PointCloud>()) {
            double best = 0.0;
            for (Eigen::Index i = 0; i < pc->points.cols(); ++i)
                best = std::max(best, (pc->points.colwise() - pc->points.col(i)).colwise().squaredNorm().maxCoeff());
            return std::sqrt(best);
        }
        if (const auto* e = as<Ellipsoid>()) return 2.0 * e->principal_axes().first.maxCoeff();
        const Matrix dirs = sample_directions(dim_, dim_ <= 2 ? 720 : 2000, 0);
        const Vector plus = support_many(dirs);
        const Vector minus = support_many(-dirs);
        return (plus + minus).maxCoeff();
    }

    // Finite point set whose hull is the body (point clouds, polytopal
    // hulls) or lies on its boundary (touching points of smooth
    // representations; sampled along `count` directions).
    [[nodiscard]] Matrix boundary_points(Eigen::Index count = 512, std::uint64_t seed = 0) const {
        if (const auto* pc = as<PointCloud>()) return pc->points;
        if (const auto* s = as<SupportSample>()) {
            Matrix out(dim_, s->directions.cols());
            for (Eigen::Index i = 0; i < s->directions.cols(); ++i)
                out.col(i) = detail::fit_support_sample(*s, s->directions.col(i)).touching;
            return out;
        }
        const Matrix dirs = sample_directions(dim_, count, seed);
        Matrix out(dim_, count);
        for (Eigen::Index i = 0; i < count; ++i) out.col(i) = touching_point(dirs.col(i));
        return out;
    }

private:
    ConvexBody(Eigen::Index dim, Representation rep, bool symmetric)
        : dim_(dim), rep_(std::move(rep)), symmetric_(symmetric) {}

    static double support_impl(const PointCloud& pc, const Vector& u) {
        if (pc.points.cols() == 0) throw GeometryError("degenerate body");
        return (pc.points.transpose() * u).maxCoeff();
    }
    static double support_impl(const SupportSample& s, const Vector& u) {
        if (s.directions.cols() == 0) throw GeometryError("degenerate body");
        return detail::fit_support_sample(s, u).value;
    }
    static double support_impl(const Ellipsoid& e, const Vector& u) { return e.support(u); }
    static double support_impl(const EllipsoidHull& h, const Vector& u) {
        double best = -std::numeric_limits<double>::infinity();
        if (h.points.cols() > 0) best = (h.points.transpose() * u).maxCoeff();
        for (const auto& p : h.pieces) best = std::max(best, detail::piece_support(p, u));
        if (!std::isfinite(best)) throw GeometryError("degenerate body");
        return best;
    }

    static Touching touching_impl(const PointCloud& pc, const Vector& u) {
        Eigen::Index arg = 0;
        (pc.points.transpose() * u).maxCoeff(&arg);
        return {pc.points.col(arg), 0.0};
    }
    static Touching touching_impl(const SupportSample& s, const Vector& u) {
        const auto fit = detail::fit_support_sample(s, u);
        return {fit.touching, fit.residual};
    }
    static Touching touching_impl(const Ellipsoid& e, const Vector& u) { return {e.touching_point(u), 0.0}; }
    static Touching touching_impl(const EllipsoidHull& h, const Vector& u) {
        struct Candidate {
            double value;
            Vector point;
            double face;  // extent of the touching set within this generator
        };
        std::vector<Candidate> candidates;
        for (Eigen::Index i = 0; i < h.points.cols(); ++i) candidates.push_back({h.points.col(i).dot(u), h.points.col(i), 0.0});
        for (const auto& p : h.pieces) {
            double face = 0.0;
            if (p.axes.cols() > 0) {
                const double size = p.axes.norm();
                if ((p.axes.transpose() * u).norm() <= 1e-12 * size) face = 2.0 * size;
            }
            candidates.push_back({detail::piece_support(p, u), detail::piece_touching(p, u), face});
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i)
            if (candidates[i].value > candidates[best].value) best = i;
        const double top = candidates[best].value;
        const double scale = std::max(1.0, std::abs(top));
        double spread = 0.0;
        for (const auto& c : candidates)
            if (c.value >= top - 1e-10 * scale)
                spread = std::max({spread, c.face, (c.point - candidates[best].point).norm()});
        return {candidates[best].point, spread};
    }

    void validate() const;

    Eigen::Index dim_ = 0;
    Representation rep_;
    bool symmetric_ = false;
};

inline void ConvexBody::validate() const {
    if (dim_ < 1) throw GeometryError("degenerate body");
    constexpr double sym_tol = 1e-12;
    if (const auto* pc = as<PointCloud>()) {
        if (!pc->points.allFinite()) throw GeometryError("non-finite point coordinates");
        if (pc->points.cols() < dim_ + 1) throw GeometryError("degenerate body");
        const double scale = std::max(1.0, pc->points.cwiseAbs().maxCoeff());
        if (detail::affine_rank(pc->points, 1e-10) < dim_) throw GeometryError("degenerate body");
        if (symmetric_ && !detail::columns_negation_closed(pc->points, sym_tol * scale))
            throw GeometryError("point cloud is not closed under negation");
    } else if (const auto* s = as<SupportSample>()) {
        if (s->directions.cols() != s->values.size()) throw GeometryError("support sample size mismatch");
        if (!s->directions.allFinite() || !s->values.allFinite()) throw GeometryError("non-finite support sample");
        if (s->directions.cols() < 2 * dim_ + 1) throw GeometryError("degenerate body");
        for (Eigen::Index i = 0; i < s->directions.cols(); ++i)
            if (std::abs(s->directions.col(i).norm() - 1.0) > 1e-9) throw GeometryError("support directions must be unit vectors");
        if (symmetric_) {
            if (!(s->values.minCoeff() > 0)) throw GeometryError("support values must be positive for a symmetric body");
            for (Eigen::Index i = 0; i < s->directions.cols(); ++i) {
                bool found = false;
                for (Eigen::Index j = 0; j < s->directions.cols() && !found; ++j)
                    found = (s->directions.col(i) + s->directions.col(j)).cwiseAbs().maxCoeff() <= sym_tol &&
                            std::abs(s->values[i] - s->values[j]) <= sym_tol * std::max(1.0, s->values[i]);
                if (!found) throw GeometryError("support sample is not symmetric");
            }
        }
    } else if (const auto* e = as<Ellipsoid>()) {
        if (symmetric_ && e->center().cwiseAbs().maxCoeff() > sym_tol) throw GeometryError("ellipsoid is not centered");
    } else if (const auto* h = as<EllipsoidHull>()) {
        std::vector<Vector> spanning;
        for (const auto& p : h->pieces) {
            if (p.center.size() != dim_ || p.axes.rows() != dim_) throw GeometryError("piece dimension mismatch");
            if (!p.center.allFinite() || !p.axes.allFinite()) throw GeometryError("non-finite piece data");
            spanning.push_back(p.center);
            for (Eigen::Index j = 0; j < p.axes.cols(); ++j) {
                spanning.emplace_back(p.center + p.axes.col(j));
                spanning.emplace_back(p.center - p.axes.col(j));
            }
        }
        if (h->points.rows() != dim_) throw GeometryError("point dimension mismatch");
        if (!h->points.allFinite()) throw GeometryError("non-finite point coordinates");
        for (Eigen::Index i = 0; i < h->points.cols(); ++i) spanning.emplace_back(h->points.col(i));
        Matrix all(dim_, static_cast<Eigen::Index>(spanning.size()));
        for (std::size_t i = 0; i < spanning.size(); ++i) all.col(static_cast<Eigen::Index>(i)) = spanning[i];
        if (detail::affine_rank(all, 1e-10) < dim_) throw GeometryError("degenerate body");
        if (symmetric_) {
            const double scale = std::max(1.0, all.cwiseAbs().maxCoeff());
            if (!detail::columns_negation_closed(h->points, sym_tol * scale))
                throw GeometryError("ellipsoid hull is not closed under negation");
            for (const auto& p : h->pieces) {
                bool found = false;
                const Matrix gram = p.axes * p.axes.transpose();
                for (const auto& q : h->pieces) {
                    if (q.axes.cols() != p.axes.cols()) continue;
                    if ((q.center + p.center).cwiseAbs().maxCoeff() > sym_tol * scale) continue;
                    if ((q.axes * q.axes.transpose() - gram).cwiseAbs().maxCoeff() > sym_tol * scale * scale) continue;
                    found = true;
                    break;
                }
                if (!found) throw GeometryError("ellipsoid hull is not closed under negation");
            }
        }
    }
}

}  // namespace affrev
