#pragma once

#include "affrev/linalg.hpp"

namespace affrev {

// Linear or affine flat: base_point + span(basis), basis orthonormal.
class Subspace {
public:
    Subspace() = default;

    Subspace(Matrix basis, Vector base_point) : basis_(std::move(basis)), base_(std::move(base_point)) {
        if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
            throw GeometryError("subspace dimension out of range");
        if (base_.size() != basis_.rows()) throw GeometryError("base point dimension mismatch");
        const Matrix gram = basis_.transpose() * basis_;
        const Matrix eye = Matrix::Identity(gram.rows(), gram.cols());
        if ((gram - eye).cwiseAbs().maxCoeff() > 1e-12) throw GeometryError("basis is not orthonormal");
    }

    // Orthonormalizes the given spanning vectors.
    static Subspace span(const Matrix& vectors) {
        return Subspace(orthonormalize(vectors), Vector::Zero(vectors.rows()));
    }
    static Subspace affine_span(const Matrix& vectors, const Vector& base_point) {
        return Subspace(orthonormalize(vectors), base_point);
    }
    // Affine hyperplane {x : <normal, x> = <normal, point>}.
    static Subspace hyperplane(const Vector& normal, const Vector& point) {
        return Subspace(complement_of_vector(normal), point);
    }
    static Subspace hyperplane(const Vector& normal) {
        return hyperplane(normal, Vector::Zero(normal.size()));
    }
    static Subspace coordinate(Eigen::Index ambient, std::initializer_list<Eigen::Index> axes) {
        Matrix b = Matrix::Zero(ambient, static_cast<Eigen::Index>(axes.size()));
        Eigen::Index j = 0;
        for (auto a : axes) b(a, j++) = 1.0;
        return Subspace(b, Vector::Zero(ambient));
    }

    [[nodiscard]] Eigen::Index ambient_dim() const { return basis_.rows(); }
    [[nodiscard]] Eigen::Index dim() const { return basis_.cols(); }
    [[nodiscard]] const Matrix& basis() const { return basis_; }
    [[nodiscard]] const Vector& base_point() const { return base_; }
    [[nodiscard]] bool is_linear(double tol = 1e-12) const { return base_.cwiseAbs().maxCoeff() <= tol; }
    [[nodiscard]] bool is_hyperplane() const { return dim() == ambient_dim() - 1; }

    [[nodiscard]] Matrix orthogonal_basis() const { return complement_basis(basis_); }

    // Unit normal; only meaningful for hyperplanes.
    [[nodiscard]] Vector normal() const {
        if (!is_hyperplane()) throw GeometryError("normal requested for a non-hyperplane");
        return orthogonal_basis().col(0);
    }

    [[nodiscard]] Vector to_local(const Vector& x) const { return basis_.transpose() * (x - base_); }
    [[nodiscard]] Vector to_ambient(const Vector& y) const { return base_ + basis_ * y; }

    [[nodiscard]] bool contains(const Vector& x, double tol = 1e-10) const {
        const Vector d = x - base_;
        return (d - basis_ * (basis_.transpose() * d)).norm() <= tol * std::max(1.0, x.norm());
    }

private:
    Matrix basis_;
    Vector base_;
};

// Affine line base + span(direction). The direction is unit-norm with the
// first nonzero coordinate positive; the base point is the foot of the
// perpendicular from the origin, so equal lines compare equal.
class Line {
public:
    Line() = default;

    explicit Line(const Vector& direction) : Line(direction, Vector::Zero(direction.size())) {}

    Line(const Vector& direction, const Vector& point) {
        const double norm = direction.norm();
        if (!(norm > 1e-14)) throw GeometryError("line direction is zero");
        dir_ = canonical_sign(direction / norm);
        base_ = point - point.dot(dir_) * dir_;
    }

    [[nodiscard]] Eigen::Index ambient_dim() const { return dir_.size(); }
    [[nodiscard]] const Vector& direction() const { return dir_; }
    [[nodiscard]] const Vector& base_point() const { return base_; }
    [[nodiscard]] bool through_origin(double tol = 1e-12) const { return base_.norm() <= tol; }

    [[nodiscard]] Subspace as_subspace() const { return Subspace(dir_, base_); }
    [[nodiscard]] Subspace orthogonal_hyperplane() const { return Subspace::hyperplane(dir_); }

    [[nodiscard]] double distance_to(const Vector& x) const {
        const Vector d = x - base_;
        return (d - d.dot(dir_) * dir_).norm();
    }

private:
    Vector dir_;
    Vector base_;
};

inline double angle_between(const Line& a, const Line& b) { return line_angle(a.direction(), b.direction()); }

// x -> matrix * x + translation.
class AffineMap {
public:
    AffineMap() = default;

    AffineMap(Matrix matrix, Vector translation) : matrix_(std::move(matrix)), translation_(std::move(translation)) {
        if (matrix_.rows() != matrix_.cols() || translation_.size() != matrix_.rows())
            throw GeometryError("affine map dimension mismatch");
        if (!(std::abs(matrix_.determinant()) > 1e-12)) throw GeometryError("affine map is singular");
    }

    static AffineMap identity(Eigen::Index n) { return {Matrix::Identity(n, n), Vector::Zero(n)}; }
    static AffineMap linear(Matrix m) {
        const auto n = m.rows();
        return {std::move(m), Vector::Zero(n)};
    }

    [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
    [[nodiscard]] const Matrix& matrix() const { return matrix_; }
    [[nodiscard]] const Vector& translation() const { return translation_; }

    [[nodiscard]] Vector operator()(const Vector& x) const { return matrix_ * x + translation_; }
    [[nodiscard]] Matrix apply_columns(const Matrix& xs) const {
        return (matrix_ * xs).colwise() + translation_;
    }

    // (this ∘ inner)(x) = this(inner(x)).
    [[nodiscard]] AffineMap compose(const AffineMap& inner) const {
        return {matrix_ * inner.matrix_, matrix_ * inner.translation_ + translation_};
    }

    [[nodiscard]] AffineMap inverse() const {
        Matrix inv = matrix_.inverse();
        Vector t = -(inv * translation_);
        return {std::move(inv), std::move(t)};
    }

    // Image of an affine line.
    [[nodiscard]] Line map_line(const Line& line) const {
        return Line(matrix_ * line.direction(), (*this)(line.base_point()));
    }

private:
    Matrix matrix_;
    Vector translation_;
};

}  // namespace affrev
