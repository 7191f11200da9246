#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace affrev {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All geometric failures surface as GeometryError; messages are part of the
// public contract (tests and the CLI match on them).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

// Orthonormal basis of the complement of span(basis). Columns of `basis`
// must be linearly independent. Deterministic (Householder QR).
inline Matrix complement_basis(const Matrix& basis) {
    const auto n = basis.rows();
    const auto k = basis.cols();
    if (k >= n) return Matrix(n, 0);
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    return q.rightCols(n - k);
}

// Orthonormal basis of span(vectors) (columns); throws if rank-deficient.
inline Matrix orthonormalize(const Matrix& vectors, double tol = 1e-12) {
    Eigen::ColPivHouseholderQR<Matrix> qr(vectors);
    qr.setThreshold(tol);
    if (qr.rank() < vectors.cols())
        throw GeometryError("vectors are linearly dependent");
    Eigen::HouseholderQR<Matrix> plain(vectors);
    Matrix q = plain.householderQ() * Matrix::Identity(vectors.rows(), vectors.cols());
    // Fix column signs so that the basis follows the input orientation.
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (q.col(j).dot(vectors.col(j)) < 0) q.col(j) = -q.col(j);
    return q;
}

inline Matrix complement_of_vector(const Vector& v) {
    return complement_basis(v.normalized());
}

// Acute angle between two unsigned lines through their directions.
inline double line_angle(const Vector& a, const Vector& b) {
    const Vector an = a.normalized();
    const Vector bn = b.normalized();
    const double dot = an.dot(bn);
    // atan2 form keeps precision for nearly parallel lines.
    const double s = (an - dot * bn).norm();
    return std::atan2(s, std::abs(dot));
}

// Sign convention for reported axes: first entry with |x| > tol positive.
inline Vector canonical_sign(Vector v, double tol = 1e-12) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > tol) {
            if (v[i] < 0) v = -v;
            break;
        }
    }
    return v;
}

inline Matrix symmetric_sqrt(const Matrix& spd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spd);
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

inline double condition_number(const Matrix& spd) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(spd, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// Skew-symmetric matrix from its n(n-1)/2 upper-triangle coordinates.
inline Matrix skew_from_params(const Vector& params, Eigen::Index n) {
    Matrix s = Matrix::Zero(n, n);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            s(i, j) = params[idx];
            s(j, i) = -params[idx];
            ++idx;
        }
    return s;
}

// Cayley chart of SO(n): (I - S)^{-1} (I + S).
inline Matrix cayley(const Matrix& skew) {
    const auto n = skew.rows();
    const Matrix eye = Matrix::Identity(n, n);
    return (eye - skew).partialPivLu().solve(eye + skew);
}

// splitmix64, used to derive independent seeds from (seed, index) pairs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Vector gaussian_vector(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

inline Vector random_unit_vector(Eigen::Index n, Rng& rng) {
    for (;;) {
        Vector v = gaussian_vector(n, rng);
        const double norm = v.norm();
        if (norm > 1e-8) return v / norm;
    }
}

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
// diagonal-sign correction).
inline Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
    Matrix g(n, n);
    for (Eigen::Index j = 0; j < n; ++j) g.col(j) = gaussian_vector(n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    return q;
}

inline Matrix random_rotation(Eigen::Index n, Rng& rng) {
    Matrix q = random_orthogonal(n, rng);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

// Random invertible matrix whose 2-norm condition number is at most
// max_condition (singular values log-uniform in [1, max_condition], then
// rescaled to unit geometric mean so |det| = 1).
inline Matrix random_conditioned_matrix(Eigen::Index n, double max_condition, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector s(n);
    const double log_c = std::log(max_condition);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = std::exp(unit(rng) * log_c);
    s[0] = 1.0;
    const double geo = std::exp(s.array().log().mean());
    s /= geo;
    return random_orthogonal(n, rng) * s.asDiagonal() * random_orthogonal(n, rng).transpose();
}

}  // namespace affrev
