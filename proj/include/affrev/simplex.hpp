#pragma once

#include "affrev/linalg.hpp"

#include <vector>

namespace affrev {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double objective = 0.0;
};

namespace detail {

// Dense tableau simplex. Rows 0..m-1 are constraints, row m is the
// objective row holding reduced costs (maximization: pivot while some
// entry is > tol). Dantzig pricing, falling back to Bland's rule after a
// run of degenerate pivots.
class Tableau {
public:
    Tableau(Matrix t, std::vector<Eigen::Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

    // Returns false when unbounded.
    bool optimize(const std::vector<bool>& allowed, double tol) {
        const Eigen::Index m = t_.rows() - 1;
        const Eigen::Index cols = t_.cols() - 1;
        int degenerate_run = 0;
        for (int iter = 0; iter < 50000; ++iter) {
            const bool bland = degenerate_run > 50;
            Eigen::Index enter = -1;
            double best = tol;
            for (Eigen::Index j = 0; j < cols; ++j) {
                if (!allowed[static_cast<std::size_t>(j)]) continue;
                const double rc = t_(m, j);
                if (rc > best) {
                    enter = j;
                    if (bland) break;
                    best = rc;
                }
            }
            if (enter < 0) return true;
            Eigen::Index leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i) {
                const double a = t_(i, enter);
                if (a > tol) {
                    const double r = t_(i, cols) / a;
                    if (r < ratio - 1e-14 ||
                        (r <= ratio + 1e-14 && leave >= 0 && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
                        ratio = r;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            degenerate_run = ratio <= 1e-14 ? degenerate_run + 1 : 0;
            pivot(leave, enter);
        }
        throw GeometryError("simplex iteration limit reached");
    }

    void pivot(Eigen::Index row, Eigen::Index col) {
        t_.row(row) /= t_(row, col);
        for (Eigen::Index i = 0; i < t_.rows(); ++i) {
            if (i == row) continue;
            const double f = t_(i, col);
            if (f != 0.0) t_.row(i) -= f * t_.row(row);
        }
        basis_[static_cast<std::size_t>(row)] = col;
    }

    Matrix& table() { return t_; }
    std::vector<Eigen::Index>& basis() { return basis_; }

private:
    Matrix t_;
    std::vector<Eigen::Index> basis_;
};

}  // namespace detail

// maximize c^T x  subject to  A x = b, x >= 0.
inline LpResult solve_standard_lp(const Vector& c, const Matrix& a, const Vector& b, double tol = 1e-10) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (c.size() != n || b.size() != m) throw GeometryError("LP dimension mismatch");

    // Phase I tableau with one artificial per row.
    Matrix t = Matrix::Zero(m + 1, n + m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b[i] < 0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a.row(i);
        t(i, n + i) = 1.0;
        t(i, n + m) = sign * b[i];
    }
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;
    // Reduced costs of max(-sum artificials) with artificials basic.
    for (Eigen::Index i = 0; i < m; ++i) t.row(m) += t.row(i);
    t.row(m).segment(n, m).setZero();

    detail::Tableau tab(std::move(t), std::move(basis));
    std::vector<bool> allowed(static_cast<std::size_t>(n + m), true);
    tab.optimize(allowed, tol);

    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (tab.table()(m, n + m) > tol * scale * 100) return {LpStatus::Infeasible, Vector(), 0.0};

    // Drive zero-level artificials out of the basis where possible.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis()[static_cast<std::size_t>(i)] < n) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(tab.table()(i, j)) > 1e-9) {
                tab.pivot(i, j);
                break;
            }
        }
    }
    for (Eigen::Index j = n; j < n + m; ++j) allowed[static_cast<std::size_t>(j)] = false;

    // Phase II objective row: reduced costs c_j - c_B B^{-1} a_j.
    Matrix& tt = tab.table();
    tt.row(m).setZero();
    tt.row(m).head(n) = c.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
        if (bj < n && c[bj] != 0.0) tt.row(m) -= c[bj] * tt.row(i);
    }
    if (!tab.optimize(allowed, tol)) return {LpStatus::Unbounded, Vector(), 0.0};

    Vector x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index bj = tab.basis()[static_cast<std::size_t>(i)];
        if (bj < n) x[bj] = tab.table()(i, n + m);
    }
    return {LpStatus::Optimal, x, c.dot(x)};
}

// maximize c^T x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.
inline LpResult solve_lp(const Vector& c, const Matrix& a_ub, const Vector& b_ub, const Matrix& a_eq,
                         const Vector& b_eq, double tol = 1e-10) {
    const Eigen::Index n = c.size();
    const Eigen::Index mu = a_ub.rows();
    const Eigen::Index me = a_eq.rows();
    Matrix a = Matrix::Zero(mu + me, n + mu);
    Vector b(mu + me);
    if (mu > 0) {
        a.topLeftCorner(mu, n) = a_ub;
        a.topRightCorner(mu, mu).setIdentity();
        b.head(mu) = b_ub;
    }
    if (me > 0) {
        a.bottomLeftCorner(me, n) = a_eq;
        b.tail(me) = b_eq;
    }
    Vector cc = Vector::Zero(n + mu);
    cc.head(n) = c;
    LpResult r = solve_standard_lp(cc, a, b, tol);
    if (r.status == LpStatus::Optimal) r.x = r.x.head(n).eval();
    return r;
}

}  // namespace affrev
