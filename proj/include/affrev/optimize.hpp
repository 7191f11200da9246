#pragma once

#include "affrev/linalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace affrev {

struct NelderMeadOptions {
    double initial_step = 0.1;
    int max_evaluations = 2000;
    double f_tol = 1e-14;  // spread of simplex values
    double x_tol = 1e-10;  // simplex diameter
    double target = -std::numeric_limits<double>::infinity();  // stop once reached
};

struct NelderMeadResult {
    Vector x;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
};

// Derivative-free simplex search (standard coefficients 1, 2, 1/2, 1/2).
inline NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                                    const NelderMeadOptions& opt = {}) {
    const Eigen::Index n = x0.size();
    NelderMeadResult out;
    if (n == 0) {
        out.x = x0;
        out.value = f(x0);
        out.evaluations = 1;
        return out;
    }
    std::vector<Vector> pts;
    std::vector<double> vals;
    auto eval = [&](const Vector& x) {
        ++out.evaluations;
        return f(x);
    };
    pts.push_back(x0);
    vals.push_back(eval(x0));
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector x = x0;
        x[i] += opt.initial_step;
        pts.push_back(x);
        vals.push_back(eval(x));
    }
    std::vector<std::size_t> order(static_cast<std::size_t>(n + 1));
    while (out.evaluations < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        if (vals[best] <= opt.target) break;
        double diameter = 0.0;
        for (const auto& p : pts) diameter = std::max(diameter, (p - pts[best]).cwiseAbs().maxCoeff());
        if (vals[worst] - vals[best] <= opt.f_tol * (1.0 + std::abs(vals[best])) && diameter <= opt.x_tol * 1e3) break;
        if (diameter <= opt.x_tol) break;

        Vector centroid = Vector::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(n);

        const Vector reflected = centroid + (centroid - pts[worst]);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const Vector expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                          : Vector(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    out.value = *it;
    out.x = pts[static_cast<std::size_t>(it - vals.begin())];
    return out;
}

}  // namespace affrev
