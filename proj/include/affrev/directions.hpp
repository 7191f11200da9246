#pragma once

#include "affrev/linalg.hpp"

#include <cstdint>

namespace affrev {

// Deterministic direction sets, one unit vector per column. The seed only
// rotates the 2-D and 3-D lattices; in dimension >= 4 the directions are
// normalized Gaussian samples drawn from the seed.
inline Matrix sample_directions(Eigen::Index dim, Eigen::Index count, std::uint64_t seed = 0) {
    if (dim < 1 || count < 1) throw GeometryError("empty direction set");
    Matrix dirs(dim, count);
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (dim == 1) {
        for (Eigen::Index i = 0; i < count; ++i) dirs(0, i) = (i % 2 == 0) ? 1.0 : -1.0;
    } else if (dim == 2) {
        const double phase = unit(rng);
        for (Eigen::Index i = 0; i < count; ++i) {
            const double t = 2.0 * kPi * (static_cast<double>(i) + phase) / static_cast<double>(count);
            dirs(0, i) = std::cos(t);
            dirs(1, i) = std::sin(t);
        }
    } else if (dim == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        const double offset = 2.0 * kPi * unit(rng);
        for (Eigen::Index i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double t = golden * static_cast<double>(i) + offset;
            dirs(0, i) = r * std::cos(t);
            dirs(1, i) = r * std::sin(t);
            dirs(2, i) = z;
        }
    } else {
        for (Eigen::Index i = 0; i < count; ++i) dirs.col(i) = random_unit_vector(dim, rng);
    }
    return dirs;
}

// Points on the projective sphere (lines through the origin), canonical sign.
inline Matrix projective_grid(Eigen::Index dim, Eigen::Index count, std::uint64_t seed = 0) {
    Matrix grid(dim, count);
    if (dim == 2) {
        for (Eigen::Index i = 0; i < count; ++i) {
            const double t = kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            grid(0, i) = std::cos(t);
            grid(1, i) = std::sin(t);
        }
    } else if (dim == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (Eigen::Index i = 0; i < count; ++i) {
            const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double t = golden * static_cast<double>(i);
            grid(0, i) = r * std::cos(t);
            grid(1, i) = r * std::sin(t);
            grid(2, i) = z;
        }
    } else {
        grid = sample_directions(dim, count, seed);
    }
    for (Eigen::Index i = 0; i < count; ++i) grid.col(i) = canonical_sign(grid.col(i));
    return grid;
}

// Unit directions inside span(basis), returned in ambient coordinates.
inline Matrix directions_in(const Matrix& basis, Eigen::Index count, std::uint64_t seed = 0) {
    return basis * sample_directions(basis.cols(), count, seed);
}

}  // namespace affrev
