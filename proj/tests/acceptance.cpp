// Acceptance run: one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include "affrev/harness/report.hpp"

#include <chrono>
#include <cstdio>

using namespace affrev;
using namespace affrev::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& r) {
    std::printf("%s  %-34s %s\n", r.pass ? "PASS" : "FAIL", name, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome mvee_correctness() {
    const double eps = 1e-7;
    const auto t0 = Clock::now();
    Rng rng(1);
    double slack = -1.0, shrink = 1.0, gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 3 + trial % 2;
        std::uniform_int_distribution<int> points(static_cast<int>(2 * n + 2), 64);
        const ConvexBody body = shapes::random_symmetric_polytope(n, points(rng), rng);
        const MveeResult r = mvee(body, eps, true);
        const Matrix& pts = body.as<PointCloud>()->points;
        for (Eigen::Index i = 0; i < pts.cols(); ++i) slack = std::max(slack, r.ellipsoid.norm_of(pts.col(i)) - 1.0);
        const Matrix dirs = sample_directions(n, 500, static_cast<std::uint64_t>(trial));
        const Vector hk = body.support_many(dirs);
        for (Eigen::Index i = 0; i < dirs.cols(); ++i)
            shrink = std::min(shrink, hk[i] - r.ellipsoid.support(dirs.col(i)) / std::sqrt(static_cast<double>(n)));
        gap = std::max(gap, r.dual_gap);
    }
    const double t = seconds_since(t0);
    return {slack <= 1e-6 && shrink >= -1e-6 && gap <= eps && t < 60.0,
            fmt("max slack %.2e, min John shrink slack %.2e, max gap %.2e, %.1f s", slack, shrink, gap, t)};
}

Outcome mvee_equivariance() {
    Rng rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 3;
        Matrix pts(n, 30);
        for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) = gaussian_vector(n, rng);
        const ConvexBody k = ConvexBody::point_cloud(pts);
        const Matrix a = random_conditioned_matrix(n, 50, rng);
        const Vector t = gaussian_vector(n, rng);
        const auto lhs = ConvexBody::ellipsoid(mvee(map_body(k, a, t)).ellipsoid, false);
        const auto rhs = map_body(ConvexBody::ellipsoid(mvee(k).ellipsoid, false), a, t);
        worst = std::max(worst, support_distance(lhs, rhs, 2000));
    }
    return {worst <= 1e-5, fmt("max support distance %.2e over 50 pairs (cond 50)", worst)};
}

Outcome canonical_reduction() {
    Rng rng(3);
    int recovered = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 3;
        const auto k = shapes::random_symmetric_polytope(n, 10 + 2 * n, rng);
        const Matrix a = random_conditioned_matrix(n, 20, rng);
        const auto v = linear_equivalent(k, map_body(k, a, Vector::Zero(n)),
                                         {.restarts = 50, .seed = static_cast<std::uint64_t>(trial)});
        if (v.equivalent && v.residual <= 1e-3) ++recovered;
        worst = std::max(worst, v.residual);
    }
    const auto cc = linear_equivalent(shapes::cube(3), shapes::cross_polytope(3));
    return {recovered == 100 && !cc.equivalent && cc.residual >= 0.15,
            fmt("%d/100 planted pairs (max residual %.2e); cube vs cross-polytope %s, residual %.3f", recovered,
                worst, cc.equivalent ? "equivalent" : "not equivalent", cc.residual)};
}

VerifyReport run_suite(const std::string& lemma, VerifyOptions opt, double& secs) {
    const auto t0 = Clock::now();
    VerifyReport r = verify(lemma, opt);
    secs = seconds_since(t0);
    return r;
}

std::string counts(const VerifyReport& r) {
    return fmt("%d pass, %d fail, %d skipped", r.summary["passed"].get<int>(), r.summary["failed"].get<int>(),
               r.summary["skipped"].get<int>());
}

double max_of(const VerifyReport& r, const std::string& key) { return r.summary["max_residuals"].value(key, 0.0); }

Outcome lemma_3_2() {
    double t = 0;
    const VerifyReport r = run_suite("lemma-3.2", {.trials = 200, .seed = 1, .tol = 1e-6}, t);
    return {r.pass && r.summary["failed"] == 0 && t < 30.0,
            fmt("%s; max axis angle %.2e rad; %.1f s", counts(r).c_str(), max_of(r, "axis_angle"), t)};
}

Outcome lemma_3_3() {
    double t = 0;
    const VerifyReport r = run_suite("lemma-3.3", {.trials = 50, .dim = 4, .seed = 1, .tol = 1e-3}, t);
    return {r.pass && r.summary["failed"] == 0,
            fmt("%s; max ellipsoid residual %.2e, max revolution residual %.2e, max axis angle %.2e; %.1f s",
                counts(r).c_str(), max_of(r, "ellipsoid_residual"), max_of(r, "revolution_residual"),
                max_of(r, "recovered_axis_angle"), t)};
}

Outcome lemma_3_4() {
    double t1 = 0, t2 = 0;
    const VerifyReport p = run_suite("lemma-3.4-planarity", {.trials = 50, .seed = 1, .tol = 5e-3}, t1);
    const VerifyReport c = run_suite("lemma-3.4-contrapositive", {.trials = 50, .seed = 1, .tol = 1e-3}, t2);
    // Every contrapositive shadow must be at least 1e-2 away from an ellipsoid.
    double least = std::numeric_limits<double>::infinity();
    for (const auto& rec : c.records) least = std::min(least, rec.residuals.value("ellipsoid_residual", 0.0));
    return {p.pass && c.pass && least >= 1e-2,
            fmt("planarity %s, max %.2e (oblique max %.2e); contrapositive %s, min residual %.3f; %.1f s",
                counts(p).c_str(), max_of(p, "planarity"), max_of(p, "oblique_planarity"), counts(c).c_str(), least,
                t1 + t2)};
}

Outcome lemma_3_5() {
    double t = 0;
    const VerifyReport r = run_suite("lemma-3.5", {.trials = 20, .dim = 5, .seed = 1, .tol = 2e-2}, t);
    return {r.pass && r.summary["failed"] == 0 && t < 300.0,
            fmt("%s; max projected angle %.2e rad, max |N.l2| %.1e; %.1f s", counts(r).c_str(),
                max_of(r, "projected_axis_angle"), max_of(r, "normal_l2_dot"), t)};
}

Outcome ellipsoid_criterion() {
    Rng rng(8);
    const auto ellipsoid = ConvexBody::ellipsoid(Ellipsoid::from_axes(Vector::Zero(3), random_conditioned_matrix(3, 10, rng)));
    ScanOptions so;
    so.count = 8;
    so.seed = 1;
    const Json e = to_json(scan_projection_field(ellipsoid, so, "ellipsoid"), so)["summary"];
    const Json c = to_json(scan_projection_field(shapes::cube(3), so, "cube"), so)["summary"];
    const double e_ell = e["max_ellipsoid_residual"], e_pair = e["max_pairwise_residual"];
    const double c_ell = c["max_ellipsoid_residual"], c_pair = c["max_pairwise_residual"];
    double t = 0;
    const VerifyReport thm = run_suite("thm-4-ellipsoid-criterion", {.seed = 1}, t);
    return {e_ell <= 1e-6 && e_pair <= 1e-6 && c_ell >= 0.05 && c_pair >= 0.1 && thm.pass,
            fmt("ellipsoid scan: max is_ellipsoid %.1e, max pairwise %.1e; cube scan: max is_ellipsoid %.3f, max "
                "pairwise %.3f; suite %s",
                e_ell, e_pair, c_ell, c_pair, counts(thm).c_str())};
}

Outcome axis_recovery() {
    Rng rng(9);
    double worst = 0.0;
    int recovered = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 3 + trial % 2;
        const Vector axis = random_unit_vector(n, rng);
        const auto body = shapes::revolution_body(shapes::random_concave_profile(rng, 2), axis);
        const Matrix a = random_conditioned_matrix(n, 20, rng);
        const auto found = affine_revolution_axis(map_body(body, a, Vector::Zero(n)));
        const double angle = found ? line_angle(found->axis.direction(), a * axis) : kPi;
        worst = std::max(worst, angle);
        if (angle <= 1e-2) ++recovered;
    }
    int none = 0;
    none += !affine_revolution_axis(shapes::cube(3));
    for (int k = 0; k < 4; ++k) {
        const auto poly = shapes::polygonal_revolution(shapes::random_asymmetric_profile(rng), Vector::Unit(3, 2), 5 + k);
        none += !affine_revolution_axis(poly);
    }
    return {recovered == 50 && none == 5,
            fmt("%d/50 images within 1e-2 (max angle %.2e); %d/5 cube and asymmetric polytopes give none", recovered,
                worst, none)};
}

Outcome determinism() {
    int identical = 0;
    const auto ids = lemma_ids();
    for (const auto& id : ids) {
        VerifyOptions a{.trials = 2, .seed = 11, .threads = 1};
        VerifyOptions b = a;
        b.threads = 2;
        if (to_text(to_json(verify(id, a))) == to_text(to_json(verify(id, b)))) ++identical;
    }
    return {identical == static_cast<int>(ids.size()),
            fmt("%d/%zu suites byte-identical on repeat (1 vs 2 threads)", identical, ids.size())};
}

}  // namespace

int main() {
    report("mvee-correctness", mvee_correctness());
    report("mvee-affine-equivariance", mvee_equivariance());
    report("canonical-reduction-equivalence", canonical_reduction());
    report("lemma-3.2-suite", lemma_3_2());
    report("lemma-3.3-suite", lemma_3_3());
    report("lemma-3.4-suites", lemma_3_4());
    report("lemma-3.5-suite", lemma_3_5());
    report("ellipsoid-criterion", ellipsoid_criterion());
    report("axis-recovery", axis_recovery());
    report("determinism", determinism());
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
