#pragma once

#include "affrev/harness/scan.hpp"
#include "affrev/shapes.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <thread>

namespace affrev::harness {

inline constexpr double kAngleFloor = 5.0 * kPi / 180.0;
inline constexpr int kMaxResamples = 100;
inline constexpr double kMaxSkippedFraction = 0.05;

struct TrialRecord {
    std::string lemma;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string status;  // "pass", "fail" or "skipped"
    std::string note;
    Json params = Json::object();
    Json residuals = Json::object();
    int resamples = 0;
    double runtime = 0.0;  // seconds; reported only on request
};

struct VerifyOptions {
    int trials = 0;  // 0: suite default
    Eigen::Index dim = 0;
    std::uint64_t seed = 1;
    double tol = 0.0;
    bool plant_violation = false;
    unsigned threads = 0;  // 0: hardware concurrency
    bool timing = false;
};

struct VerifyReport {
    std::string lemma;
    VerifyOptions options;  // effective values
    Json thresholds = Json::object();
    std::vector<TrialRecord> records;
    Json summary = Json::object();
    bool pass = false;
};

// The instance could not be made non-degenerate within the resampling budget.
struct Degenerate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct TrialContext {
    Rng rng;
    TrialRecord& rec;
    const VerifyOptions& opt;
    Eigen::Index dim;
    double tol;
    int trial;

    // Draws until accept() holds, counting the retries.
    template <class Draw, class Accept>
    auto resample(Draw draw, Accept accept, const char* what) {
        for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
            auto v = draw();
            if (accept(v)) return v;
            ++rec.resamples;
        }
        throw Degenerate(what);
    }

    Vector unit_away_from(const Vector& from, const char* what) {
        return resample([&] { return random_unit_vector(dim, rng); },
                        [&](const Vector& v) { return line_angle(v, from) >= kAngleFloor; }, what);
    }
};

using TrialFn = std::function<bool(TrialContext&)>;

struct Suite {
    int trials;
    Eigen::Index dim;  // 0: alternate 3 and 4
    Eigen::Index min_dim;
    double tol;
    Json thresholds;
    TrialFn run;
    // Checks on the whole run beyond per-trial status.
    std::function<void(const std::vector<TrialRecord>&, double tol, Json& checks)> aggregate;
};

inline double max_residual(const std::vector<TrialRecord>& records, const std::string& key) {
    double m = 0.0;
    for (const auto& r : records)
        if (r.residuals.contains(key)) m = std::max(m, r.residuals[key].get<double>());
    return m;
}

inline Line ambient_line(const Matrix& basis, const Line& l) {
    return Line(basis * l.direction(), basis * l.base_point());
}

// Normal of a hyperplane given in the coordinates of basis, as an ambient vector.
inline Vector ambient_normal(const Matrix& basis, const Subspace& hyperplane) {
    return canonical_sign(Vector(basis * complement_basis(hyperplane.basis()).col(0)));
}

inline Matrix random_directions(Eigen::Index n, int count, Rng& rng) {
    Matrix d(n, count);
    for (int i = 0; i < count; ++i) d.col(i) = random_unit_vector(n, rng);
    return d;
}

// ------------------------------------------------------------------ suites

// Projected ball: the shadow on H of the unit ball of gamma centered at x is
// an ellipsoid of revolution about the predicted line.
inline bool lemma_3_2(TrialContext& c) {
    const auto n = c.dim;
    struct Pair {
        Vector ng, nh;
    };
    const Pair p = c.resample([&] { return Pair{random_unit_vector(n, c.rng), random_unit_vector(n, c.rng)}; },
                              [](const Pair& q) { return line_angle(q.ng, q.nh) >= kAngleFloor; },
                              "flats nearly parallel");
    const Subspace gamma = Subspace::hyperplane(p.ng, gaussian_vector(n, c.rng));
    const Subspace h = Subspace::hyperplane(p.nh, gaussian_vector(n, c.rng));
    const Vector x = gamma.to_ambient(gaussian_vector(n - 1, c.rng));
    Line predicted = predicted_projection_axis(gamma, x, h);
    if (c.opt.plant_violation) {
        // Tilt the prediction inside H by 1e-3 rad.
        const Vector d = predicted.direction();
        Vector w = h.basis() * random_unit_vector(n - 1, c.rng);
        w = (w - w.dot(d) * d).normalized();
        predicted = Line(std::cos(1e-3) * d + std::sin(1e-3) * w, predicted.base_point());
    }
    // Oracle: principal decomposition of P P^T with P = H^T G.
    const Matrix pm = h.basis().transpose() * gamma.basis();
    const Eigen::SelfAdjointEigenSolver<Matrix> es(pm * pm.transpose());
    double multiplicity = 0.0;
    for (Eigen::Index i = 1; i < n - 1; ++i) multiplicity = std::max(multiplicity, std::abs(es.eigenvalues()[i] - 1.0));
    const Vector oracle = h.basis() * es.eigenvectors().col(0);
    const Vector center = h.to_ambient(h.to_local(x));
    const double angle = line_angle(oracle, predicted.direction());
    const double offset = predicted.distance_to(center) / std::max(1.0, center.norm());
    c.rec.params = {{"dim", n}, {"flat_angle", line_angle(p.ng, p.nh)}};
    c.rec.residuals = {{"axis_angle", angle},
                       {"center_offset", offset},
                       {"eigenvalue_multiplicity", multiplicity},
                       {"eigenvalue_gap", 1.0 - es.eigenvalues()[0]}};
    return angle <= c.tol && offset <= 1e-9 && multiplicity <= 1e-9;
}

inline ConvexBody affine_revolution_instance(TrialContext& c, double cond, Vector& axis_out) {
    const Vector axis = random_unit_vector(c.dim, c.rng);
    const auto body = shapes::revolution_body(shapes::random_concave_profile(c.rng, 2), axis);
    const Matrix a = random_conditioned_matrix(c.dim, cond, c.rng);
    axis_out = (a * axis).normalized();
    return map_body(body, a, Vector::Zero(c.dim));
}

// Shadow of an affine body of revolution: an ellipsoid when the axis is
// parallel to ell, otherwise a body of revolution about the projected axis.
inline bool lemma_3_3(TrialContext& c) {
    Vector axis;
    const ConvexBody body = affine_revolution_instance(c, 10.0, axis);
    const bool parallel = c.trial % 5 == 0;
    const Vector ell = parallel ? axis : c.unit_away_from(axis, "direction nearly parallel to the axis");
    Vector claimed = axis;
    if (c.opt.plant_violation)
        claimed = c.resample([&] { return random_unit_vector(c.dim, c.rng); },
                             [&](const Vector& v) {
                                 return line_angle(v, axis) >= kAngleFloor && line_angle(v, ell) >= kAngleFloor;
                             },
                             "planted axis too close");
    const RevolutionShadow s = project_revolution(body, Line(claimed), ell);
    c.rec.params = {{"dim", c.dim}, {"case", s.predicted ? "line" : "ellipsoid"},
                    {"axis_ell_angle", line_angle(axis, ell)}};
    if (!s.predicted) {
        const double r = is_ellipsoid(s.shadow).residual;
        c.rec.residuals = {{"ellipsoid_residual", r}};
        return r <= c.tol;
    }
    const double r = affine_revolution_residual(s.shadow, *s.predicted);
    const double round = is_ellipsoid(s.shadow).residual;
    if (round <= 1e-6) {
        // A shadow can be exactly elliptical (one section covers the rest);
        // then every line through its center is an axis.
        c.rec.note = "elliptical shadow";
        c.rec.residuals = {{"revolution_residual", r}, {"ellipsoid_residual", round}};
        return r <= c.tol;
    }
    const RevolutionCertificate found = search_affine_revolution_axis(s.shadow);
    const double angle = angle_between(found.axis, *s.predicted);
    c.rec.residuals = {{"revolution_residual", r}, {"recovered_axis_angle", angle}, {"search_residual", found.residual}};
    return r <= c.tol && angle <= 1e-2;
}

inline double draw_exponent(Rng& rng) {
    // Away from p = 2, where the body would be an ellipsoid.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = u(rng);
    return s < 0.4 ? 1.5 + s / 0.4 * 0.3 : 2.5 + (s - 0.4) / 0.6 * 1.5;
}

// Shadow boundaries along directions inside the hyperplane of revolution are planar.
inline bool lemma_3_4_planarity(TrialContext& c) {
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    const double p = draw_exponent(c.rng);
    const double sc = scale(c.rng);
    const Vector axis = random_unit_vector(c.dim, c.rng);
    const auto body = shapes::revolution_body(shapes::smooth_profile(p, sc, 48), axis);
    const Vector ell = complement_of_vector(axis) * random_unit_vector(c.dim - 1, c.rng);
    const Vector oblique = (ell + axis).normalized();  // 45 degrees out of the hyperplane
    const double in_plane = shadow_boundary(body, c.opt.plant_violation ? oblique : ell).planarity_residual;
    const double off_plane = shadow_boundary(body, oblique).planarity_residual;
    c.rec.params = {{"dim", c.dim}, {"exponent", p}, {"scale", sc}, {"levels", 48}};
    c.rec.residuals = {{"planarity", in_plane}, {"oblique_planarity", off_plane}};
    return in_plane <= c.tol;
}

// Non-elliptical bodies of revolution cast non-elliptical shadows along
// directions in the hyperplane of revolution.
inline bool lemma_3_4_contrapositive(TrialContext& c) {
    const Vector axis = random_unit_vector(c.dim, c.rng);
    ConvexBody body = shapes::revolution_body(shapes::random_concave_profile(c.rng, 2), axis);
    if (c.opt.plant_violation) {
        // An ellipsoid of revolution: its shadows are ellipsoids.
        Matrix axes = complement_of_vector(axis);
        axes.conservativeResize(Eigen::NoChange, c.dim);
        axes.col(c.dim - 1) = 0.5 * axis;
        body = ConvexBody::ellipsoid(Ellipsoid::from_axes(Vector::Zero(c.dim), axes));
    }
    const Vector ell = complement_of_vector(axis) * random_unit_vector(c.dim - 1, c.rng);
    const double r = is_ellipsoid(project_along(body, ell)).residual;
    c.rec.params = {{"dim", c.dim}};
    c.rec.residuals = {{"ellipsoid_residual", r}};
    return r >= 10.0 * c.tol;
}

struct ShadowAxis {
    Line axis;
    Vector normal;  // N_ell
    double residual;
    bool degenerate;
};

// Axis data of the shadow along ell; empty when the shadow is an ellipsoid
// and the axis is not determined.
inline std::optional<ShadowAxis> shadow_axis(const ConvexBody& body, const Vector& ell) {
    const Matrix basis = complement_of_vector(ell);
    const ConvexBody shadow = project_along(body, ell);
    if (is_ellipsoid(shadow).residual <= 1e-3) return std::nullopt;
    const RevolutionCertificate cert = search_affine_revolution_axis(shadow);
    return ShadowAxis{ambient_line(basis, cert.axis), ambient_normal(basis, cert.hyperplane), cert.residual,
                      cert.degenerate};
}

// Axis compatibility: with N_{l1} ⊥ l2 the projections along P = span(l1, l2)
// of the two shadow axes agree.
inline bool lemma_3_5(TrialContext& c) {
    const auto n = c.dim;
    Vector axis;
    const ConvexBody body = affine_revolution_instance(c, 5.0, axis);
    struct First {
        Vector l1;
        std::optional<ShadowAxis> s1;
    };
    const First first = c.resample(
        [&] {
            const Vector l1 = random_unit_vector(n, c.rng);
            if (line_angle(l1, axis) < kAngleFloor) return First{l1, std::nullopt};
            return First{l1, shadow_axis(body, l1)};
        },
        [](const First& f) { return f.s1.has_value(); }, "first shadow is elliptical");
    const Vector& l1 = first.l1;
    const ShadowAxis& s1 = *first.s1;
    struct Pick {
        Vector l2;
        Matrix q;  // orthonormal basis of P
    };
    const Pick pick = c.resample(
        [&] {
            Vector g = gaussian_vector(n, c.rng);
            g -= g.dot(s1.normal) * s1.normal;
            const Vector l2 = g.normalized();
            Matrix pq(n, 2);
            pq << l1, l2;
            return Pick{l2, orthonormalize(pq)};
        },
        [&](const Pick& k) {
            if (k.q.cols() < 2 || line_angle(k.l2, l1) < kAngleFloor || line_angle(k.l2, axis) < kAngleFloor) return false;
            // The common projection Π_P(axis) must stay away from zero.
            const Vector rest = axis - k.q * (k.q.transpose() * axis);
            return rest.norm() >= std::sin(kAngleFloor);
        },
        "plane nearly contains the axis");
    const std::optional<ShadowAxis> second = shadow_axis(body, pick.l2);
    if (!second) throw Degenerate("second shadow is elliptical");
    const ShadowAxis& s2 = *second;
    Line l2_axis = s2.axis;
    if (c.opt.plant_violation) l2_axis = Line(c.unit_away_from(axis, "planted axis too close"));
    const auto proj = [&](const Vector& v) -> Vector { return v - pick.q * (pick.q.transpose() * v); };
    const Vector d1 = proj(s1.axis.direction()), d2 = proj(l2_axis.direction());
    const double angle = line_angle(d1, d2);
    const double truth1 = line_angle(d1, proj(axis));
    c.rec.params = {{"dim", n},
                    {"axis_l1_angle", line_angle(axis, l1)},
                    {"axis_l2_angle", line_angle(axis, pick.l2)}};
    c.rec.residuals = {{"projected_axis_angle", angle},
                       {"normal_l2_dot", std::abs(s1.normal.dot(pick.l2))},
                       {"l1_axis_residual", s1.residual},
                       {"l2_axis_residual", s2.residual},
                       {"l1_truth_angle", truth1}};
    return angle <= c.tol && std::abs(s1.normal.dot(pick.l2)) <= std::sin(1e-6) && !s1.degenerate;
}

inline ConvexBody random_ellipsoid(TrialContext& c, bool translated) {
    const Vector center = translated ? gaussian_vector(c.dim, c.rng) : Vector::Zero(c.dim);
    return ConvexBody::ellipsoid(Ellipsoid::from_axes(center, random_conditioned_matrix(c.dim, 10.0, c.rng)));
}

inline ConvexBody asymmetric_body(Eigen::Index n) {
    Matrix pts = Matrix::Zero(n, n + 1);
    pts.leftCols(n) = Matrix::Identity(n, n);
    pts.col(n) = Vector::Constant(n, -0.2);
    return ConvexBody::point_cloud(pts);
}

// Pairwise affinely equivalent shadows force central symmetry.
inline bool cor_2_2(TrialContext& c) {
    const ConvexBody body = random_ellipsoid(c, true);
    const Matrix dirs = random_directions(c.dim, 6, c.rng);
    std::vector<ConvexBody> shadows;
    for (Eigen::Index i = 0; i < dirs.cols(); ++i) shadows.push_back(project_along(body, dirs.col(i)));
    double worst = 0.0;
    for (std::size_t i = 0; i < shadows.size(); ++i)
        for (std::size_t j = i + 1; j < shadows.size(); ++j)
            worst = std::max(worst, affine_equivalent(shadows[i], shadows[j]).residual);
    const bool premise = worst <= EquivalenceOptions{}.tol;
    const ConvexBody& tested = c.opt.plant_violation ? asymmetric_body(c.dim) : body;
    const double symmetry = central_symmetry_center(tested).residual / tested.diameter();
    c.rec.params = {{"dim", c.dim}, {"shadows", shadows.size()}, {"premise", premise}};
    c.rec.residuals = {{"max_pairwise_residual", worst}, {"symmetry_residual", symmetry}};
    if (!premise) c.rec.note = "premise not met";
    return !premise || symmetry <= c.tol;
}

// A body all of whose hyperplane shadows are ellipsoids is an ellipsoid.
inline bool thm_4(TrialContext& c) {
    const ConvexBody body = random_ellipsoid(c, false);
    ScanOptions so;
    so.count = 6;
    so.seed = mix_seed(c.rec.seed, 7);
    so.ellipse_tol = c.tol;
    const Json summary = to_json(scan_projection_field(body, so), so)["summary"];
    const bool premise = summary["all_shadows_elliptical"].get<bool>();
    const double conclusion =
        is_ellipsoid(c.opt.plant_violation ? shapes::cube(c.dim) : body, {.tol = c.tol}).residual;
    c.rec.params = {{"dim", c.dim}, {"shadows", 6}, {"premise", premise}};
    c.rec.residuals = {{"max_shadow_ellipsoid_residual", summary["max_ellipsoid_residual"]},
                       {"max_pairwise_residual", summary["max_pairwise_residual"]},
                       {"body_ellipsoid_residual", conclusion}};
    if (!premise) c.rec.note = "premise not met";
    return !premise || conclusion <= c.tol;
}

inline const std::map<std::string, Suite>& suites() {
    static const std::map<std::string, Suite> table = [] {
        std::map<std::string, Suite> s;
        s["lemma-3.2"] = {200, 0, 3, 1e-6, {{"axis_angle", "tol"}, {"center_offset", 1e-9}, {"eigenvalue_multiplicity", 1e-9}},
                          lemma_3_2, nullptr};
        s["lemma-3.3"] = {50, 4, 3, 1e-3, {{"ellipsoid_residual", "tol"}, {"revolution_residual", "tol"}, {"recovered_axis_angle", 1e-2}},
                          lemma_3_3, nullptr};
        s["lemma-3.4-planarity"] = {
            50, 3, 3, 5e-3, {{"planarity", "tol"}, {"oblique_planarity_max", ">= 10 tol"}}, lemma_3_4_planarity,
            [](const std::vector<TrialRecord>& r, double tol, Json& checks) {
                checks["oblique_exceeds_planar_tolerance"] = max_residual(r, "oblique_planarity") >= 10.0 * tol;
            }};
        s["lemma-3.4-contrapositive"] = {50, 0, 3, 1e-3, {{"ellipsoid_residual", ">= 10 tol"}}, lemma_3_4_contrapositive, nullptr};
        s["lemma-3.5"] = {20, 5, 5, 2e-2, {{"projected_axis_angle", "tol"}, {"normal_l2_dot", std::sin(1e-6)}}, lemma_3_5, nullptr};
        s["cor-2.2-consistency"] = {20, 3, 2, 1e-6, {{"symmetry_residual", "tol"}, {"max_pairwise_residual", EquivalenceOptions{}.tol}},
                                    cor_2_2, nullptr};
        s["thm-4-ellipsoid-criterion"] = {10, 3, 3, 1e-6, {{"body_ellipsoid_residual", "tol"}, {"max_shadow_ellipsoid_residual", "tol"}},
                                          thm_4, nullptr};
        return s;
    }();
    return table;
}

}  // namespace detail

inline std::vector<std::string> lemma_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, suite] : detail::suites()) ids.push_back(id);
    return ids;
}

// Runs a lemma suite. Trials are independent (seed = mix_seed(seed, trial))
// and are collected in trial order whatever the thread count.
inline VerifyReport verify(const std::string& lemma, VerifyOptions opt = {}) {
    const auto it = detail::suites().find(lemma);
    if (it == detail::suites().end()) throw std::invalid_argument("unknown lemma id '" + lemma + "'");
    const detail::Suite& suite = it->second;
    if (opt.trials == 0) opt.trials = suite.trials;
    if (opt.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (opt.tol == 0.0) opt.tol = suite.tol;
    if (!(opt.tol > 0.0) || !std::isfinite(opt.tol)) throw std::invalid_argument("tol must be positive");
    if (opt.dim == 0) opt.dim = suite.dim;
    if (opt.dim != 0 && (opt.dim < suite.min_dim || opt.dim > 8))
        throw std::invalid_argument(lemma + " needs dim in [" + std::to_string(suite.min_dim) + ", 8]");
    if (opt.threads == 0) opt.threads = std::max(1u, std::thread::hardware_concurrency());

    VerifyReport report;
    report.lemma = lemma;
    report.options = opt;
    report.thresholds = suite.thresholds;
    report.records.resize(static_cast<std::size_t>(opt.trials));
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next++; i < opt.trials; i = next++) {
            TrialRecord& rec = report.records[static_cast<std::size_t>(i)];
            rec.lemma = lemma;
            rec.trial = i;
            rec.seed = mix_seed(opt.seed, static_cast<std::uint64_t>(i));
            const Eigen::Index n = opt.dim != 0 ? opt.dim : 3 + i % 2;
            detail::TrialContext ctx{Rng(rec.seed), rec, opt, n, opt.tol, i};
            const auto start = std::chrono::steady_clock::now();
            try {
                rec.status = suite.run(ctx) ? "pass" : "fail";
            } catch (const Degenerate& e) {
                rec.status = "skipped";
                rec.note = std::string("skipped: degenerate (") + e.what() + ")";
            } catch (const std::exception& e) {
                rec.status = "fail";
                rec.note = std::string("error: ") + e.what();
            }
            rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.trials)); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int passed = 0, failed = 0, skipped = 0;
    for (const auto& r : report.records) {
        if (r.status == "pass") ++passed;
        else if (r.status == "fail") ++failed;
        else ++skipped;
    }
    const double skipped_fraction = static_cast<double>(skipped) / opt.trials;
    Json checks = {{"no_failures", failed == 0}, {"skipped_within_budget", skipped_fraction <= kMaxSkippedFraction}};
    if (suite.aggregate) suite.aggregate(report.records, opt.tol, checks);
    Json maxima = Json::object();
    for (const auto& r : report.records)
        for (auto e = r.residuals.begin(); e != r.residuals.end(); ++e)
            maxima[e.key()] = std::max(maxima.value(e.key(), 0.0), e.value().get<double>());
    report.pass = std::all_of(checks.begin(), checks.end(), [](const Json& v) { return v.get<bool>(); });
    report.summary = {{"passed", passed},     {"failed", failed},  {"skipped", skipped},
                      {"skipped_fraction", skipped_fraction},      {"max_residuals", maxima},
                      {"checks", checks},     {"pass", report.pass}};
    return report;
}

inline Json to_json(const TrialRecord& r, bool timing) {
    Json j = {{"lemma_id", r.lemma}, {"trial", r.trial},     {"seed", r.seed},         {"status", r.status},
              {"note", r.note},      {"params", r.params},   {"residuals", r.residuals}, {"resamples", r.resamples}};
    if (timing) j["runtime"] = r.runtime;
    return j;
}

inline Json to_json(const VerifyReport& r) {
    Json records = Json::array();
    for (const auto& rec : r.records) records.push_back(to_json(rec, r.options.timing));
    return {{"schema", "affrev-verify/1"},
            {"lemma_id", r.lemma},
            {"parameters",
             {{"trials", r.options.trials},
              {"dim", r.options.dim},
              {"seed", r.options.seed},
              {"plant_violation", r.options.plant_violation},
              {"angle_floor_degrees", 5},
              {"max_resamples", kMaxResamples}}},
            {"tolerances", {{"tol", r.options.tol}, {"thresholds", r.thresholds}, {"max_skipped_fraction", kMaxSkippedFraction}}},
            {"records", records},
            {"summary", r.summary}};
}

}  // namespace affrev::harness
