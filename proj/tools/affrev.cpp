#include "affrev/harness/generators.hpp"
#include "affrev/harness/report.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace affrev;
using namespace affrev::harness;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    double tol = 0.0;  // 0: command default
    long dirs = 0;     // 0: command default
    int trials = 0;
    long dim = 0;
    std::string out = "-";
    std::string svg;
};

struct BodySource {
    std::string body;  // path to a body JSON
    std::string spec;  // generator descriptor, inline or @path

    void add(CLI::App* cmd, const std::string& prefix = "") {
        cmd->add_option("--" + prefix + "body", body, "Body JSON file");
        cmd->add_option("--" + prefix + "spec", spec, "Generator descriptor (JSON or @file)");
    }

    Generated load(std::uint64_t seed) const {
        if (body.empty() == spec.empty()) throw IoError("give exactly one of --body and --spec");
        if (!body.empty()) return {read_body(body), std::nullopt};
        const std::string text = spec.front() == '@' ? read_text(spec.substr(1)) : spec;
        return generate(parse_json(text, "spec"), seed);
    }
};

Vector parse_vector(const std::vector<double>& v, const std::string& what) {
    if (v.empty()) throw IoError(what + " is required");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) throw IoError(what + " is not finite");
        out[static_cast<Eigen::Index>(i)] = v[i];
    }
    return out;
}

void emit(const Globals& g, const Json& j) { write_text(g.out, to_text(j)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex bodies, minimal ellipsoids, affine equivalence and bodies of revolution"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--tol", g.tol, "Acceptance tolerance (0: command default)");
    app.add_option("--dirs", g.dirs, "Direction count: scan directions, equivalence or axis-grid samples");
    app.add_option("--trials", g.trials, "Trials for verify");
    app.add_option("--dim", g.dim, "Ambient dimension for verify");
    app.add_option("--out", g.out, "Output path ('-' for stdout)");
    app.add_option("--svg", g.svg, "SVG path (scan: prefix) for 2-D shadows");

    int code = 0;

    auto* gen = app.add_subcommand("gen", "Generate a body from a descriptor");
    std::string gen_spec;
    gen->add_option("spec", gen_spec, "Generator descriptor (JSON or @file)")->required();
    gen->callback([&] {
        BodySource src{"", gen_spec};
        const Generated b = src.load(g.seed);
        Json j = to_json(b.body);
        if (b.axis) j["axis"] = to_json(*b.axis);
        emit(g, j);
    });

    auto* proj = app.add_subcommand("project", "Orthogonal projection along a direction");
    BodySource proj_src;
    proj_src.add(proj);
    std::vector<double> proj_dir;
    proj->add_option("--dir", proj_dir, "Projection direction, comma separated")->delimiter(',')->required();
    proj->callback([&] {
        const ConvexBody body = proj_src.load(g.seed).body;
        const Vector u = parse_vector(proj_dir, "--dir");
        if (u.size() != body.dim() || u.norm() == 0.0) throw IoError("--dir must be a nonzero vector of the body's dimension");
        const ConvexBody shadow = project_along(body, u);
        Json j = to_json(shadow);
        j["direction"] = to_json(Vector(u.normalized()));
        j["basis"] = columns_to_json(complement_of_vector(u.normalized()));
        if (!g.svg.empty()) write_text(g.svg, emit_svg(shadow));
        emit(g, j);
    });

    auto* mv = app.add_subcommand("mvee", "Minimum-volume enclosing ellipsoid");
    BodySource mv_src;
    mv_src.add(mv);
    double mv_eps = kMveeDefaultEps;
    bool mv_centered = false;
    mv->add_option("--eps", mv_eps, "Duality-gap tolerance");
    mv->add_flag("--centered", mv_centered, "Center at the origin (default for symmetric bodies)");
    mv->callback([&] {
        const ConvexBody body = mv_src.load(g.seed).body;
        emit(g, to_json(mvee(body, mv_eps, mv_centered || body.symmetric())));
    });

    auto* canon = app.add_subcommand("canon", "Canonical form: the minimal ellipsoid mapped to the unit ball");
    BodySource canon_src;
    canon_src.add(canon);
    canon->callback([&] {
        const ConvexBody body = canon_src.load(g.seed).body;
        const Canonical c = canonicalize(body, kMveeDefaultEps, body.symmetric());
        emit(g, {{"body", to_json(c.body)}, {"map", to_json(c.map)}, {"fit", to_json(c.fit)}});
    });

    auto* eq = app.add_subcommand("equiv", "Linear or affine equivalence of two bodies");
    BodySource eq_a, eq_b;
    eq_a.add(eq, "a-");
    eq_b.add(eq, "b-");
    bool eq_affine = false;
    int eq_restarts = 50;
    eq->add_flag("--affine", eq_affine, "Allow translations");
    eq->add_option("--restarts", eq_restarts, "Alignment restarts");
    eq->callback([&] {
        const ConvexBody a = eq_a.load(mix_seed(g.seed, 1)).body;
        const ConvexBody b = eq_b.load(mix_seed(g.seed, 2)).body;
        EquivalenceOptions o;
        if (g.tol > 0) o.tol = g.tol;
        o.restarts = eq_restarts;
        o.seed = g.seed;
        o.dirs = g.dirs;
        const EquivalenceVerdict v = eq_affine ? affine_equivalent(a, b, o) : linear_equivalent(a, b, o);
        Json j = to_json(v);
        j["tolerance"] = o.tol;
        emit(g, j);
        code = v.equivalent ? 0 : 1;
    });

    auto* ax = app.add_subcommand("axis", "Axis of revolution (affine unless --linear)");
    BodySource ax_src;
    ax_src.add(ax);
    bool ax_linear = false;
    ax->add_flag("--linear", ax_linear, "Search for a Euclidean axis through the origin");
    ax->callback([&] {
        const Generated src = ax_src.load(g.seed);
        RevolutionOptions o;
        if (g.tol > 0) o.tol = g.tol;
        if (g.dirs > 0) o.grid = g.dirs;
        o.seed = g.seed;
        const RevolutionCertificate cert =
            ax_linear ? search_revolution_axis(src.body, o) : search_affine_revolution_axis(src.body, o);
        const bool found = cert.residual <= o.tol;
        Json j = {{"found", found}, {"certificate", to_json(cert)}, {"tolerance", o.tol}};
        if (src.axis) j["planted_axis_angle"] = angle_between(cert.axis, *src.axis);
        if (!g.svg.empty()) {
            std::vector<Line> axes;
            if (found) axes.push_back(cert.axis);
            write_text(g.svg, emit_svg(src.body, axes));
        }
        emit(g, j);
        code = found ? 0 : 1;
    });

    auto* sc = app.add_subcommand("scan", "Projection-field scan over sampled directions");
    BodySource sc_src;
    sc_src.add(sc);
    std::vector<std::vector<double>> sc_dirs;
    std::string sc_csv, sc_id = "body";
    sc->add_option("--dir", sc_dirs, "Explicit direction (repeatable), comma separated")->delimiter(',')->allow_extra_args(false);
    sc->add_option("--csv", sc_csv, "Also write the pairwise residual matrix as CSV");
    sc->add_option("--id", sc_id, "Body identifier for the report");
    sc->callback([&] {
        const ConvexBody body = sc_src.load(g.seed).body;
        ScanOptions o;
        o.count = g.dirs > 0 ? g.dirs : 8;
        o.seed = g.seed;
        if (g.tol > 0) o.tol = g.tol;
        o.equivalence.seed = g.seed;
        for (const auto& d : sc_dirs) o.directions.push_back(parse_vector(d, "--dir"));
        const ScanReport r = scan_projection_field(body, o, sc_id);
        const Json j = to_json(r, o);
        if (!sc_csv.empty()) write_text(sc_csv, to_csv(j));
        if (!g.svg.empty() && body.dim() == 3)
            for (std::size_t i = 0; i < r.shadows.size(); ++i) {
                const auto& s = r.shadows[i];
                std::vector<Line> axes;
                if (s.axis)
                    axes.push_back(Line(s.basis.transpose() * s.axis->direction(), s.basis.transpose() * s.axis->base_point()));
                write_text(g.svg + "-" + std::to_string(i) + ".svg", emit_svg(project_along(body, s.direction), axes));
            }
        emit(g, j);
    });

    auto* ver = app.add_subcommand("verify", "Randomized property suite for one statement");
    std::string lemma, ver_csv;
    VerifyOptions vo;
    ver->add_option("lemma", lemma, "Suite id")->required()->check(CLI::IsMember(lemma_ids()));
    ver->add_option("--threads", vo.threads, "Worker threads (0: all cores)");
    ver->add_flag("--plant-violation", vo.plant_violation, "Run on deliberately broken instances");
    ver->add_flag("--timing", vo.timing, "Include per-trial runtime (output is then not reproducible)");
    ver->add_option("--csv", ver_csv, "Also write the records as CSV");
    ver->callback([&] {
        vo.trials = g.trials;
        vo.dim = g.dim;
        vo.seed = g.seed;
        vo.tol = g.tol;
        const VerifyReport r = verify(lemma, vo);
        const Json j = to_json(r);
        if (!ver_csv.empty()) write_text(ver_csv, to_csv(j));
        emit(g, j);
        const auto& s = r.summary;
        std::cerr << lemma << ": " << s["passed"] << " passed, " << s["failed"] << " failed, " << s["skipped"]
                  << " skipped" << (r.pass ? "" : " -- FAIL") << '\n';
        if (!s["checks"]["skipped_within_budget"].get<bool>())
            std::cerr << lemma << ": skipped fraction " << s["skipped_fraction"] << " exceeds "
                      << kMaxSkippedFraction << '\n';
        code = r.pass ? 0 : 1;
    });

    auto* rep = app.add_subcommand("report", "Validate a saved report and re-emit it as JSON or CSV");
    std::string rep_in, rep_format = "json";
    rep->add_option("input", rep_in, "Report JSON")->required();
    rep->add_option("--format", rep_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    rep->callback([&] { write_text(g.out, emit_report(parse_json(read_text(rep_in), rep_in), rep_format)); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return code;
}
