#include "fbw/pipelines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

#include "fbw/counterexample.hpp"
#include "fbw/io.hpp"
#include "fbw/obstacle.hpp"

namespace fbw {

namespace {

ReportHook g_hook = nullptr;

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::string report_name(const RunConfig& c) { return c.pipeline == "verify" ? "verify.json" : "report.json"; }

// window of a set of polylines, padded; flat extents get a small height
std::array<double, 4> bbox(const std::vector<Polyline>& lines) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& l : lines)
        for (const auto& p : l.pts) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    if (!(x1 >= x0)) return {-1, 1, -1, 1};
    const double w = std::max(x1 - x0, 1e-3), hgt = std::max(y1 - y0, 1e-3 * std::max(1.0, w));
    const double px = 0.05 * w, py = 0.05 * hgt;
    const double cy = 0.5 * (y0 + y1);
    return {x0 - px, x0 + w + px, cy - 0.5 * hgt - py, cy + 0.5 * hgt + py};
}

std::string svg_fit(const std::vector<Polyline>& lines) {
    const auto b = bbox(lines);
    return svg_polylines(lines, b[0], b[1], b[2], b[3]);
}

std::vector<Polyline> graph_lines(const std::vector<double>& xs, const std::vector<double>& ep,
                                  const std::vector<double>& em, const std::vector<std::uint8_t>* valid = nullptr) {
    std::vector<Polyline> out;
    for (int q = 0; q < 2; ++q) {
        const auto& e = q == 0 ? ep : em;
        Polyline cur{{}, q == 0 ? "red" : "blue", 1.0};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (valid && !(*valid)[i]) {
                if (cur.pts.size() > 1) out.push_back(cur);
                cur.pts.clear();
                continue;
            }
            cur.pts.push_back({xs[i], e[i]});
        }
        if (cur.pts.size() > 1) out.push_back(cur);
    }
    return out;
}

// one bar per check, length ~ log10 of the sup residual over [1e-16, 1]
std::string residual_strip(const ResidualReport& r) {
    std::vector<Polyline> lines;
    const auto& cs = r.checks();
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const double s = std::isfinite(cs[k].sup) ? std::max(cs[k].sup, 1e-16) : 1.0;
        const double len = std::clamp((std::log10(s) + 16.0) / 16.0, 0.002, 1.0);
        const double y = -static_cast<double>(k) - 0.5;
        lines.push_back({{{0.0, y}, {len, y}}, cs[k].pass ? "green" : "red", 4.0});
    }
    return svg_polylines(lines, 0.0, 1.0, -static_cast<double>(std::max<std::size_t>(cs.size(), 1)), 0.0);
}

void add_field(PipelineResult& res, const std::string& stem, const ScalarField& f,
               nlohmann::ordered_json& descriptors) {
    res.artifacts.push_back({stem + ".csv", "csv", field_to_csv(f)});
    descriptors.push_back(field_descriptor(f, stem + ".csv"));
}

void finish_artifacts(PipelineResult& res, const nlohmann::ordered_json& descriptors) {
    if (!descriptors.empty()) res.artifacts.push_back({"fields.json", "json", descriptors.dump(2) + "\n"});
    res.artifacts.push_back({"residuals.svg", "svg", residual_strip(res.report)});
}

PipelineResult run_twoplane(const RunConfig& c) {
    PipelineResult res;
    ResidualReport& rep = res.report;
    const double tol = c.tol > 0.0 ? c.tol : 1e-6;
    const GridSpec g = GridSpec::covering(c.xmin, c.xmax, c.ymin, c.ymax, c.h);
    const TwoPhaseSolution sol = make_two_plane(c.lambda_plus, c.lambda_minus, g);
    TwoPhaseCheckOptions to;
    to.tol = tol;
    rep.merge(residuals_two_phase(sol, to), "bernoulli.");
    WeierstrassOptions wo;
    wo.tol = tol;
    const WeierstrassPair w = build_weierstrass(sol, wo);
    rep.merge(verify_capillary(sol, w, wo), "capillary.");
    rep.merge(verify_boundary_transform(sol, w, wo), "transform.");
    const MembraneState st = build_membrane(sol, w);
    MembraneCheckOptions mo;
    mo.tol = tol;
    rep.merge(membrane_residuals(st, &sol, mo), "membrane.");
    const ThinObstacleResult tr = thin_obstacle_reduction(st, mo);
    rep.merge(tr.report, "thin.");
    rep.merge(twoplane_closed_forms(sol, w, st, c.tol > 0.0 ? c.tol : 1e-3), "closed.");
    rep.meta()["lambda"] = fmt_double(sol.lambda());

    const BranchingSet b = branching_set(sol, 4.0 * c.h);
    res.artifacts.push_back({"branching.json", "json", branching_json(b).dump(2) + "\n"});
    nlohmann::ordered_json desc = nlohmann::ordered_json::array();
    add_field(res, "u", sol.u, desc);
    add_field(res, "d", st.d, desc);
    res.artifacts.push_back({"graphs.svg", "svg",
                             svg_polylines(graph_lines(sol.xs, sol.eta_plus, sol.eta_minus), g.x0, g.x1(), g.y0, g.y1())});
    std::vector<Polyline> traces;
    for (const WeierstrassSurface* s : {&w.plus, &w.minus}) {
        Polyline l{{}, s->phase > 0 ? "red" : "blue", 1.0};
        for (std::size_t i = 0; i < sol.xs.size(); ++i) {
            double p[3];
            if (surface_trace(sol, *s, i, p)) l.pts.push_back({p[0], p[1]});
        }
        if (l.pts.size() > 1) traces.push_back(l);
    }
    if (!traces.empty()) res.artifacts.push_back({"traces.svg", "svg", svg_fit(traces)});
    std::vector<Polyline> dl;
    Polyline dt{{}, "black", 1.0};
    for (int i = 0; i < st.grid.nx; ++i)
        if (st.d.active(i, 0)) dt.pts.push_back({st.grid.x(i), st.d(i, 0)});
    if (dt.pts.size() > 1) dl.push_back(dt);
    for (const auto& [a, bb] : tr.intervals) dl.push_back({{{a, 0.0}, {bb, 0.0}}, "green", 3.0});
    if (!dl.empty()) res.artifacts.push_back({"dtrace.svg", "svg", svg_fit(dl)});
    rep.meta()["tol"] = fmt_double(tol);
    finish_artifacts(res, desc);
    return res;
}

PipelineResult run_counterexample(const RunConfig& c) {
    PipelineResult res;
    ResidualReport& rep = res.report;
    const double tol = c.tol > 0.0 ? c.tol : 20.0 * c.h * c.h;
    const IntervalUnion K(parse_intervals(c.K));
    auto [cb, sol] = assemble_counterexample(K, c.h);
    const BranchingVerdict v = verify_branching_prescription(cb, sol);
    rep.add_value("branching.hausdorff", v.hausdorff, 4.0 * c.h);
    rep.add_value("branching.count",
                  std::abs(static_cast<double>(v.measured.size()) - static_cast<double>(v.expected.size())), 0.0);
    TwoPhaseCheckOptions to;
    to.tol = tol;
    to.contact_tol = 0.0;
    rep.merge(residuals_two_phase(sol, to), "bernoulli.");
    WeierstrassOptions wo;
    wo.tol = tol;
    wo.contact_tol = 0.0;
    const WeierstrassPair w = build_weierstrass(sol, wo);
    rep.merge(verify_capillary(sol, w, wo), "capillary.");
    rep.merge(verify_boundary_transform(sol, w, wo), "transform.");

    auto eta_max = [](const TwoPhaseSolution& s) {
        double m = 0.0;
        for (double e : s.eta_plus) m = std::max(m, e);
        return m;
    };
    rep.meta()["lambda"] = fmt_double(sol.lambda());
    rep.meta()["lambda_ref"] = fmt_double(sol.lambda_plus);
    rep.meta()["eta_max_height_1"] = fmt_double(eta_max(sol));
    CounterexampleOptions low;
    low.height = 0.75;
    const auto alt = assemble_counterexample(K, c.h, low);
    rep.meta()["lambda_ref_height_0.75"] = fmt_double(alt.second.lambda_plus);
    rep.meta()["eta_max_height_0.75"] = fmt_double(eta_max(alt.second));
    rep.meta()["membrane_flagged"] = std::to_string(cb.flagged);
    rep.meta()["tol"] = fmt_double(tol);

    BranchingSet b;
    b.points = v.measured;
    b.h = c.h;
    res.artifacts.push_back({"branching.json", "json", branching_json(b).dump(2) + "\n"});
    nlohmann::ordered_json desc = nlohmann::ordered_json::array();
    add_field(res, "u", sol.u, desc);
    add_field(res, "w_plus", cb.w_plus, desc);
    const GridSpec& g = sol.u.grid;
    res.artifacts.push_back({"graphs.svg", "svg",
                             svg_polylines(graph_lines(sol.xs, sol.eta_plus, sol.eta_minus), g.x0, g.x1(), g.y0, g.y1())});
    finish_artifacts(res, desc);
    return res;
}

PipelineResult run_obstacle(const RunConfig& c) {
    PipelineResult res;
    ResidualReport& rep = res.report;
    const double h = c.h;
    const GridSpec g = GridSpec::covering(c.xmin, c.xmax, c.ymin, c.ymax, h);
    const ObstacleCase oc = obstacle_case(c.obstacle);
    const ObstacleSolution sol = make_obstacle(g, oc);
    rep.meta()["sweeps"] = std::to_string(sol.sweeps);
    rep.meta()["lambda"] = "1";
    rep.add_value("solver.complementarity", complementarity_residual(sol.u), c.tol > 0.0 ? c.tol : 1e-6);
    if (oc.exact) {
        double e = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) e = std::max(e, std::abs(sol.u(i, j) - oc.exact(g.x(i), g.y(j))));
        rep.add_value("solver.exact_error", e, 10.0 * h * h);
    }
    nlohmann::ordered_json desc = nlohmann::ordered_json::array();
    add_field(res, "u", sol.u, desc);
    if (std::none_of(sol.omega.begin(), sol.omega.end(), [](auto m) { return m != 0; })) {
        rep.warnings().push_back("empty non-contact set; no free boundary");
        finish_artifacts(res, desc);
        return res;
    }

    const ConjugatePair cp = conjugate_pair(sol);
    rep.add_value("conjugate.identity", cp.identity, 1e-12);
    rep.add_value("conjugate.cr_T", cp.cr_T_sup, 50.0 * h * h);
    rep.add_value("conjugate.cr_S", cp.cr_S_sup, 50.0 * h * h);
    rep.merge(weierstrass_forms_obstacle(sol).report, "forms.");

    const BoundaryStratification st = stratify_boundary(sol);
    rep.meta()["reg"] = std::to_string(st.reg);
    rep.meta()["sing"] = std::to_string(st.sing);
    rep.meta()["unresolved"] = std::to_string(st.unresolved);
    rep.meta()["flagged"] = std::to_string(st.flagged);
    rep.merge(boundary_condition_check(sol, st), "bc.");
    const BranchingSet b = branching_points_obstacle(sol, st);
    rep.meta()["branch_count"] = std::to_string(b.points.size());
    res.artifacts.push_back({"branching.json", "json", branching_json(b).dump(2) + "\n"});

    if (c.obstacle.rfind("radial", 0) == 0) {
        rep.warnings().push_back("membrane chart is not injective around a contact disk; membrane skipped");
    } else {
        try {
            const ObstacleMembrane m = obstacle_membrane(sol, st.graphs, c.tol > 0.0 ? c.tol : 1e-6);
            rep.merge(m.report, "membrane.");
            add_field(res, "w_plus", m.state.w_plus, desc);
        } catch (const InputError& e) {
            rep.warnings().push_back(std::string("membrane skipped: ") + e.what());
        }
    }
    res.artifacts.push_back(
        {"graphs.svg", "svg",
         svg_polylines(graph_lines(st.graphs.xs, st.graphs.eta_plus, st.graphs.eta_minus, &st.graphs.valid), g.x0,
                       g.x1(), g.y0, g.y1())});
    finish_artifacts(res, desc);
    return res;
}

PipelineResult run_verify(const RunConfig& c) {
    const std::string dir = c.input.empty() ? c.out : c.input;
    const std::string saved_text = read_file(join(dir, "report.json"));
    nlohmann::ordered_json saved;
    try {
        saved = nlohmann::ordered_json::parse(saved_text);
    } catch (const std::exception& e) {
        throw InputError("saved report is not JSON: " + std::string(e.what()));
    }
    if (saved.value("status", "") == "failed") throw InputError("saved run is marked failed");
    if (!saved.contains("meta") || !saved["meta"].contains("config"))
        throw InputError("saved report has no recorded config");
    const RunConfig rc = parse_config(saved["meta"]["config"].get<std::string>());
    if (rc.pipeline == "verify") throw InputError("cannot verify a verify run");
    validate(rc);
    PipelineResult res = run_pipeline(rc);
    ResidualReport& rep = res.report;
    const ResidualReport old = ResidualReport::from_json(saved);

    std::vector<double> diffs;
    double flag_mismatch = 0.0;
    for (const auto& oc : old.checks()) {
        if (!rep.has(oc.name)) {
            diffs.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const auto& nc = rep.at(oc.name);
        const bool both_nan = std::isnan(oc.sup) && std::isnan(nc.sup);
        diffs.push_back(both_nan ? 0.0 : std::abs(oc.sup - nc.sup) / std::max(1.0, std::abs(oc.sup)));
        if (oc.pass != nc.pass) flag_mismatch += 1.0;
    }
    ResidualReport replay;
    replay.add("checks", diffs, 1e-12);
    replay.add_value("pass_flags", flag_mismatch, 0.0);
    for (const auto& a : res.artifacts) {
        if (a.format != "csv") continue;
        const std::string path = join(dir, a.name);
        if (!std::filesystem::exists(path)) continue;
        const ScalarField s = field_from_csv(read_file(path)), n = field_from_csv(a.content);
        double e = 0.0;
        if (!(s.grid == n.grid) || s.mask != n.mask) {
            e = std::numeric_limits<double>::infinity();
        } else {
            for (std::size_t k = 0; k < s.values.size(); ++k)
                if (s.mask[k]) e = std::max(e, std::abs(s.values[k] - n.values[k]));
        }
        replay.add_value(a.name, e, 1e-12);
    }
    rep.merge(replay, "replay.");
    rep.meta()["saved_report_hash"] = content_hash(saved_text);
    PipelineResult out;
    out.report = rep;
    return out;
}

}  // namespace

ResidualReport twoplane_closed_forms(const TwoPhaseSolution& sol, const WeierstrassPair& w, const MembraneState& st,
                                     double tol) {
    const double lam = sol.lambda();
    const double c1 = (1 + lam * lam) / (2 * lam), c2 = (lam * lam - 1) / (2 * lam);
    const double nz = (1 - lam * lam) / (1 + lam * lam);
    ResidualReport rep;
    // deviation from a + k * coordinate, a taken at the base sample
    auto affine = [](const ScalarField& f, double k, bool along_x, std::pair<int, int> base) {
        const GridSpec& g = f.grid;
        auto dev = [&](int i, int j) { return f(i, j) - k * (along_x ? g.x(i) : g.y(j)); };
        double ref = 0.0;
        bool have = false;
        if (f.active(base.first, base.second)) {
            ref = dev(base.first, base.second);
            have = true;
        }
        std::vector<double> r;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (!f.active(i, j)) continue;
                if (!have) {
                    ref = dev(i, j);
                    have = true;
                }
                r.push_back(dev(i, j) - ref);
            }
        return r;
    };
    auto merged = affine(w.plus.psi1, c1, true, w.plus.base);
    const auto m2 = affine(w.minus.psi1, c1, true, w.minus.base);
    merged.insert(merged.end(), m2.begin(), m2.end());
    rep.add("psi1", merged, tol);
    rep.add("psi2_plus", affine(w.plus.psi2, c2, false, w.plus.base), tol);
    std::vector<double> r;
    const auto& z = w.plus.nu.z;
    for (std::size_t k = 0; k < z.values.size(); ++k)
        if (z.mask[k]) r.push_back(z.values[k] - nz);
    rep.add("e3_nu_plus", r, tol);
    r.clear();
    const Chart ch = build_chart(w.plus_data, w.plus);
    for (std::size_t k = 0; k < ch.mask.size(); ++k)
        if (ch.mask[k]) r.push_back(ch.j_numeric.values[k] - c1);
    rep.add("J_plus", r, tol);
    r.clear();
    for (std::size_t k = 0; k < st.d.values.size(); ++k)
        if (st.d.mask[k]) r.push_back(st.d.values[k]);
    rep.add("d", r, tol);
    return rep;
}

PipelineResult run_pipeline(const RunConfig& c) {
    validate(c);
    PipelineResult res;
    if (c.pipeline == "twoplane") res = run_twoplane(c);
    else if (c.pipeline == "counterexample") res = run_counterexample(c);
    else if (c.pipeline == "obstacle") res = run_obstacle(c);
    else res = run_verify(c);
    ResidualReport& rep = res.report;
    for (const auto& [k, v] : c.tolerances)
        if (!rep.set_tolerance(k, v)) rep.warnings().push_back("tolerance override for unknown check " + k);
    const std::string canon = canonical(c);
    rep.meta()["pipeline"] = c.pipeline;
    rep.meta()["h"] = fmt_double(c.h);
    rep.meta()["config"] = canon;
    rep.meta()["input_hash"] = content_hash(canon);
    return res;
}

std::string report_document(const ResidualReport& r, const std::string& status) {
    const nlohmann::ordered_json body = r.to_json();
    nlohmann::ordered_json doc = {{"status", status}};
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = *it;
    return doc.dump(2) + "\n";
}

std::string failed_document(const RunConfig& c, const std::string& error) {
    nlohmann::ordered_json doc;
    doc["status"] = "failed";
    doc["failed"] = true;
    doc["error"] = error;
    nlohmann::ordered_json meta;
    meta["pipeline"] = c.pipeline;
    try {
        const std::string canon = canonical(c);
        meta["config"] = canon;
        meta["input_hash"] = content_hash(canon);
    } catch (const std::exception&) {
    }
    doc["meta"] = meta;
    return doc.dump(2) + "\n";
}

void set_report_hook(ReportHook hook) { g_hook = hook; }

int execute(const RunConfig& c0, std::string* log) {
    RunConfig c = c0;
    if (const char* e = std::getenv("FBW_OUT_DIR"); e && *e) c.out = e;
    auto say = [&](const std::string& s) {
        if (log) *log += s + "\n";
    };
    try {
        validate(c);
    } catch (const InputError& e) {
        say(std::string("input error: ") + e.what());
        return kInputError;
    }
    const std::string rpath = join(c.out, report_name(c));
    auto fail = [&](const std::string& msg, int code) {
        say(msg);
        try {
            write_file(rpath, failed_document(c, msg));
        } catch (const std::exception&) {
        }
        return code;
    };
    PipelineResult res;
    try {
        res = run_pipeline(c);
        if (g_hook) g_hook(res.report);
    } catch (const InputError& e) {
        return fail(std::string("input error: ") + e.what(), kInputError);
    } catch (const ConvergenceError& e) {
        return fail(std::string("convergence failure: ") + e.what() + " (residual " + fmt_double(e.residual()) + ")",
                    kCheckFailed);
    } catch (const std::exception& e) {
        return fail(std::string("error: ") + e.what(), kCheckFailed);
    }
    const bool pass = res.report.all_pass();
    try {
        std::filesystem::remove(rpath);
        for (const auto& a : res.artifacts)
            if (std::find(c.formats.begin(), c.formats.end(), a.format) != c.formats.end())
                write_file(join(c.out, a.name), a.content);
        write_file(rpath, report_document(res.report, pass ? "pass" : "fail"));
    } catch (const std::exception& e) {
        return fail(std::string("write error: ") + e.what(), kInputError);
    }
    for (const auto& ch : res.report.checks())
        say(std::string(ch.pass ? "PASS " : "FAIL ") + ch.name + " sup=" + fmt_double(ch.sup) +
            " tol=" + fmt_double(ch.tolerance));
    for (const auto& wmsg : res.report.warnings()) say("warning: " + wmsg);
    say(std::string("status: ") + (pass ? "pass" : "fail") + " -> " + rpath);
    return pass ? kPass : kCheckFailed;
}

}  // namespace fbw
