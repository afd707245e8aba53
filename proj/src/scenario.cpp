#include "lipmedial/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lipmedial/clarke.hpp"
#include "lipmedial/geometry.hpp"
#include "lipmedial/lift.hpp"
#include "lipmedial/structure.hpp"

namespace lipmedial {

using nlohmann::json;

namespace {

struct KindName {
    ScenarioKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ScenarioKind::MedialAxis, "medial-axis"},
    {ScenarioKind::VerifyStructure, "verify-structure"},
    {ScenarioKind::CheckLift, "check-lift"},
    {ScenarioKind::ScalarDemo, "scalar-demo"},
    {ScenarioKind::Counterexample, "counterexample"},
};

json intervals_to_json(const std::vector<Interval>& box) {
    json out = json::array();
    for (const auto& iv : box) out.push_back({iv.lo, iv.hi});
    return out;
}

// Field readers: every failure names the dotted path of the field.

const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

double read_number(const json& j, const std::string& field) {
    if (!j.is_number()) bad(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(field, "must be finite");
    return v;
}

int read_int(const json& j, const std::string& field, int min) {
    if (!j.is_number_integer()) bad(field, "expected an integer");
    const auto v = j.get<long long>();
    if (v < min) bad(field, "must be >= " + std::to_string(min));
    if (v > std::numeric_limits<int>::max()) bad(field, "too large");
    return static_cast<int>(v);
}

std::vector<double> read_vector(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) bad(field, "expected a nonempty list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Interval> read_box(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) bad(field, "expected a nonempty list of [lo, hi] pairs");
    std::vector<Interval> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto name = field + "[" + std::to_string(i) + "]";
        const auto v = read_vector(j[i], name);
        if (v.size() != 2 || !(v[0] < v[1])) bad(name, "expected [lo, hi] with lo < hi");
        out.push_back({v[0], v[1]});
    }
    return out;
}

template <class F>
void with(const json& j, const char* key, const std::string& prefix, F&& fn) {
    if (const json* v = find(j, key)) fn(*v, prefix.empty() ? std::string(key) : prefix + "." + key);
}

Point to_point(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json certificate_to_json(const Certificate& c) {
    json j{{"name", c.name}, {"holds", c.holds}, {"margin", c.margin}, {"samples_checked", c.samples_checked}};
    j["witness"] = c.witness ? matrix_to_json(*c.witness) : json(nullptr);
    return j;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SiteSet make_sites(const ScenarioConfig& cfg) {
    if (cfg.sites.empty()) bad("sites", "at least one site is required");
    std::vector<Point> pts;
    for (const auto& s : cfg.sites) pts.push_back(to_point(s));
    return SiteSet(std::move(pts), cfg.site_tol);
}

/// The point of the sites' affine hull equidistant from all of them.
Point circumcenter(const SiteSet& M) {
    const Point& p1 = M[0];
    const auto n = M.dim();
    const auto s = static_cast<Eigen::Index>(M.size());
    if (s < 2) bad("x0", "cannot be computed from a single site; set it explicitly");
    if (s - 1 > n) bad("x0", "cannot be computed from more than n + 1 sites; set it explicitly");
    Matrix E(n, s - 1);
    Eigen::VectorXd rhs(s - 1);
    for (Eigen::Index i = 1; i < s; ++i) {
        E.col(i - 1) = M[static_cast<std::size_t>(i)] - p1;
        rhs[i - 1] = 0.5 * E.col(i - 1).squaredNorm();
    }
    const Matrix G = E.transpose() * E;
    Eigen::FullPivLU<Matrix> lu(G);
    if (lu.rank() < s - 1) bad("x0", "sites are affinely dependent; set x0 explicitly");
    return p1 + E * lu.solve(rhs);
}

Point resolve_x0(const ScenarioConfig& cfg, const SiteSet& M) {
    Point x0 = cfg.x0 ? to_point(*cfg.x0) : circumcenter(M);
    if (x0.size() != M.dim()) bad("x0", "dimension does not match the sites");
    return x0;
}

// ---------------------------------------------------------------------------

RunResult run_medial_axis(const ScenarioConfig& cfg, json& report) {
    const SiteSet M = make_sites(cfg);
    std::vector<Interval> box;
    if (cfg.box) {
        box = *cfg.box;
    } else {
        const Point c = cfg.x0 ? to_point(*cfg.x0) : Point::Zero(M.dim());
        const double r = cfg.radius > 0 ? cfg.radius : 2.0;
        box = Grid::cube(c, r, 2).box();
    }
    if (static_cast<Eigen::Index>(box.size()) != M.dim()) bad("box", "dimension does not match the sites");
    const Grid grid(box, cfg.resolution);
    const double tol = cfg.tie_tol.value_or(1e-9);

    std::ostringstream csv;
    for (Eigen::Index a = 0; a < M.dim(); ++a) csv << 'x' << a + 1 << ',';
    csv << "label\n";
    long flagged = 0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Point x = grid.node(i);
        const bool medial = nearest(x, M, tol).nearest.size() > 1;
        flagged += medial;
        for (Eigen::Index a = 0; a < x.size(); ++a) csv << num(x[a]) << ',';
        csv << (medial ? "medial" : "off") << '\n';
    }
    report["summary"] = {{"grid_nodes", grid.node_count()}, {"medial_nodes", flagged}, {"tie_tol", tol}};
    return {report, csv.str()};
}

RunResult run_structure(const ScenarioConfig& cfg, json& report) {
    const SiteSet M = make_sites(cfg);
    const Point x0 = resolve_x0(cfg, M);
    const auto cfg_local = LocalConfiguration::from_sites(M, x0, cfg.cluster_eps);

    ChoiceOptions choices;
    choices.n_samples = cfg.choice_samples;
    choices.seed = cfg.seed;

    json certs = json::array();
    bool hypotheses = true;
    if (cfg_local.k() <= cfg_local.n() + 1) {
        const auto simplex = simplex_condition(cfg_local, choices);
        hypotheses = hypotheses && simplex.holds;
        certs.push_back(certificate_to_json(simplex));
    } else {
        hypotheses = false;
    }
    bool singletons = true;
    for (const auto& c : cfg_local.clusters()) singletons = singletons && c.points.size() == 1;
    if (cfg_local.n() == 3 && cfg_local.k() == 4 && singletons) {
        const auto gp = general_position_r3(cfg_local);
        hypotheses = hypotheses && gp.holds;
        certs.push_back(certificate_to_json(gp));
    }

    json summary{{"x0", to_vector(x0)},
                 {"k", cfg_local.k()},
                 {"n", cfg_local.n()},
                 {"support_radius", cfg_local.support_radius()}};
    std::ostringstream csv;
    if (cfg_local.k() > cfg_local.n() + 1) {
        summary["structure_claim_asserted"] = false;
        summary["note"] = "k > n + 1: structure verification not applicable";
        report["certificates"] = certs;
        report["summary"] = summary;
        return {report, csv.str()};
    }

    StructureOptions sopt;
    sopt.resolution = cfg.resolution;
    sopt.radius = cfg.radius;
    sopt.tie_tol = cfg.tie_tol.value_or(-1.0);
    sopt.n_candidates = cfg.direction_candidates;
    sopt.choices = choices;
    const auto direction = find_direction_L(cfg_local, cfg.direction_candidates, choices);
    hypotheses = hypotheses && direction.certificate.holds;
    certs.push_back(certificate_to_json(direction.certificate));
    const auto rep = verify_structure(cfg_local, sopt);

    summary["structure_claim_asserted"] = hypotheses;
    summary["ball_radius"] = rep.radius;
    summary["resolution"] = cfg.resolution;
    summary["grid_nodes"] = rep.nodes.size();
    summary["conflict_nodes"] = rep.conflict_count;
    summary["mismatch_nodes"] = rep.mismatch_nodes.size();
    summary["invalid_nodes"] = rep.invalid_nodes.size();
    summary["cube_dim"] = rep.cube_dim;
    summary["distortion"] = {{"lower", rep.distortion.lower}, {"upper", rep.distortion.upper},
                             {"pairs", rep.distortion.pairs_used}};
    summary["L"] = matrix_to_json(rep.L);

    const auto n = cfg_local.n();
    for (Eigen::Index a = 0; a < n; ++a) csv << 'x' << a + 1 << ',';
    csv << "label,";
    for (int j = 0; j < cfg_local.k(); ++j) csv << 'H' << j + 1 << ',';
    csv << "ek_member,mismatch\n";
    for (const auto& rec : rep.nodes) {
        for (Eigen::Index a = 0; a < n; ++a) csv << num(rec.x[a]) << ',';
        switch (rec.label.kind) {
            case LabelKind::InConflict: csv << "conflict"; break;
            case LabelKind::InSelf: csv << "self:" << rec.label.cluster + 1; break;
            case LabelKind::Off: csv << "off"; break;
        }
        csv << ',';
        for (Eigen::Index j = 0; j < rec.h_image.size(); ++j) csv << num(rec.h_image[j]) << ',';
        csv << int(rec.ek_member) << ',' << int(rec.mismatch) << '\n';
    }
    report["certificates"] = certs;
    report["summary"] = summary;
    return {report, csv.str()};
}

RunResult run_lift(const ScenarioConfig& cfg, json& report, bool scalar_demo) {
    const auto& ls = cfg.lift;
    LipschitzMapSpec spec;
    spec.f = make_function(cfg.function);
    spec.x0 = to_point(ls.x0);
    spec.y0 = to_point(ls.y0);
    spec.x_box = ls.u;
    spec.y_box = ls.v;
    if (spec.x0.size() != 1 || spec.y0.size() != 1) bad("lift.x0", "built-in families take scalar x0 and y0");
    if (ls.u.size() != 1) bad("lift.u", "expected one interval");
    if (ls.v.size() != 1) bad("lift.v", "expected one interval");
    spec.z0 = spec.f(spec.x0, spec.y0);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        bad("lift", e.what());
    }

    SamplingOptions so;
    so.radius = ls.clarke_radius;
    so.n_samples = cfg.clarke_samples;
    so.fd_step = ls.fd_step;
    so.seed = cfg.seed;
    Point base(2);
    base << spec.x0, spec.y0;
    const SplitFn f = spec.f;
    const VectorFn joint = [f](const Point& p) { return f(p.head(1), p.tail(1)); };
    const auto hull = sampled_clarke_hull(joint, base, 1, 1, so);

    ProbeOptions po;
    po.n_probe = cfg.probe_samples;
    po.seed = cfg.seed;
    json certs = json::array();
    const auto star = check_star_condition(hull, po);
    certs.push_back(certificate_to_json(star));

    // Slope: mean right block, else the best-conditioned vertex block.
    Matrix A = Matrix::Zero(1, 1);
    for (const auto& v : hull.vertices()) A += hull.right_block(v);
    A /= static_cast<double>(hull.vertices().size());
    if (std::abs(A(0, 0)) <= 1e-8) {
        for (const auto& v : hull.vertices())
            if (std::abs(hull.right_block(v)(0, 0)) > std::abs(A(0, 0))) A = hull.right_block(v);
    }

    json summary;
    json hull_json = json::array();
    for (const auto& v : hull.vertices()) hull_json.push_back(matrix_to_json(v).front());
    summary["clarke_hull"] = hull_json;
    summary["z0"] = to_vector(spec.z0);
    summary["slope"] = A(0, 0);

    if (scalar_demo) {
        std::vector<Point> grads;
        for (const auto& v : hull.vertices()) grads.push_back(v.row(0).transpose());
        Certificate sep{"separating_direction"};
        sep.samples_checked = static_cast<long>(grads.size());
        try {
            const auto dir = separating_direction(GradientHull(grads));
            sep.holds = true;
            sep.margin = dir.margin;
            summary["separating_direction"] = to_vector(dir.direction);
        } catch (const std::domain_error&) {
            sep.witness = Matrix(min_norm_point(grads).transpose());
        }
        certs.push_back(certificate_to_json(sep));
    }

    std::ostringstream csv;
    if (std::abs(A(0, 0)) <= 1e-12) {
        summary["note"] = "every sampled right block vanishes; no slope for the iteration";
        report["certificates"] = certs;
        report["summary"] = summary;
        return {report, csv.str()};
    }

    SolveOptions sopt;
    sopt.tol = cfg.solver_tol;
    const Grid grid(ls.u, ls.resolution);
    const auto sol = implicit_solve(spec, A, grid, sopt);
    summary["grid_nodes"] = sol.nodes.size();
    summary["failed_nodes"] = sol.failed.size();
    summary["ambiguous_nodes"] = sol.ambiguous.size();
    summary["lipschitz_estimate"] = sol.lipschitz_estimate;

    const auto exact = closed_form_solution(cfg.function);
    double max_err = 0.0;
    for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
        if (exact && sol.status[i] == NodeStatus::Converged)
            max_err = std::max(max_err, std::abs(sol.g[i][0] - (*exact)(sol.nodes[i][0], spec.z0[0])));
    }
    if (exact) summary["max_abs_error_vs_closed_form"] = max_err;

    if (sol.clean()) {
        ChartOptions co;
        co.n_samples = cfg.chart_samples;
        co.seed = cfg.seed;
        try {
            const auto chart = build_chart(spec, sol, co);
            summary["chart"] = {{"roundtrip_error", chart.roundtrip_error},
                                {"distortion", {{"lower", chart.distortion.lower}, {"upper", chart.distortion.upper}}}};
        } catch (const std::runtime_error& e) {
            summary["chart"] = {{"error", e.what()}};
        }
    }

    csv << "x1,g1,residual,status\n";
    for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
        csv << num(sol.nodes[i][0]) << ',' << num(sol.g[i][0]) << ',' << num(sol.residuals[i]) << ',';
        switch (sol.status[i]) {
            case NodeStatus::Converged: csv << "converged"; break;
            case NodeStatus::Failed: csv << "failed"; break;
            case NodeStatus::Ambiguous: csv << "ambiguous"; break;
        }
        csv << '\n';
    }
    report["certificates"] = certs;
    report["summary"] = summary;
    return {report, csv.str()};
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    return "unknown";
}

ScenarioKind scenario_from_string(const std::string& s) {
    for (const auto& k : kKinds)
        if (s == k.name) return k.kind;
    bad("scenario", "unknown scenario '" + s + "'");
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["scenario"] = to_string(c.scenario);
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["sites"] = c.sites;
    j["x0"] = c.x0 ? json(*c.x0) : json(nullptr);
    j["grid"] = {{"radius", c.radius},
                 {"resolution", c.resolution},
                 {"box", c.box ? intervals_to_json(*c.box) : json(nullptr)}};
    j["tolerances"] = {{"tie", c.tie_tol ? json(*c.tie_tol) : json(nullptr)},
                       {"site", c.site_tol},
                       {"cluster_eps", c.cluster_eps},
                       {"solver", c.solver_tol}};
    j["samples"] = {{"choices", c.choice_samples},
                    {"probes", c.probe_samples},
                    {"directions", c.direction_candidates},
                    {"clarke", c.clarke_samples},
                    {"chart", c.chart_samples}};
    j["function"] = {{"family", c.function.family}, {"a", c.function.a}, {"b", c.function.b}};
    j["lift"] = {{"x0", c.lift.x0},
                 {"y0", c.lift.y0},
                 {"u", intervals_to_json(c.lift.u)},
                 {"v", intervals_to_json(c.lift.v)},
                 {"resolution", c.lift.resolution},
                 {"clarke_radius", c.lift.clarke_radius},
                 {"fd_step", c.lift.fd_step}};
    j["output"] = {{"dir", c.out_dir.string()}, {"report", c.report_file}, {"nodes", c.nodes_file}};
    return j;
}

ScenarioConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ScenarioConfig c;
    const json* sc = find(j, "scenario");
    if (!sc || !sc->is_string()) bad("scenario", "required string");
    c.scenario = scenario_from_string(sc->get<std::string>());
    with(j, "name", "", [&](const json& v, const std::string& f) {
        if (!v.is_string()) bad(f, "expected a string");
        c.name = v.get<std::string>();
    });
    with(j, "seed", "", [&](const json& v, const std::string& f) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            bad(f, "expected a nonnegative integer");
        c.seed = v.get<std::uint64_t>();
    });
    with(j, "sites", "", [&](const json& v, const std::string& f) {
        if (!v.is_array()) bad(f, "expected a list of coordinate lists");
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto p = read_vector(v[i], f + "[" + std::to_string(i) + "]");
            if (!c.sites.empty() && p.size() != c.sites.front().size())
                bad(f + "[" + std::to_string(i) + "]", "dimension differs from the first site");
            c.sites.push_back(std::move(p));
        }
    });
    with(j, "x0", "", [&](const json& v, const std::string& f) { c.x0 = read_vector(v, f); });
    with(j, "grid", "", [&](const json& g, const std::string& p) {
        with(g, "radius", p, [&](const json& v, const std::string& f) { c.radius = read_number(v, f); });
        with(g, "resolution", p, [&](const json& v, const std::string& f) { c.resolution = read_int(v, f, 2); });
        with(g, "box", p, [&](const json& v, const std::string& f) { c.box = read_box(v, f); });
    });
    with(j, "tolerances", "", [&](const json& t, const std::string& p) {
        auto nonneg = [](const json& v, const std::string& f) {
            const double x = read_number(v, f);
            if (x < 0) bad(f, "must be nonnegative");
            return x;
        };
        with(t, "tie", p, [&](const json& v, const std::string& f) { c.tie_tol = nonneg(v, f); });
        with(t, "site", p, [&](const json& v, const std::string& f) { c.site_tol = nonneg(v, f); });
        with(t, "cluster_eps", p, [&](const json& v, const std::string& f) {
            c.cluster_eps = read_number(v, f);
            if (!(c.cluster_eps > 0)) bad(f, "must be positive");
        });
        with(t, "solver", p, [&](const json& v, const std::string& f) {
            c.solver_tol = read_number(v, f);
            if (!(c.solver_tol > 0)) bad(f, "must be positive");
        });
    });
    with(j, "samples", "", [&](const json& s, const std::string& p) {
        with(s, "choices", p, [&](const json& v, const std::string& f) { c.choice_samples = read_int(v, f, 0); });
        with(s, "probes", p, [&](const json& v, const std::string& f) { c.probe_samples = read_int(v, f, 0); });
        with(s, "directions", p, [&](const json& v, const std::string& f) { c.direction_candidates = read_int(v, f, 0); });
        with(s, "clarke", p, [&](const json& v, const std::string& f) { c.clarke_samples = read_int(v, f, 1); });
        with(s, "chart", p, [&](const json& v, const std::string& f) { c.chart_samples = read_int(v, f, 0); });
    });
    with(j, "function", "", [&](const json& fn, const std::string& p) {
        with(fn, "family", p, [&](const json& v, const std::string& f) {
            if (!v.is_string()) bad(f, "expected a string");
            c.function.family = v.get<std::string>();
        });
        with(fn, "a", p, [&](const json& v, const std::string& f) { c.function.a = read_number(v, f); });
        with(fn, "b", p, [&](const json& v, const std::string& f) { c.function.b = read_number(v, f); });
        make_function(c.function);
    });
    with(j, "lift", "", [&](const json& l, const std::string& p) {
        with(l, "x0", p, [&](const json& v, const std::string& f) { c.lift.x0 = read_vector(v, f); });
        with(l, "y0", p, [&](const json& v, const std::string& f) { c.lift.y0 = read_vector(v, f); });
        with(l, "u", p, [&](const json& v, const std::string& f) { c.lift.u = read_box(v, f); });
        with(l, "v", p, [&](const json& v, const std::string& f) { c.lift.v = read_box(v, f); });
        with(l, "resolution", p, [&](const json& v, const std::string& f) { c.lift.resolution = read_int(v, f, 2); });
        with(l, "clarke_radius", p, [&](const json& v, const std::string& f) {
            c.lift.clarke_radius = read_number(v, f);
            if (!(c.lift.clarke_radius > 0)) bad(f, "must be positive");
        });
        with(l, "fd_step", p, [&](const json& v, const std::string& f) {
            c.lift.fd_step = read_number(v, f);
            if (!(c.lift.fd_step > 0)) bad(f, "must be positive");
        });
    });
    with(j, "output", "", [&](const json& o, const std::string& p) {
        auto str = [](const json& v, const std::string& f) {
            if (!v.is_string() || v.get<std::string>().empty()) bad(f, "expected a nonempty string");
            return v.get<std::string>();
        };
        with(o, "dir", p, [&](const json& v, const std::string& f) { c.out_dir = str(v, f); });
        with(o, "report", p, [&](const json& v, const std::string& f) { c.report_file = str(v, f); });
        with(o, "nodes", p, [&](const json& v, const std::string& f) { c.nodes_file = str(v, f); });
    });

    const bool needs_sites = c.scenario == ScenarioKind::MedialAxis || c.scenario == ScenarioKind::VerifyStructure ||
                             c.scenario == ScenarioKind::Counterexample;
    if (needs_sites && c.sites.empty()) bad("sites", "required for scenario '" + to_string(c.scenario) + "'");
    if (c.x0 && !c.sites.empty() && c.x0->size() != c.sites.front().size())
        bad("x0", "dimension does not match the sites");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::vector<std::string> preset_names() {
    return {"two-sites", "three-sites-triangle", "r3-generic-tetrahedron", "r3-concyclic", "scalar-abs",
            "implicit-smooth"};
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    c.name = name;
    if (name == "two-sites") {
        c.scenario = ScenarioKind::VerifyStructure;
        c.sites = {{-1.0, 0.0}, {1.0, 0.0}};
        c.radius = 0.5;
        c.resolution = 21;
    } else if (name == "three-sites-triangle") {
        c.scenario = ScenarioKind::MedialAxis;
        c.sites = {{0.0, 1.0}, {1.0, -1.0}, {-1.0, -1.0}};
        c.box = std::vector<Interval>{{-2.0, 2.0}, {-2.0, 2.0}};
        c.resolution = 81;
        c.tie_tol = 1e-6;
    } else if (name == "r3-generic-tetrahedron") {
        c.scenario = ScenarioKind::VerifyStructure;
        c.sites = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
        c.radius = 0.2;
        c.resolution = 17;
    } else if (name == "r3-concyclic") {
        c.scenario = ScenarioKind::Counterexample;
        c.sites = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}};
        c.x0 = std::vector<double>{0.0, 0.0, 0.0};
        c.radius = 0.2;
        c.resolution = 17;
    } else if (name == "scalar-abs") {
        c.scenario = ScenarioKind::ScalarDemo;
        c.function = {"abs-linear", 2.0, 1.0};
        c.lift.resolution = 101;
    } else if (name == "implicit-smooth") {
        c.scenario = ScenarioKind::CheckLift;
        c.function = {"smooth-quadratic", 0.0, 0.0};
        c.lift.x0 = {0.0};
        c.lift.y0 = {1.0};
        c.lift.u = {{-0.1, 0.1}};
        c.lift.v = {{0.9, 1.1}};
        c.lift.resolution = 21;
        c.lift.clarke_radius = 0.05;
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.out_dir = std::filesystem::path("out") / name;
    return c;
}

SplitFn make_function(const FunctionSpec& spec) {
    const double a = spec.a, b = spec.b;
    auto scalar = [](auto fn) -> SplitFn {
        return [fn](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
            Eigen::VectorXd out(1);
            out[0] = fn(x[0], y[0]);
            return out;
        };
    };
    if (spec.family == "abs-linear") return scalar([a, b](double x, double y) { return a * y + b * std::abs(x); });
    if (spec.family == "abs-minus") return scalar([](double x, double y) { return std::abs(y) - x; });
    if (spec.family == "smooth-quadratic") return scalar([](double x, double y) { return x * x + y - 1.0; });
    if (spec.family == "identity") return scalar([](double, double y) { return y; });
    throw ConfigError("config field 'function.family': unknown family '" + spec.family + "'");
}

std::optional<std::function<double(double, double)>> closed_form_solution(const FunctionSpec& spec) {
    const double a = spec.a, b = spec.b;
    if (spec.family == "abs-linear" && a != 0.0)
        return [a, b](double x, double z0) { return (z0 - b * std::abs(x)) / a; };
    if (spec.family == "smooth-quadratic") return [](double x, double z0) { return z0 + 1.0 - x * x; };
    if (spec.family == "identity") return [](double, double z0) { return z0; };
    return std::nullopt;
}

RunResult execute(const ScenarioConfig& cfg) {
    json report;
    report["tool"] = "lipmedial";
    report["version"] = kVersion;
    report["scenario"] = to_string(cfg.scenario);
    report["config"] = to_json(cfg);
    report["certificates"] = json::array();

    RunResult out;
    try {
        switch (cfg.scenario) {
            case ScenarioKind::MedialAxis: out = run_medial_axis(cfg, report); break;
            case ScenarioKind::VerifyStructure:
            case ScenarioKind::Counterexample: out = run_structure(cfg, report); break;
            case ScenarioKind::CheckLift: out = run_lift(cfg, report, false); break;
            case ScenarioKind::ScalarDemo: out = run_lift(cfg, report, true); break;
        }
    } catch (const std::invalid_argument& e) {
        // Library precondition failures trace back to the configuration.
        throw ConfigError(std::string("config rejected: ") + e.what());
    }
    out.report_path = cfg.out_dir / cfg.report_file;
    out.nodes_path = cfg.out_dir / cfg.nodes_file;
    out.report["tables"] = {{"nodes", cfg.nodes_file}};
    return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        os << contents;
        if (!os.flush()) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

RunResult run(const ScenarioConfig& cfg) {
    RunResult out = execute(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
    write_atomically(out.nodes_path, out.nodes_csv);
    write_atomically(out.report_path, out.report.dump(2) + "\n");
    return out;
}

}  // namespace lipmedial
