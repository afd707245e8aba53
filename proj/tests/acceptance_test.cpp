// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lipmedial/clarke.hpp"
#include "lipmedial/geometry.hpp"
#include "lipmedial/lift.hpp"
#include "lipmedial/random.hpp"
#include "lipmedial/scenario.hpp"
#include "lipmedial/structure.hpp"

using namespace lipmedial;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Point P(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

LocalConfiguration singletons(const std::vector<Point>& pts, const Point& x0) {
    std::vector<std::vector<Point>> cl;
    for (const auto& p : pts) cl.push_back({p});
    return LocalConfiguration::from_clusters(SiteSet(pts), x0, cl);
}

const std::vector<Point> kGeneric{P({1, 0, 0}), P({0, 1, 0}), P({-1, 0, 0}), P({0, 0, 1})};
const std::vector<Point> kConcyclic{P({1, 0, 0}), P({0, 1, 0}), P({-1, 0, 0}), P({0, -1, 0})};

Eigen::VectorXd V1(double v) { return Eigen::VectorXd::Constant(1, v); }

LipschitzMapSpec scalar_spec(std::function<double(double, double)> fn, double x0, double y0, Interval u,
                             Interval v) {
    LipschitzMapSpec s;
    s.f = [fn](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return V1(fn(x[0], y[0])); };
    s.x0 = V1(x0);
    s.y0 = V1(y0);
    s.z0 = s.f(s.x0, s.y0);
    s.x_box = {u};
    s.y_box = {v};
    return s;
}

LinearMapPolytope joint_hull(std::function<double(double, double)> fn, double x0, double y0, double radius) {
    const VectorFn joint = [fn](const Point& p) { return V1(fn(p[0], p[1])); };
    SamplingOptions so;
    so.radius = radius;
    return sampled_clarke_hull(joint, P({x0, y0}), 1, 1, so);
}

Matrix mean_right_block(const LinearMapPolytope& hull) {
    Matrix A = Matrix::Zero(hull.k(), hull.k());
    for (const auto& v : hull.vertices()) A += hull.right_block(v);
    return A / static_cast<double>(hull.vertices().size());
}

// ---------------------------------------------------------------------------

Outcome bisector_identity() {
    Outcome o;
    const double tie = 1e-6;
    const Grid g({{-2, 2}, {-2, 2}}, 41);
    const double c = std::cos(std::numbers::pi / 4);
    struct Case {
        std::string name;
        std::vector<Point> sites;
        std::function<bool(std::size_t, std::size_t)> on_bisector;
    };
    const std::vector<Case> cases{
        {"axis", {P({-1, 0}), P({1, 0})}, [](std::size_t i, std::size_t) { return i == 20; }},
        {"rotated", {P({-c, -c}), P({c, c})}, [](std::size_t i, std::size_t j) { return i + j == 40; }},
    };
    for (const auto& cs : cases) {
        const SiteSet M(cs.sites);
        std::size_t wrong = 0, flagged = 0;
        for (std::size_t n = 0; n < g.node_count(); ++n) {
            const auto idx = g.multi_index(n);
            const bool medial = nearest(g.node(n), M, tie).nearest.size() > 1;
            flagged += medial;
            wrong += medial != cs.on_bisector(idx[0], idx[1]);
        }
        o.require(wrong == 0 && flagged == 41, cs.name + " grid flags " + std::to_string(flagged) + " nodes, " +
                                                   std::to_string(wrong) + " off the bisector");
        o.require(medial_axis_grid(M, g, tie).size() == 41, cs.name + " medial_axis_grid size");

        StructureOptions so;
        so.resolution = 41;
        so.tie_tol = tie;
        const auto rep = verify_structure(singletons(cs.sites, P({0, 0})), so);
        o.require(rep.mismatch_nodes.empty(), cs.name + " mismatch_nodes = " + std::to_string(rep.mismatch_nodes.size()));
        o.note(cs.name + ": 41 bisector nodes, " + std::to_string(rep.mismatch_nodes.size()) + " mismatches");
    }
    return o;
}

Outcome structure_identity_r3() {
    Outcome o;
    const auto cfg = singletons(kGeneric, P({0, 0, 0}));
    StructureOptions so;
    so.radius = 0.2;
    so.resolution = 17;
    const auto rep = verify_structure(cfg, so);
    o.require(rep.mismatch_nodes.empty(), "mismatch_nodes = " + std::to_string(rep.mismatch_nodes.size()));
    const auto s = simplex_condition(cfg);
    const auto gp = general_position_r3(cfg);
    const auto dir = find_direction_L(cfg);
    for (const auto* c : {&s, &gp, &dir.certificate}) {
        o.require(c->holds && c->margin >= 0.1, c->name + " margin " + fmt(c->margin));
        o.note(c->name + " margin " + fmt(c->margin));
    }
    o.note(std::to_string(rep.nodes.size()) + " nodes, 0 mismatches");
    return o;
}

Outcome counterexample_detection() {
    Outcome o;
    const auto cfg = singletons(kConcyclic, P({0, 0, 0}));
    const auto s = simplex_condition(cfg);
    const auto gp = general_position_r3(cfg);
    for (const auto* c : {&s, &gp}) {
        o.require(!c->holds && c->margin <= 1e-12 && c->witness.has_value(), c->name);
        o.note(c->name + " fails, margin " + fmt(c->margin));
    }
    const auto dir = find_direction_L(cfg);
    o.require(!dir.certificate.holds, "find_direction_L");
    o.note("find_direction_L holds=false");
    return o;
}

Outcome scalar_lift() {
    Outcome o;
    const auto fn = [](double x, double y) { return 2 * y + std::abs(x); };
    const auto hull = joint_hull(fn, 0, 0, 0.1);
    const auto star = check_star_condition(hull);
    o.require(star.holds && std::abs(star.margin - 2.0) <= 1e-9, "star margin " + fmt(star.margin));

    std::vector<Point> grads;
    for (const auto& v : hull.vertices()) grads.push_back(v.row(0).transpose());
    double sep_margin = 0;
    try {
        sep_margin = separating_direction(GradientHull(grads)).margin;
    } catch (const std::domain_error&) {
    }
    o.require(sep_margin > 0, "separating margin " + fmt(sep_margin));

    const auto spec = scalar_spec(fn, 0, 0, {-1, 1}, {-1, 1});
    const auto sol = implicit_solve(spec, mean_right_block(hull), Grid({{-1, 1}}, 101));
    double err = 0;
    for (std::size_t i = 0; i < sol.nodes.size(); ++i)
        err = std::max(err, std::abs(sol.g[i][0] + std::abs(sol.nodes[i][0]) / 2));
    o.require(sol.clean() && err < 1e-6, "max error " + fmt(err));
    o.require(sol.lipschitz_estimate >= 0.49 && sol.lipschitz_estimate <= 0.51,
              "Lipschitz estimate " + fmt(sol.lipschitz_estimate));
    o.note("star margin " + fmt(star.margin) + ", separation " + fmt(sep_margin) + ", max |g + |x|/2| " + fmt(err) +
           ", Lip " + fmt(sol.lipschitz_estimate));
    return o;
}

Outcome negative_lift() {
    Outcome o;
    const auto fn = [](double x, double y) { return std::abs(y) - x; };
    const auto hull = joint_hull(fn, 0, 0, 0.1);
    const auto star = check_star_condition(hull);
    o.require(!star.holds, "star condition reported as holding");
    const bool zero_block = star.witness && star.witness->cols() == 2 && std::abs((*star.witness)(0, 1)) <= 1e-9;
    o.require(zero_block, "witness right block is not 0");

    Matrix A = mean_right_block(hull);
    if (std::abs(A(0, 0)) <= 1e-8)
        for (const auto& v : hull.vertices())
            if (std::abs(hull.right_block(v)(0, 0)) > std::abs(A(0, 0))) A = hull.right_block(v);
    const auto sol = implicit_solve(scalar_spec(fn, 0, 0, {-1, 1}, {-1, 1}), A, Grid({{-1, 1}}, 101));
    std::size_t bad_pos = 0;
    for (auto idx : sol.failed) bad_pos += sol.nodes[idx][0] > 0;
    for (auto idx : sol.ambiguous) bad_pos += sol.nodes[idx][0] > 0;
    o.require(bad_pos > 0, "no failure or ambiguity for x > 0");
    o.note("star fails with witness right block " + (star.witness ? fmt((*star.witness)(0, 1)) : std::string("-")) +
           ", " + std::to_string(bad_pos) + " flagged nodes with x > 0");
    return o;
}

Outcome clarke_hull_fidelity() {
    Outcome o;
    SamplingOptions so;
    so.radius = 0.1;
    so.fd_step = 1e-6;
    so.n_samples = 200;
    so.seed = 0;
    const auto abs_hull = sampled_clarke_hull([](const Point& p) { return std::abs(p[0]); }, P({0}), so);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& v : abs_hull.vertices()) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
    o.require(lo <= -0.99 && hi >= 0.99, "|x| hull [" + fmt(lo) + ", " + fmt(hi) + "]");
    o.note("|x| hull [" + fmt(lo) + ", " + fmt(hi) + "]");

    std::vector<double> diam;
    for (double r : {0.1, 0.05, 0.025}) {
        so.radius = r;
        diam.push_back(sampled_clarke_hull([](const Point& p) { return p.dot(p); }, P({1, 0}), so).diameter());
    }
    o.require(diam[0] < 0.25, "x.x hull diameter at radius 0.1 is " + fmt(diam[0]) + " (needs < 0.25)");
    o.require(diam[0] > diam[1] && diam[1] > diam[2], "diameters not strictly decreasing");
    o.note("x.x diameters " + fmt(diam[0]) + ", " + fmt(diam[1]) + ", " + fmt(diam[2]));
    return o;
}

// Facet distances of the standard simplex by least squares, independent of
// the min-coordinate rule.
std::vector<double> facet_distances(const Eigen::VectorXd& t) {
    const int k = static_cast<int>(t.size());
    std::vector<double> d;
    for (int i = 0; i < k; ++i) {
        const int base = i == 0 ? 1 : 0;
        const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(k, base);
        Matrix B(k, std::max(k - 2, 1));
        int c = 0;
        for (int j = 0; j < k; ++j)
            if (j != i && j != base) B.col(c++) = Eigen::VectorXd::Unit(k, j) - e0;
        Eigen::VectorXd r = t - e0;
        if (c > 0) r -= B.leftCols(c) * B.leftCols(c).colPivHouseholderQr().solve(r);
        d.push_back(r.norm());
    }
    return d;
}

Outcome ek_equivalence() {
    Outcome o;
    const double tol = 1e-9;
    Rng rng(0);
    for (int k : {2, 3, 4}) {
        long agree = 0, compared = 0, ties = 0;
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd t = rng.simplex_weights(k);
            if (s % 2 == 1) {
                Eigen::Index lo;
                t.minCoeff(&lo);
                t[(lo + 1) % k] = t[lo];
                t /= t.sum();
            }
            std::vector<double> ts(t.data(), t.data() + k);
            std::sort(ts.begin(), ts.end());
            const double gap = ts[1] - ts[0];
            if (gap >= tol / 2 && gap <= 2 * tol) continue;
            auto d = facet_distances(t);
            std::sort(d.begin(), d.end());
            ++compared;
            ties += gap < tol / 2;
            agree += ek_membership(t, tol) == (d[1] - d[0] <= tol);
        }
        o.require(agree == compared, "k=" + std::to_string(k) + " agreement " + std::to_string(agree) + "/" +
                                         std::to_string(compared));
        o.note("k=" + std::to_string(k) + " " + std::to_string(agree) + "/" + std::to_string(compared) + " (" +
               std::to_string(ties) + " tied)");
    }
    return o;
}

// Reference minimum-norm point by enumerating faces of the hull spanned by
// at most dim vertices.
double brute_min_norm(const std::vector<Point>& vs) {
    const int n = static_cast<int>(vs.size());
    const int d = static_cast<int>(vs.front().size());
    double best = INFINITY;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
        if (!pick.empty()) {
            const int m = static_cast<int>(pick.size());
            Matrix E(d, m - 1);
            for (int i = 1; i < m; ++i) E.col(i - 1) = vs[pick[i]] - vs[pick[0]];
            Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
            Eigen::VectorXd mu = m > 1 ? Eigen::VectorXd(E.colPivHouseholderQr().solve(Eigen::VectorXd(-vs[pick[0]])))
                                       : Eigen::VectorXd();
            lam[0] = 1 - (m > 1 ? mu.sum() : 0.0);
            for (int i = 1; i < m; ++i) lam[i] = mu[i - 1];
            if (lam.minCoeff() >= -1e-12) {
                Point p = Point::Zero(d);
                for (int i = 0; i < m; ++i) p += lam[i] * vs[pick[i]];
                best = std::min(best, p.norm());
            }
        }
        if (static_cast<int>(pick.size()) == d) return;
        for (int i = start; i < n; ++i) {
            pick.push_back(i);
            rec(i + 1);
            pick.pop_back();
        }
    };
    rec(0);
    return best;
}

Outcome separating_exactness() {
    Outcome o;
    Rng rng(0);
    double worst = 0, min_margin = INFINITY;
    int hulls = 0;
    for (int d : {2, 3}) {
        for (int h = 0; h < 100; ++h) {
            const Point c = rng.normal_vector(d).normalized() * rng.uniform(1.2, 3.0);
            std::vector<Point> vs;
            const int nv = 3 + static_cast<int>(rng.uniform() * 6);
            for (int i = 0; i < nv; ++i) vs.push_back(rng.in_ball(c, 1.0));
            const auto sd = separating_direction(GradientHull(vs));
            double mv = INFINITY;
            for (const auto& v : vs) mv = std::min(mv, v.dot(sd.direction));
            worst = std::max({worst, std::abs(mv - sd.margin), std::abs(sd.margin - brute_min_norm(vs))});
            min_margin = std::min(min_margin, sd.margin);
            ++hulls;
        }
    }
    o.require(worst <= 1e-9, "max deviation " + fmt(worst));
    o.require(min_margin > 0, "non-positive margin");
    int refused = 0;
    for (int d : {2, 3}) {
        for (int h = 0; h < 20; ++h) {
            std::vector<Point> vs;
            for (int i = 0; i < d + 1; ++i) {
                const Point p = rng.normal_vector(d);
                vs.push_back(p);
                vs.push_back(-p);
            }
            try {
                separating_direction(GradientHull(vs));
            } catch (const std::domain_error&) {
                ++refused;
            }
        }
    }
    o.require(refused == 40, "origin hulls refused " + std::to_string(refused) + "/40");
    o.note(std::to_string(hulls) + " hulls, max deviation " + fmt(worst) + ", origin hulls refused " +
           std::to_string(refused) + "/40");
    return o;
}

Outcome chart_roundtrip() {
    Outcome o;
    const auto fn = [](double x, double y) { return x * x + y - 1; };
    const auto spec = scalar_spec(fn, 0, 1, {-0.1, 0.1}, {0.9, 1.1});
    const auto hull = joint_hull(fn, 0, 1, 0.05);
    const auto sol = implicit_solve(spec, mean_right_block(hull), Grid({{-0.1, 0.1}}, 21));
    o.require(sol.clean(), "implicit solution not clean");
    const auto chart = build_chart(spec, sol, {100, 0});
    o.require(chart.samples.size() == 100, "sample count");
    o.require(chart.roundtrip_error < 1e-8, "round trip " + fmt(chart.roundtrip_error));
    bool exact = true;
    for (const auto& p : chart.samples) exact = exact && chart.forward(p)[1] == fn(p[0], p[1]);
    o.require(exact, "projection differs from f");
    std::vector<PointPair> pairs;
    for (std::size_t i = 1; i < chart.samples.size(); ++i) pairs.emplace_back(chart.samples[i - 1], chart.samples[i]);
    const auto id = bilipschitz_estimate([](const Eigen::VectorXd& p) { return p; }, pairs);
    o.require(id.lower == 1.0 && id.upper == 1.0, "identity distortion (" + fmt(id.lower) + ", " + fmt(id.upper) + ")");
    o.note("round trip " + fmt(chart.roundtrip_error) + ", projection exact, identity (1, 1)");
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const auto base = std::filesystem::temp_directory_path() / "lipmedial_acceptance";
    std::filesystem::remove_all(base);
    std::string csv[2];
    for (int i = 0; i < 2; ++i) {
        auto cfg = preset("r3-generic-tetrahedron");
        cfg.seed = 0;
        cfg.out_dir = base / ("run" + std::to_string(i));
        csv[i] = slurp(run(cfg).nodes_path);
    }
    o.require(!csv[0].empty() && csv[0] == csv[1], "CSV outputs differ");
    o.note(std::to_string(csv[0].size()) + " bytes, identical");
    std::filesystem::remove_all(base);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"bisector identity (k=2)", bisector_identity},
        {"structure identity in R^3", structure_identity_r3},
        {"counterexample detection", counterexample_detection},
        {"scalar lift", scalar_lift},
        {"negative lift", negative_lift},
        {"Clarke hull fidelity", clarke_hull_fidelity},
        {"E^(k) equivalence", ek_equivalence},
        {"separating direction exactness", separating_exactness},
        {"chart round-trip", chart_roundtrip},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > 10.0) out.require(false, "took " + fmt(secs) + " s");
        failed += !out.pass;
        std::printf("%s %2zu %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    out.detail.c_str(), secs);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
