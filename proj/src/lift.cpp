#include "lipmedial/lift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "lipmedial/random.hpp"

namespace lipmedial {

void LipschitzMapSpec::validate(double tol) const {
    if (!f) throw std::invalid_argument("LipschitzMapSpec: no function");
    if (x0.size() < 1 || y0.size() < 1) throw std::invalid_argument("LipschitzMapSpec: empty base point");
    if (z0.size() != y0.size()) throw std::invalid_argument("LipschitzMapSpec: z0 must have k entries");
    if (x_box.size() != static_cast<std::size_t>(m()) || y_box.size() != static_cast<std::size_t>(k()))
        throw std::invalid_argument("LipschitzMapSpec: box does not match (m, k)");
    for (int i = 0; i < m(); ++i) {
        const auto& iv = x_box[static_cast<std::size_t>(i)];
        if (!(iv.lo <= x0[i] && x0[i] <= iv.hi)) throw std::invalid_argument("LipschitzMapSpec: x0 outside U");
    }
    for (int i = 0; i < k(); ++i) {
        const auto& iv = y_box[static_cast<std::size_t>(i)];
        if (!(iv.lo <= y0[i] && y0[i] <= iv.hi)) throw std::invalid_argument("LipschitzMapSpec: y0 outside V");
    }
    const Eigen::VectorXd v = f(x0, y0);
    if (v.size() != k() || !v.allFinite()) throw std::invalid_argument("LipschitzMapSpec: f(x0, y0) malformed");
    if ((v - z0).norm() > tol) throw std::invalid_argument("LipschitzMapSpec: f(x0, y0) != z0");
}

MapFn graph_map(const LipschitzMapSpec& spec) {
    const int m = spec.m();
    const int k = spec.k();
    auto f = spec.f;
    return [f, m, k](const Eigen::VectorXd& p) {
        if (p.size() != m + k) throw std::invalid_argument("graph_map: wrong argument size");
        Eigen::VectorXd out(m + k);
        out.head(m) = p.head(m);
        out.tail(k) = f(p.head(m), p.tail(k));
        return out;
    };
}

namespace {

bool inside(const Eigen::VectorXd& y, const std::vector<Interval>& box) {
    for (std::size_t i = 0; i < box.size(); ++i) {
        const auto yi = y[static_cast<Eigen::Index>(i)];
        if (!(box[i].lo <= yi && yi <= box[i].hi)) return false;
    }
    return true;
}

struct IterResult {
    Eigen::VectorXd y;
    double residual;
    int iterations;
    bool converged;
};

/// Damped fixed-slope iteration on y -> f(x, y) - target. `box`, when given,
/// confines the iterates.
IterResult damped_solve(const SplitFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& target,
                        Eigen::VectorXd y, const Eigen::PartialPivLU<Matrix>& slope, double tol, int max_iter,
                        const std::vector<Interval>* box) {
    Eigen::VectorXd r = f(x, y) - target;
    double rn = r.norm();
    double alpha = 1.0;
    int it = 0;
    while (it < max_iter && std::isfinite(rn) && rn > tol) {
        ++it;
        const Eigen::VectorXd step = slope.solve(r);
        bool accepted = false;
        while (alpha > 1e-12) {
            Eigen::VectorXd y_try = y - alpha * step;
            if (!box || inside(y_try, *box)) {
                Eigen::VectorXd r_try = f(x, y_try) - target;
                const double rn_try = r_try.norm();
                if (std::isfinite(rn_try) && rn_try < rn) {
                    y = std::move(y_try);
                    r = std::move(r_try);
                    rn = rn_try;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
        alpha = std::min(1.0, 2.0 * alpha);
    }
    return {std::move(y), rn, it, std::isfinite(rn) && rn <= tol};
}

/// k = 1 root structure of f(x, .) - z0 on V: sign-change brackets plus
/// samples that are already roots. Adjacent zero samples form one root.
struct ScanResult {
    int roots = 0;
    std::vector<std::pair<double, double>> brackets;
};

ScanResult scan_roots(const SplitFn& f, const Eigen::VectorXd& x, double z0, const Interval& v, int intervals,
                      double tol) {
    ScanResult out;
    Eigen::VectorXd y(1);
    int prev_sign = 0;
    double prev_y = v.lo;
    for (int i = 0; i <= intervals; ++i) {
        y[0] = (i == intervals) ? v.hi : v.lo + (v.hi - v.lo) * i / intervals;
        const double r = f(x, y)[0] - z0;
        const int sign = std::abs(r) <= tol ? 0 : (r > 0 ? 1 : -1);
        if (sign == 0) {
            if (prev_sign != 0 || i == 0) ++out.roots;
            out.brackets.emplace_back(y[0], y[0]);
        } else if (prev_sign != 0 && sign != prev_sign) {
            ++out.roots;
            out.brackets.emplace_back(prev_y, y[0]);
        }
        prev_sign = sign;
        prev_y = y[0];
    }
    return out;
}

IterResult bisect(const SplitFn& f, const Eigen::VectorXd& x, double z0, double a, double b, double tol) {
    Eigen::VectorXd y(1);
    y[0] = a;
    double fa = f(x, y)[0] - z0;
    for (int it = 0; it < 200; ++it) {
        y[0] = 0.5 * (a + b);
        const double fm = f(x, y)[0] - z0;
        if (std::abs(fm) <= tol || b - a <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(y[0])))
            return {y, std::abs(fm), it + 1, std::abs(fm) <= tol};
        if ((fm > 0) == (fa > 0)) {
            a = y[0];
            fa = fm;
        } else {
            b = y[0];
        }
    }
    return {y, std::abs(f(x, y)[0] - z0), 200, false};
}

}  // namespace

ImplicitSolution implicit_solve(const LipschitzMapSpec& spec, const Matrix& A, const Grid& grid,
                                const SolveOptions& opt) {
    spec.validate();
    const int k = spec.k();
    if (A.rows() != k || A.cols() != k) throw std::invalid_argument("implicit_solve: A must be k x k");
    if (grid.dim() != spec.m()) throw std::invalid_argument("implicit_solve: grid dimension must be m");
    const Eigen::PartialPivLU<Matrix> slope(A);
    if (!(std::abs(A.determinant()) > 0.0) || !slope.solve(Eigen::VectorXd::Ones(k)).allFinite())
        throw std::invalid_argument("implicit_solve: A is singular");
    if (opt.initial_offset && opt.initial_offset->size() != k)
        throw std::invalid_argument("implicit_solve: initial offset must have k entries");

    const std::size_t count = grid.node_count();
    ImplicitSolution sol{grid, A};
    sol.nodes.resize(count);
    sol.g.assign(count, Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN()));
    sol.residuals.assign(count, std::numeric_limits<double>::infinity());
    sol.status.assign(count, NodeStatus::Failed);
    sol.iterations.assign(count, 0);
    std::vector<double> dist(count);
    for (std::size_t i = 0; i < count; ++i) {
        sol.nodes[i] = grid.node(i);
        dist[i] = (sol.nodes[i] - spec.x0).norm();
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });

    std::vector<bool> solved(count, false);
    const int res = grid.resolution();
    for (const auto node : order) {
        const auto& x = sol.nodes[node];
        // Warm start from the closest already-solved axis neighbour.
        Eigen::VectorXd y_start = spec.y0;
        double best = std::numeric_limits<double>::infinity();
        auto idx = grid.multi_index(node);
        for (std::size_t a = 0; a < idx.size(); ++a) {
            for (int step : {-1, 1}) {
                const int j = idx[a] + step;
                if (j < 0 || j >= res) continue;
                auto nb = idx;
                nb[a] = j;
                const auto flat = grid.flat_index(nb);
                if (solved[flat] && dist[flat] < best) {
                    best = dist[flat];
                    y_start = sol.g[flat];
                }
            }
        }
        if (opt.initial_offset) y_start += *opt.initial_offset;

        IterResult r = damped_solve(spec.f, x, spec.z0, y_start, slope, opt.tol, opt.max_iter, &spec.y_box);
        ScanResult scan;
        if (k == 1) {
            scan = scan_roots(spec.f, x, spec.z0[0], spec.y_box[0], opt.scan_intervals, opt.tol);
            if (!r.converged && !scan.brackets.empty()) {
                // Stalled: take the bracket closest to the warm start.
                auto it = std::min_element(scan.brackets.begin(), scan.brackets.end(), [&](auto& p, auto& q) {
                    return std::abs(0.5 * (p.first + p.second) - y_start[0]) <
                           std::abs(0.5 * (q.first + q.second) - y_start[0]);
                });
                IterResult b = it->first == it->second
                                   ? IterResult{Eigen::VectorXd::Constant(1, it->first), 0.0, 0, true}
                                   : bisect(spec.f, x, spec.z0[0], it->first, it->second, opt.tol);
                if (b.converged) {
                    b.residual = std::abs(spec.f(x, b.y)[0] - spec.z0[0]);
                    b.iterations += r.iterations;
                    r = b;
                }
            }
        } else if (r.converged) {
            // Multistart from the faces of V; a distinct root is ambiguity.
            for (int a = 0; a < k && scan.roots < 2; ++a) {
                for (double side : {0.25, 0.75}) {
                    Eigen::VectorXd start = r.y;
                    const auto& iv = spec.y_box[static_cast<std::size_t>(a)];
                    start[a] = iv.lo + side * (iv.hi - iv.lo);
                    const IterResult other =
                        damped_solve(spec.f, x, spec.z0, start, slope, opt.tol, opt.max_iter, &spec.y_box);
                    if (other.converged && (other.y - r.y).norm() > 1e-6 * (1.0 + r.y.norm())) {
                        scan.roots = 2;
                        break;
                    }
                }
            }
        }

        sol.iterations[node] = r.iterations;
        sol.residuals[node] = r.residual;
        if (r.converged) {
            sol.g[node] = r.y;
            solved[node] = true;
            sol.status[node] = scan.roots >= 2 ? NodeStatus::Ambiguous : NodeStatus::Converged;
        }
        if (!r.converged) {
            sol.failed.push_back(node);
        } else if (scan.roots >= 2) {
            sol.ambiguous.push_back(node);
        }
    }
    std::sort(sol.failed.begin(), sol.failed.end());
    std::sort(sol.ambiguous.begin(), sol.ambiguous.end());

    for (const auto& [a, b] : grid.adjacent_pairs()) {
        if (sol.status[a] != NodeStatus::Converged || sol.status[b] != NodeStatus::Converged) continue;
        const double dx = (sol.nodes[a] - sol.nodes[b]).norm();
        sol.lipschitz_estimate = std::max(sol.lipschitz_estimate, (sol.g[a] - sol.g[b]).norm() / dx);
    }
    return sol;
}

Distortion bilipschitz_estimate(const MapFn& map, const std::vector<PointPair>& pairs) {
    Distortion d{std::numeric_limits<double>::infinity(), 0.0, 0};
    for (const auto& [p, q] : pairs) {
        require_same_dim(p, q, "bilipschitz_estimate");
        const double dx = (p - q).norm();
        if (dx == 0.0) continue;
        const double ratio = (map(p) - map(q)).norm() / dx;
        d.lower = std::min(d.lower, ratio);
        d.upper = std::max(d.upper, ratio);
        ++d.pairs_used;
    }
    if (d.pairs_used == 0) throw std::invalid_argument("bilipschitz_estimate: need two distinct sample points");
    return d;
}

Distortion bilipschitz_estimate(const MapFn& map, const MapFn& inverse, const std::vector<PointPair>& pairs) {
    Distortion d = bilipschitz_estimate(map, pairs);
    for (const auto& [p, q] : pairs) {
        const Eigen::VectorXd fp = map(p), fq = map(q);
        const double dy = (fp - fq).norm();
        if (dy == 0.0) continue;
        const double inv_ratio = (inverse(fp) - inverse(fq)).norm() / dy;
        if (inv_ratio > 0.0) d.lower = std::min(d.lower, 1.0 / inv_ratio);
    }
    return d;
}

Chart build_chart(const LipschitzMapSpec& spec, const ImplicitSolution& solution, const ChartOptions& opt) {
    spec.validate();
    if (!solution.clean()) throw std::invalid_argument("build_chart: implicit solution has failed nodes");
    const int m = spec.m();
    const int k = spec.k();
    auto f = spec.f;
    const Point x0 = spec.x0;

    Chart chart;
    chart.forward = [f, x0, m, k](const Eigen::VectorXd& p) {
        Eigen::VectorXd out(m + k);
        out.head(m) = p.head(m) - x0;
        out.tail(k) = f(p.head(m), p.tail(k));
        return out;
    };

    auto slope = std::make_shared<Eigen::PartialPivLU<Matrix>>(solution.slope);
    const auto nodes = solution.nodes;
    const auto g = solution.g;
    const double tol = opt.tol;
    const int max_iter = opt.max_iter;
    chart.inverse = [f, x0, m, k, slope, nodes, g, tol, max_iter](const Eigen::VectorXd& w) {
        const Eigen::VectorXd x = w.head(m) + x0;
        std::size_t best = 0;
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if ((nodes[i] - x).squaredNorm() < (nodes[best] - x).squaredNorm()) best = i;
        const IterResult r = damped_solve(f, x, w.tail(k), g[best], *slope, tol, max_iter, nullptr);
        if (!r.converged) throw std::runtime_error("build_chart: inverse iteration did not converge");
        Eigen::VectorXd out(m + k);
        out.head(m) = x;
        out.tail(k) = r.y;
        return out;
    };

    Rng rng(opt.seed);
    std::vector<Interval> box = spec.x_box;
    box.insert(box.end(), spec.y_box.begin(), spec.y_box.end());
    for (int s = 0; s < opt.n_samples; ++s) {
        Point p(m + k);
        for (int i = 0; i < m + k; ++i) p[i] = rng.uniform(box[static_cast<std::size_t>(i)].lo, box[static_cast<std::size_t>(i)].hi);
        chart.roundtrip_error = std::max(chart.roundtrip_error, (chart.inverse(chart.forward(p)) - p).norm());
        chart.samples.push_back(std::move(p));
    }
    std::vector<PointPair> pairs;
    for (std::size_t i = 0; i + 1 < chart.samples.size(); ++i) pairs.emplace_back(chart.samples[i], chart.samples[i + 1]);
    if (!pairs.empty()) chart.distortion = bilipschitz_estimate(chart.forward, chart.inverse, pairs);
    return chart;
}

}  // namespace lipmedial
