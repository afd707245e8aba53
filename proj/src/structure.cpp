#include "lipmedial/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lipmedial/random.hpp"

namespace lipmedial {

Point Cluster::barycenter() const {
    Point b = Point::Zero(points.front().size());
    for (const auto& p : points) b += p;
    return b / static_cast<double>(points.size());
}

LocalConfiguration::LocalConfiguration(SiteSet M, Point x0, std::vector<Cluster> clusters, double support_radius)
    : sites_(std::move(M)), x0_(std::move(x0)), clusters_(std::move(clusters)), support_radius_(support_radius) {}

LocalConfiguration LocalConfiguration::from_sites(const SiteSet& M, const Point& x0, double cluster_eps) {
    const auto near = nearest(x0, M);
    if (near.nearest.size() < 2)
        throw std::invalid_argument("LocalConfiguration: x0 has a single nearest site (not on the medial axis)");
    return from_clusters(M, x0, cluster_components(near.nearest, cluster_eps));
}

LocalConfiguration LocalConfiguration::from_clusters(const SiteSet& M, const Point& x0,
                                                     const std::vector<std::vector<Point>>& clusters) {
    if (x0.size() != M.dim()) throw std::invalid_argument("LocalConfiguration: dimension mismatch");
    if (clusters.size() < 2) throw std::invalid_argument("LocalConfiguration: need k >= 2 clusters");
    const auto near = nearest(x0, M);
    const double on_sphere_tol = std::max(M.tol(), 1e-9 * (1.0 + near.distance));
    for (const auto& c : clusters) {
        for (const auto& p : c) {
            require_same_dim(p, x0, "LocalConfiguration");
            if (std::abs((p - x0).norm() - near.distance) > on_sphere_tol)
                throw std::invalid_argument("LocalConfiguration: cluster point is not a nearest site of x0");
        }
    }
    const auto hoods = build_neighborhoods(clusters);
    std::vector<Cluster> out;
    for (const auto& h : hoods) {
        Cluster c{h.cluster, h.radius, {}};
        for (const auto& s : M.sites()) {
            const bool in_w = std::any_of(h.cluster.begin(), h.cluster.end(),
                                          [&](const Point& p) { return (s - p).norm() <= h.radius; });
            if (in_w) c.local_sites.push_back(s);
        }
        out.push_back(std::move(c));
    }
    return LocalConfiguration(M, x0, std::move(out), near.distance);
}

double LocalConfiguration::min_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : clusters_) r = std::min(r, c.radius);
    return r;
}

double delta_j(const Point& x, const LocalConfiguration& cfg, int j) {
    if (j < 0 || j >= cfg.k()) throw std::out_of_range("delta_j: cluster index " + std::to_string(j));
    require_same_dim(x, cfg.x0(), "delta_j");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : cfg.clusters()[static_cast<std::size_t>(j)].local_sites) best = std::min(best, (x - s).squaredNorm());
    return best;
}

Eigen::VectorXd map_h(const Point& x, const LocalConfiguration& cfg) {
    Eigen::VectorXd h(cfg.k());
    for (int j = 0; j < cfg.k(); ++j) h[j] = delta_j(x, cfg, j);
    return h;
}

Eigen::VectorXd map_h1(const Eigen::VectorXd& t, double tol) {
    const double s = t.sum();
    if (!(s > tol)) throw std::domain_error("map_h1: coordinate sum must be positive");
    return t / s;
}

Eigen::VectorXd map_H(const Point& x, const LocalConfiguration& cfg) { return map_h1(map_h(x, cfg)); }

double default_tie_tol(double delta) { return 1e-9 * (1.0 + delta); }

PointLabel classify_point(const Point& x, const LocalConfiguration& cfg, double tol) {
    const Eigen::VectorXd h = map_h(x, cfg);
    const double delta = h.minCoeff();
    const double t = tol < 0 ? default_tie_tol(delta) : tol;
    int argmin = -1;
    int ties = 0;
    for (int j = 0; j < cfg.k(); ++j) {
        if (h[j] - delta <= t) {
            ++ties;
            if (argmin < 0) argmin = j;
        }
    }
    if (ties >= 2) return {LabelKind::InConflict, -1};
    int near = 0;
    for (const auto& s : cfg.clusters()[static_cast<std::size_t>(argmin)].local_sites)
        if ((x - s).squaredNorm() - delta <= t) ++near;
    if (near >= 2) return {LabelKind::InSelf, argmin};
    return {LabelKind::Off, -1};
}

std::vector<SiteChoice> enumerate_choices(const LocalConfiguration& cfg, const ChoiceOptions& opt) {
    const auto& cs = cfg.clusters();
    const auto n = cfg.n();
    const auto k = cfg.k();
    long combos = 1;
    bool all_singletons = true;
    for (const auto& c : cs) {
        all_singletons = all_singletons && c.points.size() == 1;
        combos = (combos > opt.max_vertex_choices) ? combos : combos * static_cast<long>(c.points.size());
    }

    std::vector<SiteChoice> out;
    Rng rng(opt.seed);
    if (combos <= opt.max_vertex_choices) {
        std::vector<std::size_t> digit(cs.size(), 0);
        for (long c = 0; c < combos; ++c) {
            SiteChoice ys(n, k);
            for (int j = 0; j < k; ++j) ys.col(j) = cs[static_cast<std::size_t>(j)].points[digit[static_cast<std::size_t>(j)]];
            out.push_back(std::move(ys));
            for (std::size_t j = 0; j < cs.size(); ++j) {
                if (++digit[j] < cs[j].points.size()) break;
                digit[j] = 0;
            }
        }
    } else {
        for (long c = 0; c < opt.max_vertex_choices; ++c) {
            SiteChoice ys(n, k);
            for (int j = 0; j < k; ++j) {
                const auto& pts = cs[static_cast<std::size_t>(j)].points;
                auto pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pts.size()));
                ys.col(j) = pts[std::min(pick, pts.size() - 1)];
            }
            out.push_back(std::move(ys));
        }
    }
    if (all_singletons) return out;

    for (int s = 0; s < opt.n_samples; ++s) {
        SiteChoice ys(n, k);
        for (int j = 0; j < k; ++j) {
            const auto& pts = cs[static_cast<std::size_t>(j)].points;
            const Eigen::VectorXd w = rng.simplex_weights(static_cast<Eigen::Index>(pts.size()));
            Point y = Point::Zero(n);
            for (std::size_t i = 0; i < pts.size(); ++i) y += w[static_cast<Eigen::Index>(i)] * pts[i];
            ys.col(j) = y;
        }
        out.push_back(std::move(ys));
    }
    return out;
}

Matrix edge_matrix(const SiteChoice& ys) {
    Matrix E(ys.rows(), ys.cols() - 1);
    for (Eigen::Index i = 1; i < ys.cols(); ++i) E.col(i - 1) = ys.col(i) - ys.col(0);
    return E;
}

double smallest_singular_value(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    if (A.cols() > A.rows()) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(A);
    return svd.singularValues().minCoeff();
}

namespace {

double edge_scale(const Matrix& E) {
    double s = 1.0;
    for (Eigen::Index i = 0; i < E.cols(); ++i) s = std::max(s, E.col(i).norm());
    return s;
}

void require_k_le_n_plus_1(const LocalConfiguration& cfg, const char* what) {
    if (cfg.k() > cfg.n() + 1) throw std::invalid_argument(std::string(what) + ": requires k <= n + 1");
}

Matrix orthonormal_basis(const Matrix& L) {
    Eigen::HouseholderQR<Matrix> qr(L);
    return qr.householderQ() * Matrix::Identity(L.rows(), L.cols());
}

}  // namespace

Certificate simplex_condition(const LocalConfiguration& cfg, const ChoiceOptions& opt, double tol) {
    require_k_le_n_plus_1(cfg, "simplex_condition");
    Certificate c{"simplex_condition"};
    c.margin = std::numeric_limits<double>::infinity();
    c.holds = true;
    for (const auto& ys : enumerate_choices(cfg, opt)) {
        ++c.samples_checked;
        const Matrix E = edge_matrix(ys);
        const double s = smallest_singular_value(E);
        if (s < c.margin) c.margin = s;
        if (s <= tol * edge_scale(E) && c.holds) {
            c.holds = false;
            c.witness = ys;
        }
    }
    return c;
}

Certificate general_position_r3(const LocalConfiguration& cfg, double tol) {
    if (cfg.n() != 3 || cfg.k() != 4) throw std::invalid_argument("general_position_r3: requires n = 3 and k = 4");
    for (const auto& cl : cfg.clusters())
        if (cl.points.size() != 1) throw std::invalid_argument("general_position_r3: clusters must be single points");
    SiteChoice ys(3, 4);
    for (int j = 0; j < 4; ++j) ys.col(j) = cfg.clusters()[static_cast<std::size_t>(j)].points.front();
    Certificate c{"general_position_r3"};
    c.samples_checked = 1;
    c.margin = std::abs(edge_matrix(ys).determinant());
    c.holds = c.margin > tol;
    if (!c.holds) c.witness = ys;
    return c;
}

TransversalityMeasure transversality(const SiteChoice& ys, const Matrix& L, double rank_tol) {
    const Matrix E = edge_matrix(ys);
    const Matrix Q = orthonormal_basis(L);
    TransversalityMeasure t;
    t.edge_margin = smallest_singular_value(E.transpose() * Q);

    Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double cut = rank_tol * std::max(1.0, sv.size() ? sv.maxCoeff() : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++t.edge_rank;
    const Eigen::Index n = E.rows();
    const Matrix perp = svd.matrixU().rightCols(n - t.edge_rank);
    Matrix stacked(n, Q.cols() + perp.cols());
    stacked << Q, perp;
    t.stacked_margin = smallest_singular_value(stacked);
    return t;
}

Certificate condition_T(const LocalConfiguration& cfg, const Matrix& L, const ChoiceOptions& opt, double tol) {
    require_k_le_n_plus_1(cfg, "condition_T");
    if (L.rows() != cfg.n() || L.cols() != cfg.k() - 1)
        throw std::invalid_argument("condition_T: L must be n x (k - 1)");
    if (!L.allFinite() || smallest_singular_value(L) <= 1e-12 * std::max(1.0, L.norm()))
        throw std::invalid_argument("condition_T: columns of L are not independent");

    Certificate c{"condition_T"};
    c.margin = std::numeric_limits<double>::infinity();
    c.holds = true;
    for (const auto& ys : enumerate_choices(cfg, opt)) {
        ++c.samples_checked;
        const auto t = transversality(ys, L);
        const double m = t.edge_rank < cfg.k() - 1 ? 0.0 : t.edge_margin;
        c.margin = std::min(c.margin, m);
        if (m <= tol && c.holds) {
            c.holds = false;
            c.witness = ys;
        }
    }
    return c;
}

DirectionSearch find_direction_L(const LocalConfiguration& cfg, int n_candidates, const ChoiceOptions& opt,
                                 double tol) {
    require_k_le_n_plus_1(cfg, "find_direction_L");
    const auto n = cfg.n();
    const int km1 = cfg.k() - 1;

    std::vector<Matrix> candidates;
    Matrix L0(n, km1);
    const Point b1 = cfg.clusters().front().barycenter();
    for (int i = 1; i < cfg.k(); ++i) L0.col(i - 1) = cfg.clusters()[static_cast<std::size_t>(i)].barycenter() - b1;
    candidates.push_back(L0);
    Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int c = 0; c < n_candidates; ++c) {
        Matrix L(n, km1);
        for (int j = 0; j < km1; ++j) L.col(j) = rng.normal_vector(n);
        candidates.push_back(std::move(L));
    }

    std::optional<DirectionSearch> best;
    long checked = 0;
    for (auto& L : candidates) {
        if (smallest_singular_value(L) <= 1e-12 * std::max(1.0, L.norm())) continue;
        Certificate cert = condition_T(cfg, L, opt, tol);
        checked += cert.samples_checked;
        cert.name = "find_direction_L";
        const bool better = !best || cert.margin > best->certificate.margin;
        if (cert.holds) {
            cert.samples_checked = checked;
            return {L, std::move(cert)};
        }
        if (better) best = DirectionSearch{L, std::move(cert)};
    }
    if (!best) {
        // Every candidate frame was rank deficient.
        Certificate cert{"find_direction_L"};
        cert.witness = L0;
        best = DirectionSearch{Matrix::Identity(n, km1), std::move(cert)};
    }
    best->certificate.samples_checked = checked;
    return *best;
}

bool ek_membership(const Eigen::VectorXd& t, double tol) {
    const double lo = t.minCoeff();
    int count = 0;
    for (Eigen::Index i = 0; i < t.size(); ++i)
        if (t[i] - lo <= tol) ++count;
    return count >= 2;
}

StructureReport verify_structure(const LocalConfiguration& cfg, const StructureOptions& opt) {
    require_k_le_n_plus_1(cfg, "verify_structure");
    const double radius = opt.radius > 0 ? opt.radius : 0.5 * cfg.min_radius();
    const Point& x0 = cfg.x0();
    const auto n = cfg.n();

    StructureReport rep{Grid::cube(x0, radius, opt.resolution), radius};
    rep.cube_dim = static_cast<int>(n) - cfg.k() + 1;
    const auto search = find_direction_L(cfg, opt.n_candidates, opt.choices);
    rep.L = search.L;

    std::vector<long> slot(rep.grid.node_count(), -1);
    for (std::size_t i = 0; i < rep.grid.node_count(); ++i) {
        Point x = rep.grid.node(i);
        if ((x - x0).norm() > radius * (1.0 + 1e-12)) continue;
        NodeRecord rec;
        const Eigen::VectorXd h = map_h(x, cfg);
        const double delta = h.minCoeff();
        const double tie = opt.tie_tol < 0 ? default_tie_tol(delta) : opt.tie_tol;
        rec.label = classify_point(x, cfg, tie);
        rec.h_image = map_h1(h);
        // A delta-tie of size tie is a tie of size tie / sum(h) after h1.
        rec.ek_member = ek_membership(rec.h_image, tie / h.sum());
        rec.mismatch = (rec.label.kind == LabelKind::InConflict) != rec.ek_member;
        const double d = nearest(x, cfg.sites()).distance;
        rec.outside_region = d * d < delta - tie;
        rec.x = std::move(x);

        const std::size_t idx = rep.nodes.size();
        slot[i] = static_cast<long>(idx);
        if (rec.mismatch) rep.mismatch_nodes.push_back(idx);
        if (rec.outside_region) rep.invalid_nodes.push_back(idx);
        if (rec.label.kind == LabelKind::InConflict) ++rep.conflict_count;
        rep.nodes.push_back(std::move(rec));
    }

    // Complementary coordinates along an orthonormal basis of L^perp.
    const int km1 = cfg.k() - 1;
    Matrix K(n, 0);
    if (km1 < n) {
        Eigen::JacobiSVD<Matrix> svd(search.L, Eigen::ComputeFullU);
        K = svd.matrixU().rightCols(n - km1);
    }
    const MapFn chart = [&cfg, K, x0](const Eigen::VectorXd& x) {
        const Eigen::VectorXd H = map_H(x, cfg);
        Eigen::VectorXd out(K.cols() + H.size());
        out << K.transpose() * (x - x0), H;
        return out;
    };

    std::vector<PointPair> pairs;
    for (const auto& [a, b] : rep.grid.adjacent_pairs()) {
        if (slot[a] < 0 || slot[b] < 0) continue;
        pairs.emplace_back(rep.nodes[static_cast<std::size_t>(slot[a])].x, rep.nodes[static_cast<std::size_t>(slot[b])].x);
    }
    for (const auto& rec : rep.nodes) pairs.emplace_back(x0, rec.x);
    rep.distortion = bilipschitz_estimate(chart, pairs);
    return rep;
}

}  // namespace lipmedial
