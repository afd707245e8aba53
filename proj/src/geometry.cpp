#include "lipmedial/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lipmedial {

void require_same_dim(const Point& a, const Point& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

SiteSet::SiteSet(std::vector<Point> sites, double tol) : tol_(tol) {
    if (sites.empty()) throw std::invalid_argument("SiteSet: no sites");
    if (!(tol >= 0.0)) throw std::invalid_argument("SiteSet: negative tolerance");
    const auto n = sites.front().size();
    if (n < 1) throw std::invalid_argument("SiteSet: zero-dimensional site");
    sites_.reserve(sites.size());
    for (auto& s : sites) {
        if (s.size() != n) throw std::invalid_argument("SiteSet: mixed site dimensions");
        if (!s.allFinite()) throw std::invalid_argument("SiteSet: non-finite coordinate");
        const bool duplicate = std::any_of(sites_.begin(), sites_.end(), [&](const Point& kept) {
            return (kept - s).norm() <= tol_;
        });
        if (!duplicate) sites_.push_back(std::move(s));
    }
}

NearestResult nearest(const Point& x, const SiteSet& M) { return nearest(x, M, M.tol()); }

NearestResult nearest(const Point& x, const SiteSet& M, double tol) {
    if (x.size() != M.dim()) throw std::invalid_argument("nearest: dimension mismatch");
    std::vector<double> d(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) d[i] = (x - M[i]).norm();
    NearestResult out;
    out.distance = *std::min_element(d.begin(), d.end());
    for (std::size_t i = 0; i < M.size(); ++i) {
        if (d[i] - out.distance <= tol) {
            out.nearest.push_back(M[i]);
            out.indices.push_back(i);
        }
    }
    return out;
}

Grid::Grid(std::vector<Interval> box, int resolution) : box_(std::move(box)), resolution_(resolution) {
    if (box_.empty()) throw std::invalid_argument("Grid: empty box");
    if (resolution_ < 2) throw std::invalid_argument("Grid: resolution must be >= 2");
    node_count_ = 1;
    for (const auto& iv : box_) {
        if (!(iv.lo < iv.hi)) throw std::invalid_argument("Grid: each axis needs lo < hi");
        node_count_ *= static_cast<std::size_t>(resolution_);
    }
}

Grid Grid::cube(const Point& center, double half_width, int resolution) {
    std::vector<Interval> box;
    for (Eigen::Index i = 0; i < center.size(); ++i) {
        box.push_back({center[i] - half_width, center[i] + half_width});
    }
    return Grid(std::move(box), resolution);
}

double Grid::coordinate(int axis, int i) const {
    const auto& iv = box_[static_cast<std::size_t>(axis)];
    if (i == resolution_ - 1) return iv.hi;
    // Multiplying before dividing keeps symmetric nodes (e.g. the midpoint) exact.
    return iv.lo + (iv.hi - iv.lo) * i / (resolution_ - 1);
}

double Grid::spacing(int axis) const {
    const auto& iv = box_[static_cast<std::size_t>(axis)];
    return (iv.hi - iv.lo) / (resolution_ - 1);
}

std::vector<int> Grid::multi_index(std::size_t flat) const {
    std::vector<int> idx(box_.size());
    for (auto& i : idx) {
        i = static_cast<int>(flat % static_cast<std::size_t>(resolution_));
        flat /= static_cast<std::size_t>(resolution_);
    }
    return idx;
}

std::size_t Grid::flat_index(const std::vector<int>& idx) const {
    std::size_t flat = 0;
    for (std::size_t a = idx.size(); a-- > 0;) {
        flat = flat * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(idx[a]);
    }
    return flat;
}

Point Grid::node(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Point p(dim());
    for (Eigen::Index a = 0; a < dim(); ++a) p[a] = coordinate(static_cast<int>(a), idx[static_cast<std::size_t>(a)]);
    return p;
}

std::vector<std::pair<std::size_t, std::size_t>> Grid::adjacent_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < box_.size(); ++a) {
        for (std::size_t flat = 0; flat < node_count_; ++flat) {
            const auto i = (flat / stride) % static_cast<std::size_t>(resolution_);
            if (i + 1 < static_cast<std::size_t>(resolution_)) pairs.emplace_back(flat, flat + stride);
        }
        stride *= static_cast<std::size_t>(resolution_);
    }
    return pairs;
}

std::vector<Point> medial_axis_grid(const SiteSet& M, const Grid& g, double tol) {
    if (g.dim() != M.dim()) throw std::invalid_argument("medial_axis_grid: dimension mismatch");
    std::vector<Point> out;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        Point x = g.node(i);
        if (nearest(x, M, tol).nearest.size() > 1) out.push_back(std::move(x));
    }
    return out;
}

std::vector<std::vector<Point>> cluster_components(const std::vector<Point>& pts, double eps) {
    if (pts.empty()) throw std::invalid_argument("cluster_components: empty input");
    if (!(eps > 0.0)) throw std::invalid_argument("cluster_components: eps must be positive");

    std::vector<std::size_t> parent(pts.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
        require_same_dim(pts[i], pts.front(), "cluster_components");
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if ((pts[i] - pts[j]).norm() < eps) {
                const auto a = find(i), b = find(j);
                parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }

    std::vector<std::vector<Point>> out;
    std::vector<std::size_t> root_slot(pts.size(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto r = find(i);
        if (root_slot[r] == std::numeric_limits<std::size_t>::max()) {
            root_slot[r] = out.size();
            out.emplace_back();
        }
        out[root_slot[r]].push_back(pts[i]);
    }
    return out;
}

double set_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a) {
        for (const auto& q : b) {
            require_same_dim(p, q, "set_distance");
            best = std::min(best, (p - q).norm());
        }
    }
    return best;
}

std::vector<Neighborhood> build_neighborhoods(const std::vector<std::vector<Point>>& clusters) {
    if (clusters.size() < 2) throw std::invalid_argument("build_neighborhoods: need at least two clusters");
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (clusters[i].empty()) throw std::invalid_argument("build_neighborhoods: empty cluster");
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            d_min = std::min(d_min, set_distance(clusters[i], clusters[j]));
        }
    }
    if (!(d_min > 0.0)) throw std::invalid_argument("build_neighborhoods: clusters are not disjoint");
    std::vector<Neighborhood> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) out.push_back({c, d_min / 3.0});
    return out;
}

}  // namespace lipmedial
