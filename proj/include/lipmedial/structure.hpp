#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lipmedial/clarke.hpp"
#include "lipmedial/geometry.hpp"
#include "lipmedial/lift.hpp"

namespace lipmedial {

/// One cluster M_j of the nearest-point set m(x0), the radius of its closed
/// neighbourhood W_j, and the sites of M inside W_j.
struct Cluster {
    std::vector<Point> points;
    double radius = 0.0;
    std::vector<Point> local_sites;

    Point barycenter() const;
};

/// A point x0 of the medial axis with m(x0) split into k >= 2 clusters.
class LocalConfiguration {
public:
    /// Clusters m(x0) at scale `cluster_eps` and sizes the neighbourhoods.
    static LocalConfiguration from_sites(const SiteSet& M, const Point& x0, double cluster_eps = 1e-6);

    /// Uses the given partition of m(x0). Throws std::invalid_argument when a
    /// cluster point is not a nearest site of x0 or fewer than two clusters
    /// are given.
    static LocalConfiguration from_clusters(const SiteSet& M, const Point& x0,
                                            const std::vector<std::vector<Point>>& clusters);

    const SiteSet& sites() const { return sites_; }
    const Point& x0() const { return x0_; }
    const std::vector<Cluster>& clusters() const { return clusters_; }
    int k() const { return static_cast<int>(clusters_.size()); }
    Eigen::Index n() const { return x0_.size(); }
    /// dist(x0, M), the radius of the supporting sphere.
    double support_radius() const { return support_radius_; }
    double min_radius() const;

private:
    LocalConfiguration(SiteSet M, Point x0, std::vector<Cluster> clusters, double support_radius);

    SiteSet sites_;
    Point x0_;
    std::vector<Cluster> clusters_;
    double support_radius_;
};

/// Squared distance from x to the sites of M inside W_j.
double delta_j(const Point& x, const LocalConfiguration& cfg, int j);

/// (delta_1(x), ..., delta_k(x)).
Eigen::VectorXd map_h(const Point& x, const LocalConfiguration& cfg);

/// t / sum(t); throws std::domain_error when sum(t) <= tol.
Eigen::VectorXd map_h1(const Eigen::VectorXd& t, double tol = 1e-300);

/// h1 o h, valued in the (k-1)-simplex.
Eigen::VectorXd map_H(const Point& x, const LocalConfiguration& cfg);

enum class LabelKind { InConflict, InSelf, Off };

struct PointLabel {
    LabelKind kind = LabelKind::Off;
    /// Cluster index for InSelf (0-based), -1 otherwise.
    int cluster = -1;

    bool operator==(const PointLabel&) const = default;
};

/// Absolute tie tolerance 1e-9 (1 + delta) used when none is given.
double default_tie_tol(double delta);

/// InConflict: two clusters attain delta(x) = min_j delta_j(x).
/// InSelf(j): j is the unique minimiser and x has two nearest sites in W_j.
/// A negative `tol` selects default_tie_tol.
PointLabel classify_point(const Point& x, const LocalConfiguration& cfg, double tol = -1.0);

/// A choice y_j in cvx(M_j), one column per cluster (n x k).
using SiteChoice = Matrix;

struct ChoiceOptions {
    int n_samples = 256;
    std::uint64_t seed = 0;
    /// Upper bound on enumerated vertex combinations.
    long max_vertex_choices = 4096;
};

/// Vertex combinations of the clusters followed by seeded random convex
/// combinations; singleton clusters yield exactly one choice.
std::vector<SiteChoice> enumerate_choices(const LocalConfiguration& cfg, const ChoiceOptions& opt);

/// Columns y_2 - y_1, ..., y_k - y_1.
Matrix edge_matrix(const SiteChoice& ys);

double smallest_singular_value(const Matrix& A);

/// Affine independence of every sampled choice; margin is the smallest
/// singular value of the edge matrix. Throws when k > n + 1.
Certificate simplex_condition(const LocalConfiguration& cfg, const ChoiceOptions& opt = {}, double tol = 1e-12);

/// n = 3, k = 4, singleton clusters: not coplanar (equivalently not on a
/// circle of the supporting sphere). Margin is |det| of the edge matrix.
Certificate general_position_r3(const LocalConfiguration& cfg, double tol = 1e-12);

/// Per-choice quantities behind condition (T).
struct TransversalityMeasure {
    /// Smallest singular value of E^T Q, Q an orthonormal basis of L.
    double edge_margin = 0.0;
    /// Smallest singular value of [Q | basis of Lin{y_i - y_1}^perp].
    double stacked_margin = 0.0;
    /// dim Lin{y_i - y_1}.
    int edge_rank = 0;
};

TransversalityMeasure transversality(const SiteChoice& ys, const Matrix& L, double rank_tol = 1e-12);

/// L (n x (k - 1), independent columns) meets (Lin{y_i - y_1})^perp only in
/// 0 for every sampled choice. Throws std::invalid_argument on malformed L.
Certificate condition_T(const LocalConfiguration& cfg, const Matrix& L, const ChoiceOptions& opt = {},
                        double tol = 1e-12);

struct DirectionSearch {
    Matrix L;
    Certificate certificate;
};

/// Tries span{b_i - b_1} (b_i the cluster barycentres) and then seeded
/// random (k - 1)-frames; returns the first passing L or the best one seen.
DirectionSearch find_direction_L(const LocalConfiguration& cfg, int n_candidates = 64, const ChoiceOptions& opt = {},
                                 double tol = 1e-12);

/// The minimum coordinate of t is attained by at least two indices.
bool ek_membership(const Eigen::VectorXd& t, double tol = 1e-9);

struct NodeRecord {
    Point x;
    PointLabel label;
    Eigen::VectorXd h_image;
    bool ek_member = false;
    bool mismatch = false;
    /// Some site outside every W_j is closer than the clusters.
    bool outside_region = false;
};

struct StructureReport {
    Grid grid;
    double radius;
    std::vector<NodeRecord> nodes;
    std::vector<std::size_t> mismatch_nodes;
    std::vector<std::size_t> invalid_nodes;
    Distortion distortion;
    int cube_dim = 0;
    Matrix L;
    std::size_t conflict_count = 0;
};

struct StructureOptions {
    int resolution = 17;
    /// Ball radius of U; non-positive selects half the smallest cluster radius.
    double radius = -1.0;
    /// Negative selects default_tie_tol per node.
    double tie_tol = -1.0;
    int n_candidates = 64;
    ChoiceOptions choices;
};

/// Compares E(x0) with H^{-1}(E^(k)) node by node on the grid points of the
/// ball U around x0, and estimates the distortion of the chart
/// x -> (K^T (x - x0), H(x)) with K an orthonormal basis of L^perp.
StructureReport verify_structure(const LocalConfiguration& cfg, const StructureOptions& opt = {});

}  // namespace lipmedial
