#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "affmap/percept/cloud.hpp"
#include "affmap/percept/spfh.hpp"

namespace affmap::percept {

struct SegmentationParams {
    double r_seed = 0.035;            // seed grid spacing; controls segment size
    double lambda = 0.2;              // color weight
    double mu = 0.4;                  // spatial weight
    double epsilon = 1.0;             // shape weight
    double color_norm = 100.0;        // m in the distance normalization
    double point_spfh_radius = 0.02;  // neighborhood of the per-point shape signature
    double adjacency_radius = 0.02;   // touch distance between segments
    int spfh_bins = 11;
};

/// A supervoxel-style cluster: member points, their centroid (mean position,
/// color, renormalized mean normal) and the adjacent segment ids.
struct Segment {
    int id = 0;
    std::vector<int> point_indices;
    PointSample centroid;
    std::vector<int> neighbors;
    int seed_point = -1;  // cloud index of the seed this segment grew from
};

namespace detail {

/// Dense bucket grid over the cloud bounding box; one pass to fill, direct
/// index arithmetic for 3x3x3 neighborhood scans.
class DenseGrid {
public:
    DenseGrid(const PointCloud& cloud, double cell) : cell_(std::max(cell, 1e-4)) {
        Eigen::Vector3d lo = cloud.points[0].position, hi = lo;
        for (const auto& p : cloud.points) {
            lo = lo.cwiseMin(p.position);
            hi = hi.cwiseMax(p.position);
        }
        origin_ = lo;
        nx_ = axis_cells(hi.x() - lo.x());
        ny_ = axis_cells(hi.y() - lo.y());
        nz_ = axis_cells(hi.z() - lo.z());
        cells_.resize(static_cast<std::size_t>(nx_) * ny_ * nz_);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            cells_[cell_of(cloud.points[i].position)].push_back(static_cast<int>(i));
        }
    }

    template <typename Fn>
    void for_neighborhood(const Eigen::Vector3d& p, Fn&& fn) const {
        const int cx = coord(p.x() - origin_.x(), nx_);
        const int cy = coord(p.y() - origin_.y(), ny_);
        const int cz = coord(p.z() - origin_.z(), nz_);
        for (int x = std::max(0, cx - 1); x <= std::min(nx_ - 1, cx + 1); ++x) {
            for (int y = std::max(0, cy - 1); y <= std::min(ny_ - 1, cy + 1); ++y) {
                for (int z = std::max(0, cz - 1); z <= std::min(nz_ - 1, cz + 1); ++z) {
                    const auto& bucket =
                        cells_[(static_cast<std::size_t>(x) * ny_ + y) * nz_ + z];
                    for (int idx : bucket) fn(idx);
                }
            }
        }
    }

private:
    int axis_cells(double extent) const {
        return std::max(1, static_cast<int>(std::floor(extent / cell_)) + 1);
    }
    int coord(double offset, int n) const {
        return std::clamp(static_cast<int>(std::floor(offset / cell_)), 0, n - 1);
    }
    std::size_t cell_of(const Eigen::Vector3d& p) const {
        return (static_cast<std::size_t>(coord(p.x() - origin_.x(), nx_)) * ny_ +
                coord(p.y() - origin_.y(), ny_)) *
                   nz_ +
               coord(p.z() - origin_.z(), nz_);
    }

    double cell_;
    Eigen::Vector3d origin_;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<std::vector<int>> cells_;
};

/// Per-point shape signatures for the segmentation distance: the SPFH of
/// each point against its radius neighborhood, as columns of a matrix.
inline Eigen::MatrixXd point_signatures(const PointCloud& cloud,
                                        const SegmentationParams& params) {
    const double r = params.point_spfh_radius;
    const double r2 = r * r;
    const int bins = params.spfh_bins;
    DenseGrid grid(cloud, r);
    Eigen::MatrixXd sig = Eigen::MatrixXd::Zero(3 * bins, static_cast<Eigen::Index>(cloud.size()));
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& pi = cloud.points[i];
        auto col = sig.col(static_cast<Eigen::Index>(i));
        double count = 0.0;
        grid.for_neighborhood(pi.position, [&](int j) {
            if (j == static_cast<int>(i)) return;
            const auto& pj = cloud.points[static_cast<std::size_t>(j)];
            const Eigen::Vector3d diff = pj.position - pi.position;
            const double d2 = diff.squaredNorm();
            if (d2 > r2 || d2 < 1e-24) return;
            const double dist = std::sqrt(d2);
            const Eigen::Vector3d d = diff / dist;
            const Eigen::Vector3d& u = pi.normal;
            const Eigen::Vector3d v = u.cross(d);
            const Eigen::Vector3d w = u.cross(v);
            col[angle_bin(v.dot(pj.normal), -1.0, 1.0, bins)] += 1.0;
            col[bins + angle_bin(u.dot(d), -1.0, 1.0, bins)] += 1.0;
            col[2 * bins + angle_bin(std::atan2(w.dot(pj.normal), u.dot(pj.normal)), -M_PI, M_PI,
                                     bins)] += 1.0;
            count += 3.0;
        });
        if (count > 0.0) col /= count;
    }
    return sig;
}

}  // namespace detail

/// Seeded region segmentation. Seeds sit on a grid of spacing r_seed (the
/// cloud point closest to each occupied cell center); every point joins the
/// seed minimizing
///   D^2 = lambda*Dc^2/m^2 + mu*Ds^2/(3 r_seed^2) + epsilon*Df^2
/// with Dc the CIELab distance, Ds the spatial distance and Df the distance
/// between per-point SPFH signatures. With lambda = epsilon = 0 this reduces
/// to the spatial Voronoi partition of the seeds.
inline std::vector<Segment> segment(const PointCloud& cloud, const SegmentationParams& params) {
    if (cloud.empty()) throw std::invalid_argument("segment: empty cloud");
    const double r = params.r_seed;

    // Seed selection: closest point to each occupied grid cell center,
    // iterated in deterministic cell order.
    std::map<std::tuple<long, long, long>, std::pair<double, int>> cell_best;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Eigen::Vector3d& p = cloud.points[i].position;
        const std::tuple<long, long, long> cell{static_cast<long>(std::floor(p.x() / r)),
                                                static_cast<long>(std::floor(p.y() / r)),
                                                static_cast<long>(std::floor(p.z() / r))};
        const Eigen::Vector3d center((std::get<0>(cell) + 0.5) * r, (std::get<1>(cell) + 0.5) * r,
                                     (std::get<2>(cell) + 0.5) * r);
        const double d = (p - center).squaredNorm();
        auto it = cell_best.find(cell);
        if (it == cell_best.end() || d < it->second.first) {
            cell_best[cell] = {d, static_cast<int>(i)};
        }
    }
    std::vector<int> seed_points;
    seed_points.reserve(cell_best.size());
    for (const auto& [cell, best] : cell_best) seed_points.push_back(best.second);

    Eigen::MatrixXd signatures;
    if (params.epsilon > 0.0) signatures = detail::point_signatures(cloud, params);

    // Candidate seeds within the local window, via a dense grid of cell 2r.
    PointCloud seed_cloud;
    for (int sp : seed_points) seed_cloud.add(cloud.points[static_cast<std::size_t>(sp)], 0);
    detail::DenseGrid seed_grid(seed_cloud, 2.0 * r);

    const double color_scale = params.lambda / (params.color_norm * params.color_norm);
    const double spatial_scale = params.mu / (3.0 * r * r);

    std::vector<int> assignment(cloud.size(), -1);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& pt = cloud.points[i];
        double best = std::numeric_limits<double>::infinity();
        int best_seed = -1;
        seed_grid.for_neighborhood(pt.position, [&](int s) {
            const auto& sp = cloud.points[static_cast<std::size_t>(seed_points[static_cast<std::size_t>(s)])];
            double d2 = spatial_scale * (pt.position - sp.position).squaredNorm();
            if (params.lambda > 0.0) d2 += color_scale * (pt.color - sp.color).squaredNorm();
            if (params.epsilon > 0.0 && d2 < best) {
                d2 += params.epsilon *
                      (signatures.col(static_cast<Eigen::Index>(i)) -
                       signatures.col(static_cast<Eigen::Index>(
                           seed_points[static_cast<std::size_t>(s)])))
                          .squaredNorm();
            }
            if (d2 < best || (d2 == best && s < best_seed)) {
                best = d2;
                best_seed = s;
            }
        });
        if (best_seed < 0) {
            // No seed within the local window; fall back to the spatially
            // nearest seed so coverage is total.
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < seed_points.size(); ++s) {
                const double d = (pt.position -
                                  cloud.points[static_cast<std::size_t>(seed_points[s])].position)
                                     .squaredNorm();
                if (d < nearest) { nearest = d; best_seed = static_cast<int>(s); }
            }
        }
        assignment[i] = best_seed;
    }

    // Collect non-empty segments, ids in seed order.
    std::vector<std::vector<int>> members(seed_points.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        members[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
    }
    std::vector<Segment> segments;
    std::vector<int> compact(seed_points.size(), -1);
    for (std::size_t s = 0; s < members.size(); ++s) {
        if (members[s].empty()) continue;
        compact[s] = static_cast<int>(segments.size());
        Segment seg;
        seg.id = compact[s];
        seg.seed_point = seed_points[s];
        seg.point_indices = std::move(members[s]);
        Eigen::Vector3d pos = Eigen::Vector3d::Zero(), col = Eigen::Vector3d::Zero(),
                        nrm = Eigen::Vector3d::Zero();
        for (int idx : seg.point_indices) {
            const auto& p = cloud.points[static_cast<std::size_t>(idx)];
            pos += p.position;
            col += p.color;
            nrm += p.normal;
        }
        const double n = static_cast<double>(seg.point_indices.size());
        seg.centroid.position = pos / n;
        seg.centroid.color = col / n;
        seg.centroid.normal = nrm.norm() > 1e-12 ? Eigen::Vector3d(nrm.normalized())
                                                 : Eigen::Vector3d::UnitZ();
        segments.push_back(std::move(seg));
    }

    // Adjacency: segments owning points within the touch radius.
    {
        detail::DenseGrid touch(cloud, params.adjacency_radius);
        const double touch2 = params.adjacency_radius * params.adjacency_radius;
        std::vector<int> seg_of(cloud.size());
        for (const auto& seg : segments) {
            for (int idx : seg.point_indices) seg_of[static_cast<std::size_t>(idx)] = seg.id;
        }
        std::vector<std::set<int>> adj(segments.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const int si = seg_of[i];
            touch.for_neighborhood(cloud.points[i].position, [&](int j) {
                const int sj = seg_of[static_cast<std::size_t>(j)];
                if (sj == si) return;
                if ((cloud.points[static_cast<std::size_t>(j)].position - cloud.points[i].position)
                        .squaredNorm() <= touch2) {
                    adj[static_cast<std::size_t>(si)].insert(sj);
                    adj[static_cast<std::size_t>(sj)].insert(si);
                }
            });
        }
        for (auto& seg : segments) {
            seg.neighbors.assign(adj[static_cast<std::size_t>(seg.id)].begin(),
                                 adj[static_cast<std::size_t>(seg.id)].end());
        }
    }

    return segments;
}

}  // namespace affmap::percept
