#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "affmap/percept/cloud.hpp"
#include "affmap/percept/segment.hpp"
#include "affmap/percept/spfh.hpp"

namespace affmap::percept {

inline constexpr int kColorHistogramDim = 15;
inline constexpr int kFpfhDim = 33;
inline constexpr int kFeatureDim = kColorHistogramDim + kFpfhDim;

/// Five equal-width bins per CIELab channel over the fixed channel ranges
/// (L: [0,100], a/b: [-128,127]); each channel normalized to unit sum, so
/// the 15 entries sum to 3.
inline Eigen::VectorXd color_histogram(const PointCloud& cloud, const Segment& seg) {
    if (seg.point_indices.empty()) throw std::invalid_argument("color_histogram: empty segment");
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(kColorHistogramDim);
    constexpr double lo[3] = {0.0, -128.0, -128.0};
    constexpr double hi[3] = {100.0, 127.0, 127.0};
    for (int idx : seg.point_indices) {
        const auto& c = cloud.points[static_cast<std::size_t>(idx)].color;
        for (int ch = 0; ch < 3; ++ch) {
            const int b = detail::angle_bin(c[ch], lo[ch], hi[ch], 5);
            hist[5 * ch + b] += 1.0;
        }
    }
    hist /= static_cast<double>(seg.point_indices.size());
    return hist;
}

namespace detail {

inline std::vector<const Segment*> neighbors_within(const std::vector<Segment>& segments,
                                                    const Segment& seg, double radius) {
    std::vector<const Segment*> out;
    for (int nid : seg.neighbors) {
        const Segment& nb = segments[static_cast<std::size_t>(nid)];
        if ((nb.centroid.position - seg.centroid.position).norm() <= radius) {
            out.push_back(&nb);
        }
    }
    return out;
}

inline Eigen::VectorXd segment_spfh(const std::vector<Segment>& segments, const Segment& seg,
                                    double radius, int bins) {
    const auto nbrs = neighbors_within(segments, seg, radius);
    std::vector<PointSample> pts;
    pts.reserve(nbrs.size());
    for (const Segment* nb : nbrs) pts.push_back(nb->centroid);
    return spfh(seg.centroid, pts, bins);
}

}  // namespace detail

/// Fast point feature histogram over the segment adjacency graph:
///   FPFH(s) = SPFH(s) + (1/k) * sum_i SPFH(n_i) / w_i,   w_i = |c_s - c_i|
/// where the SPFH of a segment is taken at its centroid against its
/// adjacent centroids within the radius. Normalized to unit sum. An
/// isolated segment keeps its own (zero) SPFH.
inline Eigen::VectorXd fpfh(const std::vector<Segment>& segments, int segment_id, double radius,
                            int bins = 11) {
    const Segment& seg = segments[static_cast<std::size_t>(segment_id)];
    Eigen::VectorXd f = detail::segment_spfh(segments, seg, radius, bins);
    const auto nbrs = detail::neighbors_within(segments, seg, radius);
    if (!nbrs.empty()) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.size());
        for (const Segment* nb : nbrs) {
            const double w = std::max((nb->centroid.position - seg.centroid.position).norm(), 1e-12);
            acc += detail::segment_spfh(segments, *nb, radius, bins) / w;
        }
        f += acc / static_cast<double>(nbrs.size());
    }
    const double total = f.sum();
    if (total > 0.0) f /= total;
    return f;
}

/// 48-dim descriptor: 15 color histogram entries then 33 FPFH entries.
inline Eigen::VectorXd feature(const PointCloud& cloud, const std::vector<Segment>& segments,
                               int segment_id, double fpfh_radius) {
    const Segment& seg = segments[static_cast<std::size_t>(segment_id)];
    Eigen::VectorXd out(kFeatureDim);
    out.head<kColorHistogramDim>() = color_histogram(cloud, seg);
    out.tail<kFpfhDim>() = fpfh(segments, segment_id, fpfh_radius);
    return out;
}

/// Features for every segment of a frame.
inline std::vector<Eigen::VectorXd> all_features(const PointCloud& cloud,
                                                 const std::vector<Segment>& segments,
                                                 double fpfh_radius) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(segments.size());
    for (const auto& seg : segments) out.push_back(feature(cloud, segments, seg.id, fpfh_radius));
    return out;
}

}  // namespace affmap::percept
