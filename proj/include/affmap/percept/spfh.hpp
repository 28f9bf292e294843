#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>

#include "affmap/percept/cloud.hpp"

namespace affmap::percept {

struct PairAngles {
    double alpha = 0.0;  // in [-1, 1]
    double phi = 0.0;    // in [-1, 1]
    double theta = 0.0;  // in (-pi, pi]
};

/// Angle triple between an oriented source point and a target point, in the
/// frame u = n_s, v = u x d, w = u x v with d the unit displacement.
inline PairAngles pair_angles(const PointSample& source, const PointSample& target) {
    const Eigen::Vector3d diff = target.position - source.position;
    const double dist = diff.norm();
    if (dist < 1e-12) throw std::invalid_argument("pair_angles: coincident points");
    const Eigen::Vector3d d = diff / dist;
    const Eigen::Vector3d u = source.normal;
    const Eigen::Vector3d v = u.cross(d);
    const Eigen::Vector3d w = u.cross(v);
    PairAngles a;
    a.alpha = v.dot(target.normal);
    a.phi = u.dot(d);
    a.theta = std::atan2(w.dot(target.normal), u.dot(target.normal));
    return a;
}

namespace detail {
inline int angle_bin(double value, double lo, double hi, int bins) {
    const int b = static_cast<int>(std::floor((value - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
}
}  // namespace detail

/// Simplified point feature histogram: the three pair angles against every
/// neighbor, binned per angle and normalized to unit sum. Coincident
/// neighbors are skipped; no usable neighbor yields the zero histogram.
inline Eigen::VectorXd spfh(const PointSample& center, std::span<const PointSample> neighbors,
                            int bins = 11) {
    Eigen::VectorXd hist = Eigen::VectorXd::Zero(3 * bins);
    double count = 0.0;
    for (const auto& nb : neighbors) {
        if ((nb.position - center.position).norm() < 1e-12) continue;
        const PairAngles a = pair_angles(center, nb);
        hist[detail::angle_bin(a.alpha, -1.0, 1.0, bins)] += 1.0;
        hist[bins + detail::angle_bin(a.phi, -1.0, 1.0, bins)] += 1.0;
        hist[2 * bins + detail::angle_bin(a.theta, -M_PI, M_PI, bins)] += 1.0;
        count += 3.0;
    }
    if (count > 0.0) hist /= count;
    return hist;
}

}  // namespace affmap::percept
