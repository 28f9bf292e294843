#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace affmap::percept {

/// One sensed point: position in meters, CIELab color, unit surface normal.
struct PointSample {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d color = Eigen::Vector3d::Zero();  // L in [0,100], a,b in [-128,127]
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

/// Point cloud plus the scene-element id each point was sampled from.
/// Source ids are internal ground-truth bookkeeping; the ASCII dump carries
/// geometry and color only.
struct PointCloud {
    std::vector<PointSample> points;
    std::vector<std::int32_t> source;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    void add(const PointSample& p, std::int32_t src) {
        points.push_back(p);
        source.push_back(src);
    }
};

/// ASCII dump, one point per line: x y z L a b nx ny nz.
inline void dump_cloud(const PointCloud& cloud, std::ostream& out) {
    char line[256];
    for (const auto& p : cloud.points) {
        std::snprintf(line, sizeof(line),
                      "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                      p.position.x(), p.position.y(), p.position.z(),
                      p.color.x(), p.color.y(), p.color.z(),
                      p.normal.x(), p.normal.y(), p.normal.z());
        out << line;
    }
}

inline PointCloud parse_cloud(std::istream& in) {
    PointCloud cloud;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        PointSample p;
        ls >> p.position.x() >> p.position.y() >> p.position.z()
           >> p.color.x() >> p.color.y() >> p.color.z()
           >> p.normal.x() >> p.normal.y() >> p.normal.z();
        cloud.add(p, -1);
    }
    return cloud;
}

}  // namespace affmap::percept
