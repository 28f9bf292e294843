#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "affmap/maps/relevance.hpp"
#include "affmap/percept/segment.hpp"

namespace affmap::maps {

/// Merged multi-affordance map: per segment one thresholded weight per
/// affordance (below-threshold weights are exactly zero) plus a display
/// label, the color of the maximum surviving affordance.
struct AffordanceMap {
    std::vector<std::string> affordances;  // column order
    std::vector<int> palette;              // color id per affordance
    std::vector<std::vector<double>> weights;  // [segment][affordance]
    std::vector<int> labels;               // palette color id, -1 = unlabeled
    double threshold = 0.5;
};

/// Default display priority: the most specific affordance wins ties.
inline const std::vector<std::string>& default_priority() {
    static const std::vector<std::string> order{"lift", "button", "push"};
    return order;
}

inline AffordanceMap merge_maps(std::span<const RelevanceMap> maps, double threshold,
                                const std::map<std::string, int>& palette,
                                std::span<const std::string> priority) {
    if (maps.empty()) throw std::invalid_argument("merge_maps: no maps");
    const std::size_t n = maps[0].weights.size();
    for (const auto& m : maps) {
        if (m.weights.size() != n) throw std::invalid_argument("merge_maps: segmentation mismatch");
    }

    AffordanceMap out;
    out.threshold = threshold;
    for (const auto& m : maps) {
        out.affordances.push_back(m.affordance);
        const auto it = palette.find(m.affordance);
        out.palette.push_back(it == palette.end() ? static_cast<int>(out.palette.size()) + 1
                                                  : it->second);
    }

    // Affordance visit order: the given priority first, then any remaining
    // in map order. Strict improvement is required to displace an earlier
    // (higher-priority) winner.
    std::vector<std::size_t> order;
    for (const auto& name : priority) {
        for (std::size_t a = 0; a < maps.size(); ++a) {
            if (maps[a].affordance == name) order.push_back(a);
        }
    }
    for (std::size_t a = 0; a < maps.size(); ++a) {
        bool seen = false;
        for (std::size_t o : order) seen = seen || o == a;
        if (!seen) order.push_back(a);
    }

    out.weights.assign(n, std::vector<double>(maps.size(), 0.0));
    out.labels.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        double best = 0.0;
        int best_label = -1;
        for (std::size_t a : order) {
            const double w = maps[a].weights[i];
            if (w < threshold) continue;
            out.weights[i][a] = w;
            if (best_label == -1 || w > best) {
                best = w;
                best_label = out.palette[a];
            }
        }
        out.labels[i] = best_label;
    }
    return out;
}

inline AffordanceMap merge_maps(std::span<const RelevanceMap> maps, double threshold,
                                const std::map<std::string, int>& palette) {
    return merge_maps(maps, threshold, palette, default_priority());
}

/// Text dump, one segment per line:
///   centroid_x centroid_y centroid_z  w_<aff0> ... w_<affN-1>  label_id
inline void dump_affordance_map(const AffordanceMap& map,
                                std::span<const percept::Segment> segments, std::ostream& out) {
    if (segments.size() != map.labels.size()) {
        throw std::invalid_argument("dump_affordance_map: segmentation mismatch");
    }
    out << "# x y z";
    for (std::size_t a = 0; a < map.affordances.size(); ++a) {
        out << " w_" << map.affordances[a] << "(color=" << map.palette[a] << ")";
    }
    out << " label\n";
    char buf[128];
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& c = segments[i].centroid.position;
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", c.x(), c.y(), c.z());
        out << buf;
        for (std::size_t a = 0; a < map.affordances.size(); ++a) {
            std::snprintf(buf, sizeof(buf), " %.17g", map.weights[i][a]);
            out << buf;
        }
        out << ' ' << map.labels[i] << '\n';
    }
}

/// Text dump of a single relevance map: segment id, centroid, weight.
inline void dump_relevance_map(const RelevanceMap& map,
                               std::span<const percept::Segment> segments, std::ostream& out) {
    if (segments.size() != map.weights.size()) {
        throw std::invalid_argument("dump_relevance_map: segmentation mismatch");
    }
    out << "# segment x y z w_" << map.affordance << "\n";
    char buf[160];
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& c = segments[i].centroid.position;
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g %.17g\n", segments[i].id, c.x(),
                      c.y(), c.z(), map.weights[i]);
        out << buf;
    }
}

}  // namespace affmap::maps
